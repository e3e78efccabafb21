#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace greid {

using Vector = std::vector<double>;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct ImageSize {
    int width = 0;
    int height = 0;

    double diagonal() const;
};

/// Person box in pixels, (x, y) is the top-left corner.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    Point center() const { return {x + 0.5 * w, y + 0.5 * h}; }
};

/// One camera view of one group. Box order is the canonical person index.
struct GroupObservation {
    std::string image_id;
    std::string camera_id;
    int group_id = -1;
    std::vector<BoundingBox> boxes;
    ImageSize image_size;
    std::optional<std::string> image_path;

    int size() const { return static_cast<int>(boxes.size()); }

    /// Throws Error("invalid-observation") when a box or the box list is malformed.
    void validate() const;
};

enum class Granularity { fine = 1, medium = 2, coarse = 3, global = 4 };

const char* to_string(Granularity g);

struct GranularObject {
    Granularity order = Granularity::fine;
    std::vector<int> members;  // strictly increasing
    // Set on 2-person subgroups of a 2-person group, where they act as the coarsest level.
    bool coarsest_level = false;
};

std::vector<GranularObject> enumerate_granular_objects(const GroupObservation& obs);

/// Number of objects enumerate_granular_objects returns for a group of n persons.
std::size_t granular_object_count(int n);

// Lexicographic ranks of unordered subsets of {0..n-1}. Subgroup features and
// weights are stored in vectors indexed by these ranks.
int pair_count(int n);
int triple_count(int n);
int pair_rank(int n, int a, int b);
int triple_rank(int n, int a, int b, int c);
std::vector<std::array<int, 2>> all_pairs(int n);
std::vector<std::array<int, 3>> all_triples(int n);

struct SubgroupFeature {
    Vector appearance;
    Vector spatial;
};

/// Features for every granular object of one observation.
struct FeatureBundle {
    std::vector<Vector> person_appearance;      // f^l_i
    std::vector<Vector> edge_spatial;           // f^s_(i,j), by pair rank
    std::vector<SubgroupFeature> pairs;         // medium objects, by pair rank
    std::vector<SubgroupFeature> triples;       // coarse objects, by triple rank
    Vector global_appearance;                   // f^g

    int size() const { return static_cast<int>(person_appearance.size()); }
    std::size_t appearance_dim() const;
    std::size_t spatial_dim() const;

    /// Throws Error("invalid-features") on mixed dimensions or non-finite values.
    void validate() const;
};

struct MatchCandidate {
    int probe_person = 0;
    int gallery_person = 0;

    friend auto operator<=>(const MatchCandidate&, const MatchCandidate&) = default;
};

/// One-to-one set of candidates, kept sorted by (probe, gallery).
struct Mapping {
    std::vector<MatchCandidate> pairs;

    bool is_one_to_one() const;
    std::optional<int> gallery_of(int probe_person) const;
    std::optional<int> probe_of(int gallery_person) const;
    bool operator==(const Mapping&) const = default;
};

double euclidean(const Vector& a, const Vector& b);
double squared_euclidean(const Vector& a, const Vector& b);

}  // namespace greid
