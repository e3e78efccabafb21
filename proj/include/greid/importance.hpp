#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "greid/core.hpp"

namespace greid {

struct ImportanceConfig {
    int k_density = 2;             // LOF neighbourhood, truncated to N-1
    double ratio_floor = 1e-9;     // floor on density denominators
    double stability_eps = 1e-6;   // pair stability is 1/(d + eps)
    int max_iter = 5;
    double tol = 1e-3;             // stop when every fine weight moves less than this
    bool enabled = true;           // false: every object weight is 1

    void validate() const;
};

/// Importance weight per granular object of one observation. Subgroup entries are indexed
/// by pair_rank / triple_rank. The global weight is always 1.
struct ImportanceMap {
    std::vector<double> fine;
    std::vector<double> medium;
    std::vector<double> coarse;
    double global = 1.0;

    static ImportanceMap uniform(int n);
    int size() const { return static_cast<int>(fine.size()); }
    double of(const GranularObject& object) const;
};

/// Gallery (or probe) features matched one-to-one to a single person across images.
struct MatchSet {
    std::vector<Vector> features;
    std::vector<std::string> sources;  // image id of each matched feature

    bool empty() const { return features.empty(); }
    std::size_t size() const { return features.size(); }
};

/// Local reachability density of every person from box-center distances.
std::vector<double> local_density(const GroupObservation& obs, int k_density = 2);

/// t_1(i) = sum over peers of rho_i / rho_peer; 1 for a single person.
std::vector<double> static_weight_fine(std::span<const double> densities, double ratio_floor = 1e-9);

/// Inverse center distance normalized by the image diagonal.
double pair_stability(const BoundingBox& a, const BoundingBox& b, ImageSize image_size, double eps = 1e-6);

/// exp(-2 * sum_k |sin(theta_k) - sin(pi/3)|) over the interior angles of the center triangle.
double triangle_stability(Point a, Point b, Point c);
double triangle_stability_from_angles(const std::array<double, 3>& angles);

/// Scales raw non-negative terms to unit sum; uniform when every term is zero.
std::vector<double> normalize_unit_sum(std::span<const double> raw);

/// Index (0-based) of the ceil(|M|/2)-th nearest neighbour of f within the set.
std::size_t median_neighbor(const Vector& f, const MatchSet& set);

/// Saliency per person of one image, normalized to unit sum. Empty match sets take the
/// largest raw saliency among the non-empty sets of the same image.
std::vector<double> saliency(std::span<const Vector> person_features, std::span<const MatchSet> match_sets);

/// Raw purity sums for one image; empty sets contribute `empty_distance` per pair.
std::vector<double> purity_raw(std::span<const MatchSet> match_sets, double empty_distance);
/// Purity per person of one image, normalized to unit sum (1 for a single person).
std::vector<double> purity(std::span<const MatchSet> match_sets, double empty_distance);

/// Each order divided by its mean, so that every order averages 1 within the image.
ImportanceMap relative_to_order_mean(const ImportanceMap& weights);

/// Weights from per-person static and dynamic terms: fine = t1 + s + p, medium and coarse
/// from the member weights plus the subgroup stability.
ImportanceMap compose_weights(const GroupObservation& obs, std::span<const double> t1,
                              std::span<const double> s, std::span<const double> p,
                              const ImportanceConfig& cfg = {});

/// Weights before any matching: both dynamic terms set to 1.
ImportanceMap initial_weights(const GroupObservation& obs, const ImportanceConfig& cfg = {});

double medium_weight(double alpha_a, double alpha_b, double t2);
double coarse_weight(double alpha_ab, double alpha_bc, double alpha_ac, double t3);

}  // namespace greid
