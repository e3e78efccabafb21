#include "greid/core.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "greid/error.hpp"

namespace greid {

double ImageSize::diagonal() const {
    return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

void GroupObservation::validate() const {
    if (boxes.empty()) {
        throw Error("invalid-observation", "image '" + image_id + "' has no boxes");
    }
    const bool has_size = image_size.width > 0 && image_size.height > 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const BoundingBox& b = boxes[i];
        const std::string where = "image '" + image_id + "' box " + std::to_string(i);
        if (!std::isfinite(b.x) || !std::isfinite(b.y) || !(b.w > 0.0) || !(b.h > 0.0)) {
            throw Error("invalid-observation", where + " has non-positive extent");
        }
        if (has_size && (b.x < 0.0 || b.y < 0.0 || b.x + b.w > image_size.width ||
                         b.y + b.h > image_size.height)) {
            throw Error("invalid-observation", where + " lies outside the image");
        }
    }
}

const char* to_string(Granularity g) {
    switch (g) {
        case Granularity::fine: return "fine";
        case Granularity::medium: return "medium";
        case Granularity::coarse: return "coarse";
        case Granularity::global: return "global";
    }
    return "?";
}

std::vector<GranularObject> enumerate_granular_objects(const GroupObservation& obs) {
    const int n = obs.size();
    std::vector<GranularObject> out;
    out.reserve(granular_object_count(n));
    for (int i = 0; i < n; ++i) {
        out.push_back({Granularity::fine, {i}, false});
    }
    for (const auto& p : all_pairs(n)) {
        out.push_back({Granularity::medium, {p[0], p[1]}, n == 2});
    }
    for (const auto& t : all_triples(n)) {
        out.push_back({Granularity::coarse, {t[0], t[1], t[2]}, false});
    }
    GranularObject global{Granularity::global, {}, false};
    global.members.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) global.members[static_cast<std::size_t>(i)] = i;
    out.push_back(std::move(global));
    return out;
}

std::size_t granular_object_count(int n) {
    return static_cast<std::size_t>(n + pair_count(n) + triple_count(n) + 1);
}

int pair_count(int n) { return n < 2 ? 0 : n * (n - 1) / 2; }

int triple_count(int n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

int pair_rank(int n, int a, int b) {
    if (a > b) std::swap(a, b);
    assert(a >= 0 && a < b && b < n);
    return a * (2 * n - a - 1) / 2 + (b - a - 1);
}

int triple_rank(int n, int a, int b, int c) {
    std::array<int, 3> s{a, b, c};
    std::sort(s.begin(), s.end());
    assert(s[0] >= 0 && s[0] < s[1] && s[1] < s[2] && s[2] < n);
    int rank = 0;
    for (int x = 0; x < s[0]; ++x) rank += pair_count(n - 1 - x);
    for (int y = s[0] + 1; y < s[1]; ++y) rank += n - 1 - y;
    return rank + (s[2] - s[1] - 1);
}

std::vector<std::array<int, 2>> all_pairs(int n) {
    std::vector<std::array<int, 2>> out;
    out.reserve(static_cast<std::size_t>(pair_count(n)));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) out.push_back({a, b});
    return out;
}

std::vector<std::array<int, 3>> all_triples(int n) {
    std::vector<std::array<int, 3>> out;
    out.reserve(static_cast<std::size_t>(triple_count(n)));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) out.push_back({a, b, c});
    return out;
}

std::size_t FeatureBundle::appearance_dim() const {
    return person_appearance.empty() ? 0 : person_appearance.front().size();
}

std::size_t FeatureBundle::spatial_dim() const {
    return edge_spatial.empty() ? 0 : edge_spatial.front().size();
}

namespace {

void check_vector(const Vector& v, std::size_t dim, const char* what) {
    if (v.size() != dim) {
        throw Error("invalid-features", std::string(what) + " has dimension " +
                                            std::to_string(v.size()) + ", expected " +
                                            std::to_string(dim));
    }
    for (double x : v) {
        if (!std::isfinite(x)) throw Error("invalid-features", std::string(what) + " is not finite");
    }
}

}  // namespace

void FeatureBundle::validate() const {
    const int n = size();
    if (n == 0) throw Error("invalid-features", "bundle has no persons");
    const std::size_t da = appearance_dim();
    for (const auto& v : person_appearance) check_vector(v, da, "person appearance");
    check_vector(global_appearance, da, "global appearance");
    if (static_cast<int>(edge_spatial.size()) != pair_count(n) ||
        static_cast<int>(pairs.size()) != pair_count(n) ||
        static_cast<int>(triples.size()) != triple_count(n)) {
        throw Error("invalid-features", "subgroup feature count does not match group size");
    }
    const std::size_t ds = spatial_dim();
    for (const auto& v : edge_spatial) check_vector(v, ds, "edge spatial");
    for (const auto& s : pairs) {
        check_vector(s.appearance, da, "pair appearance");
        check_vector(s.spatial, ds, "pair spatial");
    }
    for (const auto& s : triples) {
        check_vector(s.appearance, da, "triple appearance");
        check_vector(s.spatial, ds, "triple spatial");
    }
}

bool Mapping::is_one_to_one() const {
    for (std::size_t a = 0; a < pairs.size(); ++a) {
        for (std::size_t b = a + 1; b < pairs.size(); ++b) {
            if (pairs[a].probe_person == pairs[b].probe_person ||
                pairs[a].gallery_person == pairs[b].gallery_person) {
                return false;
            }
        }
    }
    return true;
}

std::optional<int> Mapping::gallery_of(int probe_person) const {
    for (const auto& c : pairs)
        if (c.probe_person == probe_person) return c.gallery_person;
    return std::nullopt;
}

std::optional<int> Mapping::probe_of(int gallery_person) const {
    for (const auto& c : pairs)
        if (c.gallery_person == gallery_person) return c.probe_person;
    return std::nullopt;
}

double squared_euclidean(const Vector& a, const Vector& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double euclidean(const Vector& a, const Vector& b) { return std::sqrt(squared_euclidean(a, b)); }

}  // namespace greid
