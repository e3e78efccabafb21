#include "greid/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "greid/error.hpp"
#include "greid/transport.hpp"

namespace greid {

void ImportanceConfig::validate() const {
    if (k_density < 1 || !(ratio_floor > 0.0) || !(stability_eps > 0.0) || max_iter < 0 || !(tol >= 0.0)) {
        throw Error("invalid-config", "importance configuration out of range");
    }
}

ImportanceMap ImportanceMap::uniform(int n) {
    ImportanceMap m;
    m.fine.assign(static_cast<std::size_t>(n), 1.0);
    m.medium.assign(static_cast<std::size_t>(pair_count(n)), 1.0);
    m.coarse.assign(static_cast<std::size_t>(triple_count(n)), 1.0);
    return m;
}

double ImportanceMap::of(const GranularObject& object) const {
    const int n = size();
    const auto& m = object.members;
    switch (object.order) {
        case Granularity::fine: return fine.at(static_cast<std::size_t>(m.at(0)));
        case Granularity::medium: return medium.at(static_cast<std::size_t>(pair_rank(n, m.at(0), m.at(1))));
        case Granularity::coarse:
            return coarse.at(static_cast<std::size_t>(triple_rank(n, m.at(0), m.at(1), m.at(2))));
        case Granularity::global: return global;
    }
    return 0.0;
}

std::vector<double> local_density(const GroupObservation& obs, int k_density) {
    const int n = obs.size();
    if (n < 2) return std::vector<double>(static_cast<std::size_t>(n), 1.0);
    const int k = std::min(k_density, n - 1);
    std::vector<Point> c;
    for (const auto& b : obs.boxes) c.push_back(b.center());
    auto dist = [&](int a, int b) {
        return std::hypot(c[static_cast<std::size_t>(a)].x - c[static_cast<std::size_t>(b)].x,
                          c[static_cast<std::size_t>(a)].y - c[static_cast<std::size_t>(b)].y);
    };
    // neighbours[i] = the k nearest others, ties broken by index.
    std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(n));
    std::vector<double> k_distance(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<int> others;
        for (int j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        std::stable_sort(others.begin(), others.end(), [&](int a, int b) { return dist(i, a) < dist(i, b); });
        others.resize(static_cast<std::size_t>(k));
        k_distance[static_cast<std::size_t>(i)] = dist(i, others.back());
        neighbours[static_cast<std::size_t>(i)] = std::move(others);
    }
    std::vector<double> rho(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double reach = 0.0;
        for (int o : neighbours[static_cast<std::size_t>(i)]) reach += std::max(dist(i, o), k_distance[static_cast<std::size_t>(o)]);
        // Coincident neighbourhoods have unbounded density; cap it.
        rho[static_cast<std::size_t>(i)] = k / std::max(reach, 1e-12);
    }
    return rho;
}

std::vector<double> static_weight_fine(std::span<const double> densities, double ratio_floor) {
    const std::size_t n = densities.size();
    if (n == 1) return {1.0};
    std::vector<double> t1(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) t1[i] += densities[i] / std::max(densities[j], ratio_floor);
    return t1;
}

double pair_stability(const BoundingBox& a, const BoundingBox& b, ImageSize image_size, double eps) {
    const Point p = a.center(), q = b.center();
    const double diag = image_size.diagonal() > 0.0 ? image_size.diagonal() : 1.0;
    const double d = std::hypot(p.x - q.x, p.y - q.y) / diag;
    return std::min(1.0 / (d + eps), 1.0 / eps);
}

double triangle_stability_from_angles(const std::array<double, 3>& angles) {
    const double target = std::sin(std::numbers::pi / 3.0);
    double s = 0.0;
    for (double t : angles) s += std::abs(std::sin(t) - target);
    return std::exp(-2.0 * s);
}

double triangle_stability(Point a, Point b, Point c) {
    auto angle_at = [](Point o, Point u, Point v) {
        const double ux = u.x - o.x, uy = u.y - o.y, vx = v.x - o.x, vy = v.y - o.y;
        const double cosine = (ux * vx + uy * vy) / (std::hypot(ux, uy) * std::hypot(vx, vy));
        return std::acos(std::clamp(cosine, -1.0, 1.0));
    };
    const double ab = std::hypot(a.x - b.x, a.y - b.y);
    const double bc = std::hypot(b.x - c.x, b.y - c.y);
    const double ca = std::hypot(c.x - a.x, c.y - a.y);
    const double scale = std::max({ab, bc, ca});
    if (scale == 0.0 || std::min({ab, bc, ca}) <= 1e-12 * scale) {
        return triangle_stability_from_angles({0.0, 0.0, std::numbers::pi});
    }
    return triangle_stability_from_angles({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
}

std::vector<double> normalize_unit_sum(std::span<const double> raw) {
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = total > 0.0 ? raw[i] / total : 1.0 / static_cast<double>(raw.size());
    }
    return out;
}

std::size_t median_neighbor(const Vector& f, const MatchSet& set) {
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> d(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) d[k] = euclidean(f, set.features[k]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    const std::size_t rank = (set.size() + 1) / 2;  // ceil(|M|/2), 1-based
    return order[rank - 1];
}

std::vector<double> saliency(std::span<const Vector> person_features, std::span<const MatchSet> match_sets) {
    const std::size_t n = person_features.size();
    if (match_sets.size() != n) throw Error("invalid-argument", "one match set per person expected");
    std::vector<double> raw(n, 0.0);
    double max_raw = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        const MatchSet& m = match_sets[i];
        if (m.empty()) continue;
        const Vector& ref = m.features[median_neighbor(person_features[i], m)];
        raw[i] = euclidean(person_features[i], ref) / static_cast<double>(m.size());
        max_raw = any ? std::max(max_raw, raw[i]) : raw[i];
        any = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (match_sets[i].empty()) raw[i] = max_raw;
    return normalize_unit_sum(raw);
}

std::vector<double> purity_raw(std::span<const MatchSet> match_sets, double empty_distance) {
    const std::size_t n = match_sets.size();
    std::vector<double> raw(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = (match_sets[i].empty() || match_sets[j].empty())
                                 ? empty_distance
                                 : wasserstein1(match_sets[i].features, match_sets[j].features);
            raw[i] += w;
            raw[j] += w;
        }
    }
    return raw;
}

std::vector<double> purity(std::span<const MatchSet> match_sets, double empty_distance) {
    if (match_sets.size() == 1) return {1.0};
    return normalize_unit_sum(purity_raw(match_sets, empty_distance));
}

ImportanceMap relative_to_order_mean(const ImportanceMap& weights) {
    ImportanceMap out = weights;
    for (auto* v : {&out.fine, &out.medium, &out.coarse}) {
        if (v->empty()) continue;
        const double mean = std::accumulate(v->begin(), v->end(), 0.0) / static_cast<double>(v->size());
        if (mean > 0.0)
            for (double& x : *v) x /= mean;
    }
    return out;
}

double medium_weight(double alpha_a, double alpha_b, double t2) { return alpha_a + alpha_b + t2; }

double coarse_weight(double alpha_ab, double alpha_bc, double alpha_ac, double t3) {
    return alpha_ab + alpha_bc + alpha_ac + t3;
}

ImportanceMap compose_weights(const GroupObservation& obs, std::span<const double> t1,
                              std::span<const double> s, std::span<const double> p,
                              const ImportanceConfig& cfg) {
    const int n = obs.size();
    if (static_cast<int>(t1.size()) != n || static_cast<int>(s.size()) != n || static_cast<int>(p.size()) != n) {
        throw Error("invalid-argument", "weight components do not match the group size");
    }
    if (!cfg.enabled) return ImportanceMap::uniform(n);
    ImportanceMap w;
    w.fine.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < w.fine.size(); ++i) w.fine[i] = t1[i] + s[i] + p[i];
    for (const auto& pr : all_pairs(n)) {
        const auto a = static_cast<std::size_t>(pr[0]), b = static_cast<std::size_t>(pr[1]);
        w.medium.push_back(medium_weight(w.fine[a], w.fine[b],
                                         pair_stability(obs.boxes[a], obs.boxes[b], obs.image_size, cfg.stability_eps)));
    }
    for (const auto& tr : all_triples(n)) {
        const auto a = static_cast<std::size_t>(tr[0]), b = static_cast<std::size_t>(tr[1]),
                   c = static_cast<std::size_t>(tr[2]);
        const double t3 = triangle_stability(obs.boxes[a].center(), obs.boxes[b].center(), obs.boxes[c].center());
        w.coarse.push_back(coarse_weight(w.medium[static_cast<std::size_t>(pair_rank(n, tr[0], tr[1]))],
                                         w.medium[static_cast<std::size_t>(pair_rank(n, tr[1], tr[2]))],
                                         w.medium[static_cast<std::size_t>(pair_rank(n, tr[0], tr[2]))], t3));
    }
    return w;
}

ImportanceMap initial_weights(const GroupObservation& obs, const ImportanceConfig& cfg) {
    const auto t1 = static_weight_fine(local_density(obs, cfg.k_density), cfg.ratio_floor);
    const std::vector<double> ones(t1.size(), 1.0);
    return compose_weights(obs, t1, ones, ones, cfg);
}

}  // namespace greid
