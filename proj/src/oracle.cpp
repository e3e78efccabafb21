#include "greid/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>

#include "greid/error.hpp"

namespace greid::oracle {

namespace {

double dist2(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

double psi(double a, double b) { return (a + b) / (1.0 + std::fabs(a - b)); }

// Unordered subsets stored as sorted member lists; index = position in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int v = start; v < n; ++v) {
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

int index_of(const std::vector<std::vector<int>>& sets, std::vector<int> members) {
    std::sort(members.begin(), members.end());
    const auto it = std::lower_bound(sets.begin(), sets.end(), members);
    return static_cast<int>(it - sets.begin());
}

// Every score family over the unpruned graph.
struct Scores {
    int np = 0, ng = 0;
    std::vector<double> first;                       // np x ng, normalized
    std::vector<std::vector<int>> pp, gp, pt, gt;    // subsets
    std::vector<double> second;                      // |pp| x |gp|, normalized per hyperedge
    std::vector<double> third;                       // |pt| x |gt|, normalized per hyperedge
    double global = 0.0;

    double pair_score(int i1, int i2, int j1, int j2) const {
        if (second.empty()) return 0.0;
        return second[static_cast<std::size_t>(index_of(pp, {i1, i2})) * gp.size() +
                      static_cast<std::size_t>(index_of(gp, {j1, j2}))];
    }
    double triple_score(int i1, int i2, int i3, int j1, int j2, int j3) const {
        if (third.empty()) return 0.0;
        return third[static_cast<std::size_t>(index_of(pt, {i1, i2, i3})) * gt.size() +
                     static_cast<std::size_t>(index_of(gt, {j1, j2, j3}))];
    }
};

Scores compute_scores(const GroupView& probe, const GroupView& gallery, const MatchConfig& cfg) {
    Scores s;
    s.np = probe.obs.size();
    s.ng = gallery.obs.size();
    const double eps = cfg.solver.eps_dist;
    const FeatureBundle& pf = probe.features;
    const FeatureBundle& gf = gallery.features;
    auto scaled = [&](const std::vector<double>& w) {
        std::vector<double> out = w;
        if (!cfg.relative_importance || w.empty()) return out;
        double mean = 0.0;
        for (double x : w) mean += x / static_cast<double>(w.size());
        if (mean > 0.0)
            for (double& x : out) x /= mean;
        return out;
    };
    const std::vector<double> p1 = scaled(probe.weights.fine), g1 = scaled(gallery.weights.fine);
    const std::vector<double> p2 = scaled(probe.weights.medium), g2 = scaled(gallery.weights.medium);
    const std::vector<double> p3 = scaled(probe.weights.coarse), g3 = scaled(gallery.weights.coarse);

    if (cfg.use_order[0]) {
        double total = 0.0;
        for (int i = 0; i < s.np; ++i) {
            for (int j = 0; j < s.ng; ++j) {
                const double r = psi(p1[static_cast<std::size_t>(i)],
                                     g1[static_cast<std::size_t>(j)]) /
                                 std::max(std::sqrt(dist2(pf.person_appearance[static_cast<std::size_t>(i)],
                                                          gf.person_appearance[static_cast<std::size_t>(j)])),
                                          eps);
                s.first.push_back(r);
                total += r;
            }
        }
        for (double& v : s.first) v = total > 0.0 ? v / total : 0.0;
    } else {
        s.first.assign(static_cast<std::size_t>(s.np * s.ng), 0.0);
    }

    // Each unordered subgroup pair stands for 2 (pairs) or 6 (triples) hyperedges of equal score.
    auto family = [&](int k, const std::vector<SubgroupFeature>& pfeat, const std::vector<SubgroupFeature>& gfeat,
                      const std::vector<double>& pw, const std::vector<double>& gw, std::vector<std::vector<int>>& ps,
                      std::vector<std::vector<int>>& gs, std::vector<double>& out, double multiplicity) {
        ps = subsets(s.np, k);
        gs = subsets(s.ng, k);
        double total = 0.0;
        for (std::size_t a = 0; a < ps.size(); ++a) {
            for (std::size_t b = 0; b < gs.size(); ++b) {
                const double d = std::sqrt(dist2(pfeat[a].appearance, gfeat[b].appearance) +
                                           dist2(pfeat[a].spatial, gfeat[b].spatial));
                const double r = psi(pw[a], gw[b]) / std::max(d, eps);
                out.push_back(r);
                total += multiplicity * r;
            }
        }
        for (double& v : out) v = total > 0.0 ? v / total : 0.0;
    };
    if (cfg.use_order[1] && s.np >= 2 && s.ng >= 2)
        family(2, pf.pairs, gf.pairs, p2, g2, s.pp, s.gp, s.second, 2.0);
    if (cfg.use_order[2] && s.np >= 3 && s.ng >= 3)
        family(3, pf.triples, gf.triples, p3, g3, s.pt, s.gt, s.third, 6.0);
    if (cfg.use_order[3])
        s.global = 1.0 / std::max(std::sqrt(dist2(pf.global_appearance, gf.global_appearance)), eps);
    return s;
}

double objective_from_scores(const Scores& s, const std::vector<std::pair<int, int>>& m, const MatchConfig& cfg) {
    double q = 0.0;
    const auto& w = cfg.order_weight;
    for (const auto& [i, j] : m) q += w[0] * s.first[static_cast<std::size_t>(i * s.ng + j)];
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
            q += w[1] * s.pair_score(m[a].first, m[b].first, m[a].second, m[b].second);
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
            for (std::size_t c = b + 1; c < m.size(); ++c)
                q += w[2] * s.triple_score(m[a].first, m[b].first, m[c].first, m[a].second, m[b].second, m[c].second);
    if (!m.empty() && cfg.use_order[3]) q += w[3] * s.global;

    if (!cfg.inter_order) return q;
    for (const auto& [i, j] : m) {
        // Accumulated score of each order over the hyperedges containing (i, j).
        std::array<double, 4> acc{s.first[static_cast<std::size_t>(i * s.ng + j)], 0.0, 0.0, 0.0};
        for (int i2 = 0; i2 < s.np; ++i2)
            for (int j2 = 0; j2 < s.ng; ++j2)
                if (i2 != i && j2 != j) acc[1] += s.pair_score(i, i2, j, j2) / 2.0;
        for (int i2 = 0; i2 < s.np; ++i2)
            for (int i3 = i2 + 1; i3 < s.np; ++i3)
                for (int j2 = 0; j2 < s.ng; ++j2)
                    for (int j3 = 0; j3 < s.ng; ++j3)
                        if (i2 != i && i3 != i && j2 != j && j3 != j && j2 != j3)
                            acc[2] += s.triple_score(i, i2, i3, j, j2, j3) / 3.0;
        if (cfg.use_order[3]) acc[3] = 1.0 / static_cast<double>(s.np * s.ng);
        for (int r = 0; r < 4; ++r)
            for (int l = r + 1; l < 4; ++l)
                if (cfg.use_order[static_cast<std::size_t>(r)] && cfg.use_order[static_cast<std::size_t>(l)])
                    q += psi(acc[static_cast<std::size_t>(r)], acc[static_cast<std::size_t>(l)]);
    }
    return q;
}

std::vector<std::pair<int, int>> pairs_of(const Mapping& mapping) {
    std::vector<std::pair<int, int>> m;
    for (const auto& c : mapping.pairs) m.emplace_back(c.probe_person, c.gallery_person);
    std::sort(m.begin(), m.end());
    return m;
}

}  // namespace

double mapping_objective(const Mapping& mapping, const GroupView& probe, const GroupView& gallery,
                         const MatchConfig& cfg) {
    return objective_from_scores(compute_scores(probe, gallery, cfg), pairs_of(mapping), cfg);
}

BruteForceResult brute_force_mapping(const GroupView& probe, const GroupView& gallery, const MatchConfig& cfg) {
    const int np = probe.obs.size(), ng = gallery.obs.size();
    if (std::min(np, ng) > 6) throw Error("instance-too-large", "brute force needs min(N_p, N_g) <= 6");
    const Scores s = compute_scores(probe, gallery, cfg);

    // Injections of the smaller side into the larger, in lexicographic order of the pair list.
    const bool probe_small = np <= ng;
    const int small = std::min(np, ng), large = std::max(np, ng);
    std::vector<int> image(static_cast<std::size_t>(small));
    std::vector<char> used(static_cast<std::size_t>(large), 0);
    BruteForceResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> best_pairs;

    std::function<void(int)> rec = [&](int k) {
        if (k == small) {
            std::vector<std::pair<int, int>> m;
            for (int a = 0; a < small; ++a) {
                const int b = image[static_cast<std::size_t>(a)];
                m.emplace_back(probe_small ? a : b, probe_small ? b : a);
            }
            std::sort(m.begin(), m.end());
            const double q = objective_from_scores(s, m, cfg);
            const bool first = best_pairs.empty();
            const double tol = first ? 0.0 : 1e-12 * std::max(1.0, std::fabs(best.objective));
            if (first || q > best.objective + tol || (q >= best.objective - tol && m < best_pairs)) {
                best.objective = q;
                best_pairs = std::move(m);
            }
            return;
        }
        for (int b = 0; b < large; ++b) {
            if (used[static_cast<std::size_t>(b)]) continue;
            used[static_cast<std::size_t>(b)] = 1;
            image[static_cast<std::size_t>(k)] = b;
            rec(k + 1);
            used[static_cast<std::size_t>(b)] = 0;
        }
    };
    rec(0);
    for (const auto& [i, j] : best_pairs) best.mapping.pairs.push_back({i, j});
    return best;
}

double exhaustive_wasserstein(std::span<const Vector> a, std::span<const Vector> b) {
    const int m = static_cast<int>(a.size()), n = static_cast<int>(b.size());
    if (m == 0 || n == 0) throw Error("invalid-argument", "transport between empty sets");
    if (m > 4 || n > 4) throw Error("instance-too-large", "exhaustive transport needs sets of at most 4");
    std::vector<double> cost(static_cast<std::size_t>(m * n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<std::size_t>(i * n + j)] =
                std::sqrt(dist2(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]));

    if (m == n) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double c = 0.0;
            for (int i = 0; i < m; ++i) c += cost[static_cast<std::size_t>(i * n + perm[static_cast<std::size_t>(i)])];
            best = std::min(best, c / m);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    // Vertices of the transportation polytope are supported on spanning trees of K_{m,n}.
    // Integer masses: each A point supplies L/m and each B point demands L/n, L = lcm(m, n).
    const long long L = std::lcm(m, n);
    const int edges = m * n, need = m + n - 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << edges); ++mask) {
        if (std::popcount(mask) != need) continue;
        std::vector<long long> supply(static_cast<std::size_t>(m), L / m), demand(static_cast<std::size_t>(n), L / n);
        std::vector<long long> flow(static_cast<std::size_t>(edges), 0);
        std::uint32_t open = mask;
        bool ok = true;
        // Peel leaves: a row or column with a single open edge fixes that edge's flow.
        while (open && ok) {
            bool progressed = false;
            for (int v = 0; v < m + n && !progressed; ++v) {
                int count = 0, last = -1;
                for (int e = 0; e < edges; ++e) {
                    if (!(open >> e & 1u)) continue;
                    if ((v < m && e / n == v) || (v >= m && e % n == v - m)) {
                        ++count;
                        last = e;
                    }
                }
                if (count != 1) continue;
                const int i = last / n, j = last % n;
                const long long f = v < m ? supply[static_cast<std::size_t>(i)] : demand[static_cast<std::size_t>(j)];
                flow[static_cast<std::size_t>(last)] = f;
                supply[static_cast<std::size_t>(i)] -= f;
                demand[static_cast<std::size_t>(j)] -= f;
                open &= ~(1u << last);
                progressed = true;
            }
            if (!progressed) ok = false;  // a cycle: not a tree
        }
        if (!ok) continue;
        if (std::any_of(flow.begin(), flow.end(), [](long long f) { return f < 0; })) continue;
        if (std::any_of(supply.begin(), supply.end(), [](long long s) { return s != 0; }) ||
            std::any_of(demand.begin(), demand.end(), [](long long d) { return d != 0; }))
            continue;
        double c = 0.0;
        for (int e = 0; e < edges; ++e) c += static_cast<double>(flow[static_cast<std::size_t>(e)]) * cost[static_cast<std::size_t>(e)];
        best = std::min(best, c / static_cast<double>(L));
    }
    return best;
}

}  // namespace greid::oracle
