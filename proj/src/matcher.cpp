#include "greid/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "greid/assignment.hpp"
#include "greid/error.hpp"

namespace greid {

void SolverConfig::validate() const {
    if (prune_k < 1 || !(jump_prob >= 0.0 && jump_prob <= 1.0) || max_rw_iters < 0 || !(rw_tol >= 0.0) ||
        !(eps_dist > 0.0) || sinkhorn_iters < 1 || !(inflation >= 0.0)) {
        throw Error("invalid-config", "solver configuration out of range");
    }
}

void MatchConfig::validate() const {
    solver.validate();
    if (!(lambda_r >= 0.0)) throw Error("invalid-config", "lambda_r must be non-negative");
    for (double w : order_weight)
        if (!(w >= 0.0)) throw Error("invalid-config", "order weights must be non-negative");
}

double fused_pair_weight(double a, double b) { return (a + b) / (1.0 + std::abs(a - b)); }

double inter_order_correlation(double m_r, double m_l) { return (m_r + m_l) / (1.0 + std::abs(m_r - m_l)); }

double AssociationGraph::inter_order_total(int candidate) const {
    const auto& v = inter_order[static_cast<std::size_t>(candidate)];
    return std::accumulate(v.begin(), v.end(), 0.0);
}

double AssociationGraph::node_potential(int candidate) const {
    const auto c = static_cast<std::size_t>(candidate);
    double u = order_weight[kFirst] * unary[c] + inter_order_total(candidate);
    if (use_order[kGlobal]) {
        // Global score shared evenly by the candidates of a full mapping.
        u += order_weight[kGlobal] * global_affinity / std::min(n_probe, n_gallery);
    }
    return u;
}

double raw_order_score(const GroupView& probe, std::span<const int> probe_members, const GroupView& gallery,
                       std::span<const int> gallery_members, double eps_dist) {
    const int np = probe.obs.size(), ng = gallery.obs.size();
    const FeatureBundle& pf = probe.features;
    const FeatureBundle& gf = gallery.features;
    double d2 = 0.0, ap = 0.0, ag = 0.0;
    switch (probe_members.size()) {
        case 1: {
            const auto i = static_cast<std::size_t>(probe_members[0]);
            const auto j = static_cast<std::size_t>(gallery_members[0]);
            d2 = squared_euclidean(pf.person_appearance[i], gf.person_appearance[j]);
            ap = probe.weights.fine[i];
            ag = gallery.weights.fine[j];
            break;
        }
        case 2: {
            const auto p = static_cast<std::size_t>(pair_rank(np, probe_members[0], probe_members[1]));
            const auto g = static_cast<std::size_t>(pair_rank(ng, gallery_members[0], gallery_members[1]));
            d2 = squared_euclidean(pf.pairs[p].appearance, gf.pairs[g].appearance) +
                 squared_euclidean(pf.pairs[p].spatial, gf.pairs[g].spatial);
            ap = probe.weights.medium[p];
            ag = gallery.weights.medium[g];
            break;
        }
        case 3: {
            const auto p = static_cast<std::size_t>(
                triple_rank(np, probe_members[0], probe_members[1], probe_members[2]));
            const auto g = static_cast<std::size_t>(
                triple_rank(ng, gallery_members[0], gallery_members[1], gallery_members[2]));
            d2 = squared_euclidean(pf.triples[p].appearance, gf.triples[g].appearance) +
                 squared_euclidean(pf.triples[p].spatial, gf.triples[g].spatial);
            ap = probe.weights.coarse[p];
            ag = gallery.weights.coarse[g];
            break;
        }
        default: throw Error("invalid-argument", "order score needs 1 to 3 members");
    }
    return fused_pair_weight(ap, ag) / std::max(std::sqrt(d2), eps_dist);
}

double global_score(const FeatureBundle& probe, const FeatureBundle& gallery, double eps_dist) {
    return 1.0 / std::max(euclidean(probe.global_appearance, gallery.global_appearance), eps_dist);
}

namespace {

double scale_to_unit_sum(std::span<double> values) {
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    const double lambda = total > 0.0 ? 1.0 / total : 0.0;
    for (double& v : values) v *= lambda;
    return lambda;
}

constexpr std::array<std::array<int, 3>, 6> kPermutations3{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

}  // namespace

AssociationGraph build_association_graph(const GroupView& probe, const GroupView& gallery, const MatchConfig& cfg) {
    const int np = probe.obs.size(), ng = gallery.obs.size();
    if (np == 0 || ng == 0) throw Error("invalid-argument", "cannot match an empty group");
    const double eps = cfg.solver.eps_dist;
    AssociationGraph g;
    g.n_probe = np;
    g.n_gallery = ng;
    g.use_order = cfg.use_order;
    g.order_weight = cfg.order_weight;
    g.cell.assign(static_cast<std::size_t>(np * ng), -1);

    // Candidates: everything for small pairs, otherwise the prune_k nearest gallery persons.
    const bool prune = cfg.prune && np * ng > cfg.solver.unpruned_limit;
    std::vector<char> keep(static_cast<std::size_t>(np * ng), prune ? 0 : 1);
    if (prune) {
        for (int i = 0; i < np; ++i) {
            std::vector<int> order(static_cast<std::size_t>(ng));
            std::iota(order.begin(), order.end(), 0);
            std::vector<double> d(static_cast<std::size_t>(ng));
            for (int j = 0; j < ng; ++j) {
                d[static_cast<std::size_t>(j)] = squared_euclidean(
                    probe.features.person_appearance[static_cast<std::size_t>(i)],
                    gallery.features.person_appearance[static_cast<std::size_t>(j)]);
            }
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return d[static_cast<std::size_t>(a)] < d[static_cast<std::size_t>(b)]; });
            for (int r = 0; r < std::min(cfg.solver.prune_k, ng); ++r)
                keep[static_cast<std::size_t>(i * ng + order[static_cast<std::size_t>(r)])] = 1;
        }
    }
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < ng; ++j) {
            if (!keep[static_cast<std::size_t>(i * ng + j)]) continue;
            g.cell[static_cast<std::size_t>(i * ng + j)] = static_cast<int>(g.candidates.size());
            g.candidates.push_back({i, j});
        }
    }
    const std::size_t n = g.candidates.size();

    g.unary.assign(n, 0.0);
    if (cfg.use_order[kFirst]) {
        for (std::size_t c = 0; c < n; ++c) {
            const int i = g.candidates[c].probe_person, j = g.candidates[c].gallery_person;
            g.unary[c] = raw_order_score(probe, std::span(&i, 1), gallery, std::span(&j, 1), eps);
        }
        g.lambda[kFirst] = scale_to_unit_sum(g.unary);
    }

    if (cfg.use_order[kSecond] && np >= 2 && ng >= 2) {
        std::vector<double> scores;
        for (const auto& pp : all_pairs(np)) {
            for (const auto& gp : all_pairs(ng)) {
                const std::array<std::array<int, 2>, 2> links{{{gp[0], gp[1]}, {gp[1], gp[0]}}};
                double raw = -1.0;
                for (const auto& link : links) {
                    const int a = g.candidate_at(pp[0], link[0]);
                    const int b = g.candidate_at(pp[1], link[1]);
                    if (a < 0 || b < 0) continue;
                    if (raw < 0.0) raw = raw_order_score(probe, pp, gallery, gp, eps);
                    g.pair_edges.push_back({{a, b}, raw});
                    scores.push_back(raw);
                }
            }
        }
        g.lambda[kSecond] = scale_to_unit_sum(scores);
        for (std::size_t e = 0; e < scores.size(); ++e) g.pair_edges[e].score = scores[e];
    }

    if (cfg.use_order[kThird] && np >= 3 && ng >= 3) {
        std::vector<double> scores;
        for (const auto& pt : all_triples(np)) {
            for (const auto& gt : all_triples(ng)) {
                double raw = -1.0;
                for (const auto& perm : kPermutations3) {
                    std::array<int, 3> nodes{};
                    bool ok = true;
                    for (int k = 0; k < 3 && ok; ++k) {
                        nodes[static_cast<std::size_t>(k)] =
                            g.candidate_at(pt[static_cast<std::size_t>(k)], gt[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])]);
                        ok = nodes[static_cast<std::size_t>(k)] >= 0;
                    }
                    if (!ok) continue;
                    if (raw < 0.0) raw = raw_order_score(probe, pt, gallery, gt, eps);
                    g.triple_edges.push_back({nodes, raw});
                    scores.push_back(raw);
                }
            }
        }
        g.lambda[kThird] = scale_to_unit_sum(scores);
        for (std::size_t e = 0; e < scores.size(); ++e) g.triple_edges[e].score = scores[e];
    }

    if (cfg.use_order[kGlobal]) g.global_affinity = global_score(probe.features, gallery.features, eps);

    // Accumulated per-order scores of each candidate, normalized to unit sum over candidates.
    g.marginals.assign(n, {0.0, 0.0, 0.0, 0.0});
    for (std::size_t c = 0; c < n; ++c) g.marginals[c][kFirst] = g.unary[c];
    for (const auto& e : g.pair_edges)
        for (int v : e.nodes) g.marginals[static_cast<std::size_t>(v)][kSecond] += e.score / 2.0;
    for (const auto& e : g.triple_edges)
        for (int v : e.nodes) g.marginals[static_cast<std::size_t>(v)][kThird] += e.score / 3.0;
    if (cfg.use_order[kGlobal] && n > 0)
        for (auto& m : g.marginals) m[kGlobal] = 1.0 / static_cast<double>(n);

    g.inter_order.assign(n, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    if (cfg.inter_order) {
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t k = 0; k < kOrderPairs.size(); ++k) {
                const int r = kOrderPairs[k][0], l = kOrderPairs[k][1];
                if (!cfg.use_order[static_cast<std::size_t>(r)] || !cfg.use_order[static_cast<std::size_t>(l)]) continue;
                g.inter_order[c][k] = inter_order_correlation(g.marginals[c][static_cast<std::size_t>(r)],
                                                              g.marginals[c][static_cast<std::size_t>(l)]);
            }
        }
    }
    return g;
}

namespace {

// Alternating row/column scaling of the probe x gallery matrix. The longer side is only
// scaled down, so rectangular problems end with unit sums on the shorter side.
void soft_assignment(std::vector<double>& m, int rows, int cols, int iterations) {
    const bool rows_full = rows <= cols;
    const bool cols_full = cols <= rows;
    for (int it = 0; it < iterations; ++it) {
        double change = 0.0;
        for (int r = 0; r < rows; ++r) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c) s += m[static_cast<std::size_t>(r * cols + c)];
            if (s <= 0.0 || (!rows_full && s <= 1.0)) continue;
            change = std::max(change, std::abs(s - 1.0));
            for (int c = 0; c < cols; ++c) m[static_cast<std::size_t>(r * cols + c)] /= s;
        }
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int r = 0; r < rows; ++r) s += m[static_cast<std::size_t>(r * cols + c)];
            if (s <= 0.0 || (!cols_full && s <= 1.0)) continue;
            change = std::max(change, std::abs(s - 1.0));
            for (int r = 0; r < rows; ++r) m[static_cast<std::size_t>(r * cols + c)] /= s;
        }
        if (change < 1e-9) break;
    }
}

bool normalize(std::vector<double>& v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(total > 0.0)) return false;
    for (double& x : v) x /= total;
    return true;
}

}  // namespace

RandomWalkResult solve_rrw(const AssociationGraph& graph, const SolverConfig& cfg) {
    const std::size_t n = graph.candidates.size();
    RandomWalkResult res;
    if (n == 0) return res;
    res.x.assign(n, 1.0 / static_cast<double>(n));
    if (n == 1) {
        res.converged = true;
        return res;
    }

    // Per-candidate potentials, shifted so the smallest is zero. A uniform offset (such as
    // the global score) scores every full mapping equally and would only slow the walk.
    std::vector<double> node(n);
    for (std::size_t c = 0; c < n; ++c) node[c] = graph.node_potential(static_cast<int>(c));
    const double floor = *std::min_element(node.begin(), node.end());
    for (double& u : node) u -= floor;
    const double w2 = graph.order_weight[kSecond], w3 = graph.order_weight[kThird];
    bool any_affinity = std::any_of(node.begin(), node.end(), [](double u) { return u > 0.0; });
    for (const auto& e : graph.pair_edges) any_affinity = any_affinity || (w2 * e.score > 0.0);
    for (const auto& e : graph.triple_edges) any_affinity = any_affinity || (w3 * e.score > 0.0);
    if (!any_affinity) {
        res.degenerate = true;
        return res;
    }

    // Walk on x scaled to the mapping size, so each term approximates its share of the
    // objective when x is close to an assignment indicator.
    const double scale = std::min(graph.n_probe, graph.n_gallery);
    const std::size_t cells = static_cast<std::size_t>(graph.n_probe * graph.n_gallery);
    std::vector<double> y(n), soft(cells), xs(n);
    for (int it = 1; it <= cfg.max_rw_iters; ++it) {
        for (std::size_t c = 0; c < n; ++c) xs[c] = scale * res.x[c];
        for (std::size_t c = 0; c < n; ++c) y[c] = node[c];
        for (const auto& e : graph.pair_edges) {
            const double s = w2 * e.score;
            const auto a = static_cast<std::size_t>(e.nodes[0]), b = static_cast<std::size_t>(e.nodes[1]);
            y[a] += s * xs[b];
            y[b] += s * xs[a];
        }
        for (const auto& e : graph.triple_edges) {
            const double s = w3 * e.score;
            const auto a = static_cast<std::size_t>(e.nodes[0]), b = static_cast<std::size_t>(e.nodes[1]),
                       c = static_cast<std::size_t>(e.nodes[2]);
            y[a] += s * xs[b] * xs[c];
            y[b] += s * xs[a] * xs[c];
            y[c] += s * xs[a] * xs[b];
        }
        if (!normalize(y)) {
            res.degenerate = true;
            res.x.assign(n, 1.0 / static_cast<double>(n));
            return res;
        }

        std::fill(soft.begin(), soft.end(), 0.0);
        const double peak = *std::max_element(y.begin(), y.end());
        for (std::size_t c = 0; c < n; ++c) {
            const auto& cand = graph.candidates[c];
            soft[static_cast<std::size_t>(cand.probe_person * graph.n_gallery + cand.gallery_person)] =
                cfg.inflation > 0.0 ? std::exp(cfg.inflation * y[c] / peak) : y[c];
        }
        soft_assignment(soft, graph.n_probe, graph.n_gallery, cfg.sinkhorn_iters);
        std::vector<double> z(n);
        for (std::size_t c = 0; c < n; ++c) {
            const auto& cand = graph.candidates[c];
            z[c] = soft[static_cast<std::size_t>(cand.probe_person * graph.n_gallery + cand.gallery_person)];
        }
        normalize(z);

        double diff = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double next = (1.0 - cfg.jump_prob) * y[c] + cfg.jump_prob * z[c];
            diff = std::max(diff, std::abs(next - res.x[c]));
            res.x[c] = next;
        }
        normalize(res.x);
        res.iterations = it;
        if (diff < cfg.rw_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

Mapping extract_mapping(std::span<const double> x, const AssociationGraph& graph) {
    const int np = graph.n_probe, ng = graph.n_gallery;
    std::vector<double> score(static_cast<std::size_t>(np * ng), -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < graph.candidates.size(); ++c) {
        const auto& cand = graph.candidates[c];
        score[static_cast<std::size_t>(cand.probe_person * ng + cand.gallery_person)] = x[c];
    }
    const std::vector<int> assign =
        std::min(np, ng) <= 4 ? assign_exhaustive(score, np, ng) : assign_hungarian(score, np, ng);
    Mapping m;
    for (int i = 0; i < np; ++i)
        if (assign[static_cast<std::size_t>(i)] >= 0) m.pairs.push_back({i, assign[static_cast<std::size_t>(i)]});
    return m;
}

ObjectiveBreakdown objective_terms(const Mapping& mapping, const AssociationGraph& graph) {
    ObjectiveBreakdown q;
    std::vector<char> in(graph.candidates.size(), 0);
    for (const auto& p : mapping.pairs) {
        const int c = graph.candidate_at(p.probe_person, p.gallery_person);
        if (c < 0) continue;
        in[static_cast<std::size_t>(c)] = 1;
        q.first += graph.order_weight[kFirst] * graph.unary[static_cast<std::size_t>(c)];
        q.inter += graph.inter_order_total(c);
    }
    for (const auto& e : graph.pair_edges)
        if (in[static_cast<std::size_t>(e.nodes[0])] && in[static_cast<std::size_t>(e.nodes[1])])
            q.second += graph.order_weight[kSecond] * e.score;
    for (const auto& e : graph.triple_edges)
        if (in[static_cast<std::size_t>(e.nodes[0])] && in[static_cast<std::size_t>(e.nodes[1])] &&
            in[static_cast<std::size_t>(e.nodes[2])])
            q.third += graph.order_weight[kThird] * e.score;
    if (!mapping.pairs.empty() && graph.use_order[kGlobal]) {
        q.global = graph.order_weight[kGlobal] * graph.global_affinity;
    }
    return q;
}

double objective_value(const Mapping& mapping, const AssociationGraph& graph) {
    return objective_terms(mapping, graph).total();
}

namespace {

bool order_enabled(const std::array<bool, 4>& use, Granularity g) {
    switch (g) {
        case Granularity::fine: return use[kFirst];
        case Granularity::medium: return use[kSecond];
        case Granularity::coarse: return use[kThird];
        case Granularity::global: return use[kGlobal];
    }
    return false;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Divisor turning an object's weight into its share of the order's total within the image.
std::array<double, 5> order_totals(const GroupView& v, bool share) {
    std::array<double, 5> t{1.0, 1.0, 1.0, 1.0, 1.0};
    if (!share) return t;
    const auto sum = [](const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); };
    t[static_cast<int>(Granularity::fine)] = sum(v.weights.fine);
    t[static_cast<int>(Granularity::medium)] = sum(v.weights.medium);
    t[static_cast<int>(Granularity::coarse)] = sum(v.weights.coarse);
    for (double& x : t)
        if (!(x > 0.0)) x = 1.0;
    return t;
}

}  // namespace

double fused_matching_score(const Mapping& mapping, const GroupView& probe, const GroupView& gallery,
                            const AssociationGraph& graph, const MatchConfig& cfg, ScoreBreakdown* breakdown) {
    std::vector<double> matched, unmatched_p, unmatched_g, all_p, all_g;
    std::set<std::pair<Granularity, std::vector<int>>> demoted;
    const auto total_p = order_totals(probe, cfg.importance_share);
    const auto total_g = order_totals(gallery, cfg.importance_share);

    for (const auto& o : enumerate_granular_objects(probe.obs)) {
        if (!order_enabled(cfg.use_order, o.order)) continue;
        const double alpha = probe.weights.of(o) / total_p[static_cast<int>(o.order)];
        all_p.push_back(alpha);
        std::vector<int> image;
        for (int i : o.members) {
            const auto j = mapping.gallery_of(i);
            if (!j) break;
            image.push_back(*j);
        }
        if (image.size() != o.members.size()) {
            unmatched_p.push_back(alpha);
            continue;
        }
        std::sort(image.begin(), image.end());
        double w = 0.0;
        if (o.order == Granularity::global) {
            w = cfg.order_weight[kGlobal] * graph.global_affinity;
        } else {
            const auto k = static_cast<std::size_t>(static_cast<int>(o.order) - 1);
            w = cfg.order_weight[k] * (cfg.normalized_similarity ? graph.lambda[k] : 1.0) *
                raw_order_score(probe, o.members, gallery, image, cfg.solver.eps_dist);
        }
        if (w < cfg.similarity_threshold) {
            unmatched_p.push_back(alpha);
            demoted.insert({o.order, image});
            continue;
        }
        matched.push_back(w);
    }
    for (const auto& o : enumerate_granular_objects(gallery.obs)) {
        if (!order_enabled(cfg.use_order, o.order)) continue;
        const double alpha = gallery.weights.of(o) / total_g[static_cast<int>(o.order)];
        all_g.push_back(alpha);
        const bool all_matched = std::all_of(o.members.begin(), o.members.end(),
                                             [&](int j) { return mapping.probe_of(j).has_value(); });
        if (!all_matched || demoted.contains({o.order, o.members})) unmatched_g.push_back(alpha);
    }

    ScoreBreakdown b;
    b.matched_objects = matched.size();
    b.unmatched_probe = unmatched_p.size();
    b.unmatched_gallery = unmatched_g.size();
    double s = 0.0;
    if (matched.empty()) {
        b.unmatched_term = cfg.lambda_r * (mean(all_p) + mean(all_g));
        s = -b.unmatched_term;
    } else {
        b.matched_term = mean(matched);
        b.unmatched_term = cfg.lambda_r * (mean(unmatched_p) + mean(unmatched_g));
        s = b.matched_term - b.unmatched_term;
    }
    if (breakdown) *breakdown = b;
    return s;
}

ImportanceMap matching_weights(const ImportanceMap& weights, const MatchConfig& cfg) {
    return cfg.relative_importance ? relative_to_order_mean(weights) : weights;
}

MatchResult match_pair(const GroupView& input_probe, const GroupView& input_gallery, const MatchConfig& cfg) {
    const ImportanceMap wp = matching_weights(input_probe.weights, cfg);
    const ImportanceMap wg = matching_weights(input_gallery.weights, cfg);
    const GroupView probe{input_probe.obs, input_probe.features, wp};
    const GroupView gallery{input_gallery.obs, input_gallery.features, wg};
    const AssociationGraph graph = build_association_graph(probe, gallery, cfg);
    const RandomWalkResult walk = solve_rrw(graph, cfg.solver);
    MatchResult r;
    r.mapping = extract_mapping(walk.x, graph);
    if (!r.mapping.is_one_to_one()) throw Error("internal", "extracted mapping is not one-to-one", ErrorKind::runtime);
    r.per_order = objective_terms(r.mapping, graph);
    r.objective = r.per_order.total();
    r.fused_score = fused_matching_score(r.mapping, probe, gallery, graph, cfg, &r.score_terms);
    r.rw_iterations = walk.iterations;
    r.degenerate = walk.degenerate;
    return r;
}

}  // namespace greid
