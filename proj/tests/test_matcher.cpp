#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "greid/harness/oracle_check.hpp"
#include "greid/matcher.hpp"

using namespace greid;

namespace {

double sum_scores(const std::vector<PairEdge>& edges) {
    double s = 0.0;
    for (const auto& e : edges) s += e.score;
    return s;
}

double sum_scores(const std::vector<TripleEdge>& edges) {
    double s = 0.0;
    for (const auto& e : edges) s += e.score;
    return s;
}

MatchConfig unpruned() {
    MatchConfig cfg;
    cfg.prune = false;
    return cfg;
}

// Two persons far apart in appearance, one box each.
struct Fixture {
    GroupObservation obs;
    FeatureBundle features;
    ImportanceMap weights;
    GroupView view() const { return {obs, features, weights}; }
};

Fixture group(const std::vector<Point>& centers, std::vector<Vector> persons, Vector global) {
    Fixture f{test::observation(centers), {}, ImportanceMap::uniform(static_cast<int>(centers.size()))};
    f.features = assemble_bundle(f.obs, std::move(persons), std::move(global));
    return f;
}

}  // namespace

TEST_CASE("closed-form helpers") {
    CHECK(fused_pair_weight(1.0, 1.0) == 2.0);
    CHECK(fused_pair_weight(3.0, 1.0) == doctest::Approx(4.0 / 3.0));
    CHECK(fused_pair_weight(0.2, 5.0) == fused_pair_weight(5.0, 0.2));
    CHECK(inter_order_correlation(0.3, 0.3) == doctest::Approx(0.6));
    CHECK(inter_order_correlation(0.75, 0.25) == doctest::Approx(1.0 / 1.5));
    CHECK(inter_order_correlation(0.1, 0.9) == inter_order_correlation(0.9, 0.1));

    FeatureBundle a, b;
    a.global_appearance = {0.0, 0.0};
    b.global_appearance = {0.0, 2.0};
    CHECK(global_score(a, b) == doctest::Approx(0.5));
    CHECK(global_score(a, a) == doctest::Approx(1e6));
    CHECK(global_score(a, b) == global_score(b, a));
}

TEST_CASE("raw score peaks at identical features") {
    const Fixture p = group({{100, 100}, {200, 100}}, {{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5});
    const int i = 0, j = 0, k = 1;
    const double same = raw_order_score(p.view(), std::span(&i, 1), p.view(), std::span(&j, 1), 1e-6);
    CHECK(same == doctest::Approx(2.0 / 1e-6));
    CHECK(raw_order_score(p.view(), std::span(&i, 1), p.view(), std::span(&k, 1), 1e-6) < same);
}

TEST_CASE("association graph structure") {
    std::mt19937_64 rng(5);
    const auto two = harness::random_pair(rng, 2, 2);
    const AssociationGraph g = build_association_graph(two.probe(), two.gallery(), unpruned());
    CHECK(g.candidates.size() == 4);
    CHECK(g.pair_edges.size() == 2);
    CHECK(g.triple_edges.empty());
    for (const auto& e : g.pair_edges) {
        const auto& a = g.candidates[static_cast<std::size_t>(e.nodes[0])];
        const auto& b = g.candidates[static_cast<std::size_t>(e.nodes[1])];
        CHECK(a.probe_person != b.probe_person);
        CHECK(a.gallery_person != b.gallery_person);
    }

    const auto single = harness::random_pair(rng, 1, 3);
    const AssociationGraph s = build_association_graph(single.probe(), single.gallery(), unpruned());
    CHECK(s.candidates.size() == 3);
    CHECK(s.pair_edges.empty());
    CHECK(s.triple_edges.empty());

    const auto big = harness::random_pair(rng, 7, 7);
    MatchConfig cfg;
    cfg.solver.prune_k = 1;
    const AssociationGraph pruned = build_association_graph(big.probe(), big.gallery(), cfg);
    CHECK(pruned.candidates.size() == 7);

    const auto three = harness::random_pair(rng, 3, 4);
    const AssociationGraph t = build_association_graph(three.probe(), three.gallery(), unpruned());
    CHECK(t.pair_edges.size() == 3 * 6 * 2);
    CHECK(t.triple_edges.size() == 1 * 4 * 6);
}

TEST_CASE("normalized score families sum to one") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        const auto pr = harness::random_pair(rng, 3 + t % 3, 3 + (t / 3) % 3);
        const AssociationGraph g = build_association_graph(pr.probe(), pr.gallery(), unpruned());
        CHECK(std::accumulate(g.unary.begin(), g.unary.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sum_scores(g.pair_edges) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sum_scores(g.triple_edges) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("random walk on trivial graphs") {
    std::mt19937_64 rng(2);
    const auto one = harness::random_pair(rng, 1, 1);
    const AssociationGraph g1 = build_association_graph(one.probe(), one.gallery(), unpruned());
    CHECK(solve_rrw(g1, {}).x == std::vector<double>{1.0});

    // Only the pair hyperedge of the identity mapping carries affinity.
    AssociationGraph g;
    g.n_probe = g.n_gallery = 2;
    g.candidates = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    g.cell = {0, 1, 2, 3};
    g.unary.assign(4, 0.0);
    g.pair_edges = {{{0, 3}, 1.0}, {{1, 2}, 0.0}};
    g.marginals.assign(4, {0.0, 0.0, 0.0, 0.0});
    g.inter_order.assign(4, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    g.use_order = {true, true, true, false};
    const RandomWalkResult r = solve_rrw(g, {});
    CHECK_FALSE(r.degenerate);
    CHECK(r.x[0] + r.x[3] > 0.99);
    CHECK(extract_mapping(r.x, g) == Mapping{{{0, 0}, {1, 1}}});

    g.pair_edges[0].score = 0.0;
    const RandomWalkResult flat = solve_rrw(g, {});
    CHECK(flat.degenerate);
    for (double v : flat.x) CHECK(v == 0.25);
}

TEST_CASE("mapping extraction") {
    AssociationGraph g;
    g.n_probe = g.n_gallery = 2;
    g.candidates = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    g.cell = {0, 1, 2, 3};
    const std::vector<double> x{0.4, 0.1, 0.2, 0.3};
    CHECK(extract_mapping(x, g) == Mapping{{{0, 0}, {1, 1}}});

    g.n_probe = 3;
    g.candidates = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}};
    g.cell = {0, 1, 2, 3, 4, 5};
    const std::vector<double> y{0.3, 0.0, 0.0, 0.1, 0.05, 0.55};
    const Mapping m = extract_mapping(y, g);
    CHECK(m.pairs.size() == 2);
    CHECK(m == Mapping{{{0, 0}, {2, 1}}});

    // Six persons go through the exact Hungarian path.
    g.n_probe = g.n_gallery = 6;
    g.candidates.clear();
    g.cell.assign(36, -1);
    std::vector<double> z;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            g.cell[static_cast<std::size_t>(i * 6 + j)] = static_cast<int>(g.candidates.size());
            g.candidates.push_back({i, j});
            z.push_back(j == (i + 2) % 6 ? 1.0 : 0.1);
        }
    const Mapping h = extract_mapping(z, g);
    REQUIRE(h.pairs.size() == 6);
    for (const auto& p : h.pairs) CHECK(p.gallery_person == (p.probe_person + 2) % 6);
}

TEST_CASE("objective terms") {
    std::mt19937_64 rng(4);
    const auto one = harness::random_pair(rng, 1, 1);
    const AssociationGraph g = build_association_graph(one.probe(), one.gallery(), unpruned());
    CHECK(objective_value(Mapping{}, g) == 0.0);
    const double q = objective_value(Mapping{{{0, 0}}}, g);
    CHECK(q == doctest::Approx(g.unary[0] + g.global_affinity + g.inter_order_total(0)));
    // Unary and global marginals are 1 and the absent orders have m = 0: the (1,g) term is 2
    // and the other five pairs give 0.5, 0.5, 0, 0.5, 0.5.
    CHECK(g.unary[0] == doctest::Approx(1.0));
    CHECK(g.inter_order_total(0) == doctest::Approx(4.0));
}

TEST_CASE("objective is invariant under relabeling") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
        auto pr = harness::random_pair(rng, 4, 3);
        const AssociationGraph g = build_association_graph(pr.probe(), pr.gallery(), unpruned());
        const Mapping m{{{0, 2}, {1, 0}, {3, 1}}};
        const double q = objective_value(m, g);

        // Reverse the probe persons.
        const std::vector<int> perm{3, 2, 1, 0};
        harness::RandomPair rp = pr;
        rp.probe_obs.boxes.clear();
        std::vector<Vector> feats;
        std::vector<double> fine;
        for (int k : perm) {
            rp.probe_obs.boxes.push_back(pr.probe_obs.boxes[static_cast<std::size_t>(k)]);
            feats.push_back(pr.probe_features.person_appearance[static_cast<std::size_t>(k)]);
            fine.push_back(pr.probe_weights.fine[static_cast<std::size_t>(k)]);
        }
        rp.probe_features = assemble_bundle(rp.probe_obs, feats, pr.probe_features.global_appearance);
        rp.probe_weights.fine = fine;
        for (const auto& p : all_pairs(4))
            rp.probe_weights.medium[static_cast<std::size_t>(pair_rank(4, p[0], p[1]))] =
                pr.probe_weights.medium[static_cast<std::size_t>(pair_rank(4, perm[static_cast<std::size_t>(p[0])], perm[static_cast<std::size_t>(p[1])]))];
        for (const auto& tr : all_triples(4))
            rp.probe_weights.coarse[static_cast<std::size_t>(triple_rank(4, tr[0], tr[1], tr[2]))] =
                pr.probe_weights.coarse[static_cast<std::size_t>(triple_rank(4, perm[static_cast<std::size_t>(tr[0])],
                                                                              perm[static_cast<std::size_t>(tr[1])],
                                                                              perm[static_cast<std::size_t>(tr[2])]))];
        const AssociationGraph h = build_association_graph(rp.probe(), rp.gallery(), unpruned());
        const Mapping relabeled{{{3, 2}, {2, 0}, {0, 1}}};
        CHECK(objective_value(relabeled, h) == doctest::Approx(q).epsilon(1e-9));
    }
}

TEST_CASE("fused matching score") {
    const Fixture p = group({{100, 100}, {300, 120}}, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}, {0.5, 0.5, 0.0});
    const MatchResult self = match_pair(p.view(), p.view(), MatchConfig{});
    CHECK(self.mapping == Mapping{{{0, 0}, {1, 1}}});
    CHECK(self.score_terms.unmatched_term == 0.0);
    CHECK(self.fused_score == doctest::Approx(self.score_terms.matched_term));

    // The same pair plus a third, unmatched person with the same global feature.
    Fixture extra = group({{100, 100}, {300, 120}, {500, 300}}, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 9.0}},
                          {0.5, 0.5, 0.0});
    extra.weights.fine[2] = 5.0;
    const MatchResult with_extra = match_pair(p.view(), extra.view(), MatchConfig{});
    CHECK(with_extra.mapping == self.mapping);
    CHECK(with_extra.score_terms.unmatched_gallery > 0);
    CHECK(with_extra.fused_score < self.fused_score);

    MatchConfig no_penalty;
    no_penalty.lambda_r = 0.0;
    const MatchResult ignored = match_pair(p.view(), extra.view(), no_penalty);
    CHECK(ignored.score_terms.unmatched_term == 0.0);
    CHECK(ignored.fused_score == doctest::Approx(ignored.score_terms.matched_term));
}

TEST_CASE("empty matched set falls back to the mean importance") {
    const Fixture p = group({{100, 100}}, {{1.0}}, {1.0});
    const AssociationGraph g = build_association_graph(p.view(), p.view(), MatchConfig{});
    MatchConfig cfg;
    cfg.importance_share = false;
    ScoreBreakdown b;
    const double s = fused_matching_score(Mapping{}, p.view(), p.view(), g, cfg, &b);
    CHECK(b.matched_objects == 0);
    CHECK(s == doctest::Approx(-0.5 * (1.0 + 1.0)));
}

TEST_CASE("self match dominates and results are deterministic") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
        const auto pr = harness::random_pair(rng, 4, 4);
        const MatchResult self = match_pair(pr.probe(), pr.probe(), MatchConfig{});
        CHECK(self.mapping == Mapping{{{0, 0}, {1, 1}, {2, 2}, {3, 3}}});
        const MatchResult other = match_pair(pr.probe(), pr.gallery(), MatchConfig{});
        CHECK(other.fused_score < self.fused_score);
        const MatchResult again = match_pair(pr.probe(), pr.gallery(), MatchConfig{});
        CHECK(again.mapping == other.mapping);
        CHECK(again.fused_score == other.fused_score);
        CHECK(again.objective == other.objective);
    }
}

TEST_CASE("score is symmetric when the mapping inverts") {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int t = 0; t < 30; ++t) {
        const auto pr = harness::random_pair(rng, 3, 3);
        const MatchResult ab = match_pair(pr.probe(), pr.gallery(), MatchConfig{});
        const MatchResult ba = match_pair(pr.gallery(), pr.probe(), MatchConfig{});
        Mapping inverse;
        for (const auto& c : ab.mapping.pairs) inverse.pairs.push_back({c.gallery_person, c.probe_person});
        std::sort(inverse.pairs.begin(), inverse.pairs.end());
        if (!(inverse == ba.mapping)) continue;
        ++checked;
        CHECK(ba.fused_score == doctest::Approx(ab.fused_score).epsilon(1e-9));
        CHECK(ba.objective == doctest::Approx(ab.objective).epsilon(1e-9));
    }
    CHECK(checked > 20);
}

TEST_CASE("every match result is one-to-one") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 40; ++t) {
        const auto pr = harness::random_pair(rng, 1 + t % 6, 1 + (t / 6) % 6);
        const MatchResult r = match_pair(pr.probe(), pr.gallery(), MatchConfig{});
        CHECK(r.mapping.is_one_to_one());
        CHECK(r.mapping.pairs.size() <= static_cast<std::size_t>(std::min(pr.probe_obs.size(), pr.gallery_obs.size())));
    }
}

TEST_CASE("configuration validation") {
    MatchConfig cfg;
    cfg.lambda_r = -1.0;
    CHECK(test::error_code([&] { cfg.validate(); }) == "invalid-config");
    MatchConfig solver;
    solver.solver.jump_prob = 1.5;
    CHECK(test::error_code([&] { solver.validate(); }) == "invalid-config");
}
