#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "greid/importance.hpp"

using namespace greid;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

MatchSet set_of(std::vector<Vector> features) {
    MatchSet m;
    m.features = std::move(features);
    m.sources.assign(m.features.size(), "g");
    return m;
}

}  // namespace

TEST_CASE("local density") {
    const auto two = local_density(test::observation({{100, 100}, {100, 180}}));
    CHECK(two[0] == doctest::Approx(1.0 / 80.0));
    CHECK(two[1] == doctest::Approx(1.0 / 80.0));

    const double h = 100.0 * std::sqrt(3.0) / 2.0;
    const auto tri = local_density(test::observation({{100, 100}, {200, 100}, {150, 100 + h}}));
    CHECK(tri[0] == doctest::Approx(tri[1]));
    CHECK(tri[1] == doctest::Approx(tri[2]));

    CHECK(local_density(test::observation({{100, 100}})) == std::vector<double>{1.0});
}

TEST_CASE("static fine weight") {
    CHECK(static_weight_fine(std::vector<double>{1.0, 1.0, 1.0}) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(static_weight_fine(std::vector<double>{2.0, 1.0, 1.0})[0] == doctest::Approx(4.0));
    CHECK(static_weight_fine(std::vector<double>{0.7, 0.7}) == std::vector<double>{1.0, 1.0});
    CHECK(static_weight_fine(std::vector<double>{3.0}) == std::vector<double>{1.0});
    CHECK(static_weight_fine(std::vector<double>{1.0, 0.0})[0] == doctest::Approx(1e9));
}

TEST_CASE("saliency") {
    const std::vector<Vector> persons{{0.0, 0.0}, {10.0, 0.0}};
    const std::vector<MatchSet> sets{set_of({{2.0, 0.0}}), set_of({{10.0, 6.0}})};
    const auto s = saliency(persons, sets);
    CHECK(s[0] == doctest::Approx(0.25));
    CHECK(s[1] == doctest::Approx(0.75));

    const std::vector<Vector> three{{0.0}, {5.0}, {9.0}};
    const std::vector<MatchSet> same{set_of({{1.0}, {-1.0}}), set_of({{6.0}, {4.0}}), set_of({{10.0}, {8.0}})};
    for (double v : saliency(three, same)) CHECK(v == doctest::Approx(1.0 / 3.0));

    // The median neighbour of a three-element set is the second nearest.
    CHECK(median_neighbor({0.0}, set_of({{5.0}, {1.0}, {3.0}})) == 2);

    // Empty sets take the largest raw value of the image.
    const auto with_empty = saliency(persons, std::vector<MatchSet>{set_of({{2.0, 0.0}}), MatchSet{}});
    CHECK(with_empty[0] == doctest::Approx(0.5));
    CHECK(sum(with_empty) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("purity") {
    const std::vector<MatchSet> equal{set_of({{0.0}, {1.0}}), set_of({{1.0}, {0.0}})};
    CHECK(purity_raw(equal, 9.0) == std::vector<double>{0.0, 0.0});
    // All terms zero normalizes to uniform.
    CHECK(purity(equal, 9.0) == std::vector<double>{0.5, 0.5});

    const std::vector<MatchSet> singles{set_of({{0.0, 0.0}}), set_of({{3.0, 4.0}}), set_of({{0.0, 0.0}})};
    const auto raw = purity_raw(singles, 9.0);
    CHECK(raw[0] == doctest::Approx(5.0));
    CHECK(raw[1] == doctest::Approx(10.0));
    CHECK(raw[2] == doctest::Approx(5.0));
    const auto p = purity(singles, 9.0);
    CHECK(sum(p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5));

    const std::vector<MatchSet> with_empty{set_of({{0.0}}), MatchSet{}};
    CHECK(purity_raw(with_empty, 9.0) == std::vector<double>{9.0, 9.0});
    CHECK(purity(std::vector<MatchSet>{set_of({{1.0}})}, 9.0) == std::vector<double>{1.0});
}

TEST_CASE("fine, medium and coarse weights") {
    const auto obs = test::observation({{100, 100}, {300, 100}, {200, 300}});
    const std::vector<double> t1{2.0, 2.0, 2.0}, s{0.25, 0.25, 0.5}, p{0.4, 0.3, 0.3};
    const ImportanceMap w = compose_weights(obs, t1, s, p);
    CHECK(w.fine[0] == doctest::Approx(2.65));

    const ImportanceMap init = initial_weights(obs);
    const auto t1_init = static_weight_fine(local_density(obs));
    for (std::size_t i = 0; i < 3; ++i) CHECK(init.fine[i] == doctest::Approx(t1_init[i] + 2.0));

    CHECK(medium_weight(1.0, 1.0, 2.0) == 4.0);
    CHECK(coarse_weight(4.0, 4.0, 4.0, 1.0) == 13.0);
    const double t2 = pair_stability(obs.boxes[0], obs.boxes[1], obs.image_size);
    CHECK(w.medium[0] == doctest::Approx(w.fine[0] + w.fine[1] + t2));

    ImportanceConfig off;
    off.enabled = false;
    const ImportanceMap ones = compose_weights(obs, t1, s, p, off);
    CHECK(ones.fine == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(ones.coarse == std::vector<double>{1.0});
}

TEST_CASE("pair stability") {
    const BoundingBox a{90, 90, 20, 20};
    CHECK(pair_stability(a, a, {640, 480}) == doctest::Approx(1e6));
    // Half the diagonal of a 300x400 image.
    const BoundingBox b{-5, -5, 10, 10}, c{145, 195, 10, 10};
    CHECK(pair_stability(b, c, {300, 400}) == doctest::Approx(1.0 / 0.500001).epsilon(1e-12));
}

TEST_CASE("triangle stability") {
    const double h = std::sqrt(3.0) / 2.0;
    CHECK(triangle_stability({0, 0}, {1, 0}, {0.5, h}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(triangle_stability_from_angles({std::numbers::pi / 3, std::numbers::pi / 3, std::numbers::pi / 3}) == 1.0);
    CHECK(triangle_stability({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(0.405099).epsilon(1e-5));
    CHECK(triangle_stability({0, 0}, {1, 0}, {2, 0}) == doctest::Approx(0.005538).epsilon(1e-3));
    CHECK(triangle_stability({0, 0}, {0, 0}, {2, 0}) == doctest::Approx(0.005538).epsilon(1e-3));
}

TEST_CASE("normalizations") {
    CHECK(normalize_unit_sum(std::vector<double>{2.0, 6.0}) == std::vector<double>{0.25, 0.75});
    CHECK(normalize_unit_sum(std::vector<double>{0.0, 0.0, 0.0, 0.0}) == std::vector<double>{0.25, 0.25, 0.25, 0.25});

    const auto obs = test::observation({{100, 100}, {300, 100}, {200, 300}, {400, 350}});
    const ImportanceMap rel = relative_to_order_mean(initial_weights(obs));
    CHECK(sum(rel.fine) == doctest::Approx(4.0));
    CHECK(sum(rel.medium) == doctest::Approx(6.0));
    CHECK(sum(rel.coarse) == doctest::Approx(4.0));
}

TEST_CASE("subgroup weights are permutation invariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(20.0, 460.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<Point> c;
        for (int i = 0; i < 5; ++i) c.push_back({u(rng), u(rng)});
        std::vector<int> perm{0, 1, 2, 3, 4};
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Point> pc;
        for (int i : perm) pc.push_back(c[static_cast<std::size_t>(i)]);
        const ImportanceMap a = initial_weights(test::observation(c));
        const ImportanceMap b = initial_weights(test::observation(pc));
        // Person k of the permuted observation is person perm[k] of the original.
        for (int x = 0; x < 5; ++x) {
            CHECK(b.fine[static_cast<std::size_t>(x)] == doctest::Approx(a.fine[static_cast<std::size_t>(perm[static_cast<std::size_t>(x)])]));
            for (int y = x + 1; y < 5; ++y) {
                const int px = perm[static_cast<std::size_t>(x)], py = perm[static_cast<std::size_t>(y)];
                CHECK(b.medium[static_cast<std::size_t>(pair_rank(5, x, y))] ==
                      doctest::Approx(a.medium[static_cast<std::size_t>(pair_rank(5, px, py))]));
                for (int z = y + 1; z < 5; ++z) {
                    const int pz = perm[static_cast<std::size_t>(z)];
                    CHECK(b.coarse[static_cast<std::size_t>(triple_rank(5, x, y, z))] ==
                          doctest::Approx(a.coarse[static_cast<std::size_t>(triple_rank(5, px, py, pz))]));
                }
            }
        }
    }
}

TEST_CASE("configuration validation") {
    ImportanceConfig cfg;
    cfg.k_density = 0;
    CHECK(test::error_code([&] { cfg.validate(); }) == "invalid-config");
}
