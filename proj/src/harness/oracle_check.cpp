#include "greid/harness/oracle_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "greid/descriptors.hpp"
#include "greid/error.hpp"
#include "greid/oracle.hpp"
#include "greid/transport.hpp"

namespace greid::harness {

namespace {

GroupObservation random_group(std::mt19937_64& rng, int n, const std::string& id) {
    std::uniform_real_distribution<double> ux(0.0, 600.0), uy(0.0, 380.0);
    GroupObservation obs{id, id, 0, {}, {640, 480}, std::nullopt};
    for (int i = 0; i < n; ++i) obs.boxes.push_back({ux(rng), uy(rng), 40.0, 100.0});
    return obs;
}

ImportanceMap random_weights(std::mt19937_64& rng, const GroupObservation& obs) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const auto t1 = static_weight_fine(local_density(obs));
    std::vector<double> s, p;
    for (int i = 0; i < obs.size(); ++i) {
        s.push_back(u(rng));
        p.push_back(u(rng));
    }
    return compose_weights(obs, t1, normalize_unit_sum(s), normalize_unit_sum(p));
}

}  // namespace

std::vector<Vector> random_points(std::mt19937_64& rng, int n, int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vector> pts(static_cast<std::size_t>(n), Vector(static_cast<std::size_t>(dim)));
    for (auto& p : pts)
        for (double& x : p) x = g(rng);
    return pts;
}

RandomPair random_pair(std::mt19937_64& rng, int n_probe, int n_gallery, int dim) {
    RandomPair r;
    r.probe_obs = random_group(rng, n_probe, "probe");
    r.gallery_obs = random_group(rng, n_gallery, "gallery");
    r.probe_features = assemble_bundle(r.probe_obs, random_points(rng, n_probe, dim), random_points(rng, 1, dim)[0]);
    r.gallery_features =
        assemble_bundle(r.gallery_obs, random_points(rng, n_gallery, dim), random_points(rng, 1, dim)[0]);
    r.probe_weights = random_weights(rng, r.probe_obs);
    r.gallery_weights = random_weights(rng, r.gallery_obs);
    return r;
}

double OracleCheckReport::w1_max_gap() const {
    return w1_gaps.empty() ? 0.0 : *std::max_element(w1_gaps.begin(), w1_gaps.end());
}

double OracleCheckReport::fraction_within(double ratio) const {
    if (objective_ratios.empty()) return 1.0;
    const auto n = std::count_if(objective_ratios.begin(), objective_ratios.end(),
                                 [ratio](double r) { return r >= ratio - 1e-12; });
    return static_cast<double>(n) / static_cast<double>(objective_ratios.size());
}

double OracleCheckReport::fraction_mapping_equal() const {
    if (mapping_equal.empty()) return 1.0;
    const auto n = std::count(mapping_equal.begin(), mapping_equal.end(), 1);
    return static_cast<double>(n) / static_cast<double>(mapping_equal.size());
}

OracleCheckReport run_oracle_check(const OracleCheckConfig& cfg, const MatchConfig& match) {
    if (cfg.trials < 0 || cfg.w1_trials < 0 || cfg.max_size < 2 || cfg.max_size > 6) {
        throw Error("invalid-config", "oracle check needs trials >= 0 and max size in [2, 6]");
    }
    OracleCheckReport rep;
    std::mt19937_64 rng(cfg.seed);

    const int w1_max = std::min(cfg.max_size, 4);
    std::uniform_int_distribution<int> set_size(1, w1_max), dim_dist(1, 8);
    auto t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < cfg.w1_trials; ++t) {
        const int dim = dim_dist(rng);
        const auto a = random_points(rng, set_size(rng), dim);
        const auto b = random_points(rng, set_size(rng), dim);
        rep.w1_gaps.push_back(std::abs(wasserstein1(a, b) - oracle::exhaustive_wasserstein(a, b)));
    }
    rep.w1_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    MatchConfig mc = match;
    mc.prune = false;
    std::uniform_int_distribution<int> group_size(2, cfg.max_size);
    t0 = std::chrono::steady_clock::now();
    for (int t = 0; t < cfg.trials; ++t) {
        const int np = group_size(rng), ng = group_size(rng);
        const RandomPair pair = random_pair(rng, np, ng);
        const MatchResult solved = match_pair(pair.probe(), pair.gallery(), mc);
        const auto best = oracle::brute_force_mapping(pair.probe(), pair.gallery(), mc);
        rep.objective_ratios.push_back(best.objective > 0.0 ? solved.objective / best.objective : 1.0);
        rep.mapping_equal.push_back(solved.mapping == best.mapping ? 1 : 0);
    }
    rep.match_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string format_oracle_report(const OracleCheckReport& r, bool& passed) {
    std::string out;
    char line[160];
    for (std::size_t t = 0; t < r.w1_gaps.size(); ++t) {
        std::snprintf(line, sizeof line, "w1 trial %zu gap %.3e\n", t, r.w1_gaps[t]);
        out += line;
    }
    for (std::size_t t = 0; t < r.objective_ratios.size(); ++t) {
        std::snprintf(line, sizeof line, "match trial %zu q_ratio %.6f mapping %s\n", t, r.objective_ratios[t],
                      r.mapping_equal[t] ? "equal" : "differs");
        out += line;
    }
    const bool w1_ok = r.w1_max_gap() <= 1e-9;
    const bool q_ok = r.fraction_within(0.95) >= 0.90;
    const bool map_ok = r.fraction_mapping_equal() >= 0.80;
    std::snprintf(line, sizeof line, "w1: %zu trials, max gap %.3e, %.2f s: %s\n", r.w1_gaps.size(), r.w1_max_gap(),
                  r.w1_seconds, w1_ok ? "PASS" : "FAIL");
    out += line;
    std::snprintf(line, sizeof line, "matching: %zu trials, Q >= 0.95 opt on %.1f%%, same mapping on %.1f%%, %.2f s: %s\n",
                  r.objective_ratios.size(), 100.0 * r.fraction_within(0.95), 100.0 * r.fraction_mapping_equal(),
                  r.match_seconds, q_ok && map_ok ? "PASS" : "FAIL");
    out += line;
    passed = w1_ok && q_ok && map_ok;
    return out;
}

}  // namespace greid::harness
