// Acceptance run: one PASS/FAIL line per criterion. Exits 0 unless --strict is given and
// some criterion fails, so that known shortfalls stay visible without breaking the build.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "greid/feature_file.hpp"
#include "greid/harness/cmc.hpp"
#include "greid/harness/evaluation.hpp"
#include "greid/harness/oracle_check.hpp"
#include "greid/harness/report.hpp"
#include "greid/harness/synth.hpp"
#include "greid/importance.hpp"
#include "greid/iterate.hpp"
#include "greid/matcher.hpp"

using namespace greid;
using namespace greid::harness;

namespace {

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

struct Synth {
    SynthData data;
    std::vector<FeatureBundle> bundles;
};

Synth make_synth(double sigma_f, double sigma_pos, double p_mem, std::uint64_t seed) {
    SynthConfig sc;
    sc.n_groups = 50;
    sc.feature_noise = sigma_f;
    sc.layout_jitter = sigma_pos;
    sc.member_change_prob = p_mem;
    sc.seed = seed;
    Synth s{synthesize(sc), {}};
    s.bundles = load_external_features(s.data.features, s.data.dataset.images);
    return s;
}

// All camera-A x camera-B pairs of a synthetic dataset, probes first.
std::vector<PairTask> cross_camera_tasks(const Dataset& ds) {
    std::vector<int> a, b;
    for (std::size_t i = 0; i < ds.images.size(); ++i)
        (ds.images[i].camera_id == ds.cameras[0] ? a : b).push_back(static_cast<int>(i));
    std::vector<PairTask> tasks;
    for (int p : a)
        for (int g : b) tasks.push_back({p, g});
    return tasks;
}

void oracle_criteria() {
    OracleCheckConfig cfg;
    cfg.trials = 200;
    cfg.w1_trials = 1000;
    cfg.max_size = 4;
    cfg.seed = 2024;
    const OracleCheckReport r = run_oracle_check(cfg);
    verdict(1, "oracle-w1", r.w1_max_gap() <= 1e-9 && r.w1_seconds < 10.0,
            format("max gap %.2e over %zu instances, %.2f s", r.w1_max_gap(), r.w1_gaps.size(), r.w1_seconds));
    const double within = r.fraction_within(0.95), same = r.fraction_mapping_equal();
    verdict(2, "oracle-matching", within >= 0.90 && same >= 0.80 && r.match_seconds < 60.0,
            format("Q >= 0.95 opt on %.1f%%, same mapping on %.1f%%, %.2f s", 100.0 * within, 100.0 * same,
                   r.match_seconds));
}

void closed_form() {
    const double pi = std::numbers::pi;
    const double equilateral = triangle_stability_from_angles({pi / 3, pi / 3, pi / 3});
    const double right = triangle_stability_from_angles({pi / 2, pi / 4, pi / 4});
    const double psi = fused_pair_weight(1.0, 1.0);
    const double v = 0.37;
    const double mrl = inter_order_correlation(v, v);
    const bool ok = equilateral == 1.0 && std::abs(right - 0.4051) <= 1e-3 && psi == 2.0 && std::abs(mrl - 2 * v) < 1e-15;
    verdict(3, "closed-form", ok,
            format("t3(eq)=%.17g t3(90,45,45)=%.6f psi(1,1)=%.17g m_rl(v,v)/v=%.17g", equilateral, right, psi,
                   mrl / v));
}

bool unit_sum(std::span<const double> h) {
    return std::abs(std::accumulate(h.begin(), h.end(), 0.0) - 1.0) <= 1e-9;
}

void invariants() {
    std::string broken;
    const Synth s = make_synth(0.2, 0.1, 0.3, 7);
    const auto& ds = s.data.dataset;
    const auto tasks = cross_camera_tasks(ds);
    const WeightIteration it = iterate_weights(ds.images, s.bundles, tasks, MatchConfig{}, ImportanceConfig{});

    // One-to-one mappings.
    std::size_t not_injective = 0;
    for (const auto& r : it.results) not_injective += !r.mapping.is_one_to_one();
    if (not_injective) broken += format(" one-to-one(%zu)", not_injective);

    // Spatial histograms of every edge, and the stripe histograms of a random crop.
    const SpatialHistogramConfig sp;
    std::size_t bad_hist = 0, histograms = 0;
    for (const auto& b : s.bundles)
        for (const auto& e : b.edge_spatial) {
            bad_hist += !unit_sum(std::span(e).first(static_cast<std::size_t>(sp.n_dist_bins)));
            bad_hist += !unit_sum(std::span(e).subspan(static_cast<std::size_t>(sp.n_dist_bins)));
            histograms += 2;
        }
    RgbImage crop(40, 120);
    std::mt19937 px(3);
    for (auto& p : crop.pixels) p = static_cast<std::uint8_t>(px() & 0xff);
    const Vector stripe = stripe_appearance_feature(crop);
    for (std::size_t s0 = 0; s0 < 18; ++s0) {
        for (std::size_t c = 0; c < 9; ++c) bad_hist += !unit_sum(std::span(stripe).subspan(s0 * 152 + c * 16, 16));
        bad_hist += !unit_sum(std::span(stripe).subspan(s0 * 152 + 144, 8));
        histograms += 10;
    }
    if (bad_hist) broken += format(" histograms(%zu)", bad_hist);

    // Saliency and purity over the final match sets.
    const auto sets = build_match_sets(ds.images, s.bundles, tasks, it.results);
    std::size_t bad_norm = 0;
    for (std::size_t o = 0; o < ds.images.size(); ++o) {
        bad_norm += !unit_sum(saliency(s.bundles[o].person_appearance, sets[o]));
        bad_norm += !unit_sum(purity(sets[o], 1.0));
    }
    if (bad_norm) broken += format(" saliency/purity(%zu)", bad_norm);

    // CMC monotone on the final scores.
    std::vector<int> pg, gg;
    std::vector<double> scores;
    for (std::size_t t = 0; t < tasks.size(); ++t) scores.push_back(it.results[t].fused_score);
    for (std::size_t i = 0; i < ds.images.size(); ++i)
        (ds.images[i].camera_id == ds.cameras[0] ? pg : gg).push_back(ds.images[i].group_id);
    std::vector<int> all_ranks(gg.size());
    std::iota(all_ranks.begin(), all_ranks.end(), 1);
    const CmcRow row = cmc_curve(scores, pg, gg, all_ranks);
    if (!std::is_sorted(row.rates.begin(), row.rates.end())) broken += " cmc";

    // Relabeling persons: subgroup weights and Q follow the permutation.
    std::mt19937_64 rng(99);
    std::size_t perm_bad = 0;
    for (int t = 0; t < 50; ++t) {
        const RandomPair pr = random_pair(rng, 4, 5);
        std::vector<int> perm{0, 1, 2, 3};
        std::shuffle(perm.begin(), perm.end(), rng);
        RandomPair q = pr;
        q.probe_obs.boxes.clear();
        std::vector<Vector> f;
        for (int k : perm) {
            q.probe_obs.boxes.push_back(pr.probe_obs.boxes[static_cast<std::size_t>(k)]);
            f.push_back(pr.probe_features.person_appearance[static_cast<std::size_t>(k)]);
        }
        q.probe_features = assemble_bundle(q.probe_obs, f, pr.probe_features.global_appearance);
        const ImportanceMap wa = initial_weights(pr.probe_obs), wb = initial_weights(q.probe_obs);
        for (const auto& p : all_pairs(4))
            perm_bad += std::abs(wb.medium[static_cast<std::size_t>(pair_rank(4, p[0], p[1]))] -
                                 wa.medium[static_cast<std::size_t>(pair_rank(4, perm[static_cast<std::size_t>(p[0])],
                                                                              perm[static_cast<std::size_t>(p[1])]))]) >
                        1e-9 * std::max(1.0, wa.medium[0]);
        q.probe_weights = wb;
        RandomPair base = pr;
        base.probe_weights = wa;
        MatchConfig mc;
        mc.prune = false;
        const MatchResult ra = match_pair(base.probe(), base.gallery(), mc);
        const MatchResult rb = match_pair(q.probe(), q.gallery(), mc);
        perm_bad += std::abs(ra.objective - rb.objective) > 1e-9 * std::max(1.0, std::abs(ra.objective));
        perm_bad += std::abs(ra.fused_score - rb.fused_score) > 1e-9 * std::max(1.0, std::abs(ra.fused_score));
    }
    if (perm_bad) broken += format(" permutation(%zu)", perm_bad);

    // Determinism: two evaluations give the same bytes.
    EngineConfig cfg;
    cfg.splits = 2;
    const std::string a = report_csv(run_evaluation(ds, s.bundles, cfg));
    const std::string b = report_csv(run_evaluation(ds, s.bundles, cfg));
    std::string ja, jb;
    const WeightIteration again = iterate_weights(ds.images, s.bundles, tasks, MatchConfig{}, ImportanceConfig{});
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        ja += match_result_json(it.results[t], "p", "g");
        jb += match_result_json(again.results[t], "p", "g");
    }
    if (a != b || ja != jb) broken += " determinism";

    verdict(4, "invariants", broken.empty(),
            broken.empty() ? format("%zu results, %zu histograms, 50 relabelings", it.results.size(), histograms)
                           : "violated:" + broken);
}

void convergence() {
    const Synth s = make_synth(0.1, 0.0, 0.2, 11);
    const auto tasks = cross_camera_tasks(s.data.dataset);
    ImportanceConfig cfg;
    cfg.max_iter = 5;
    const WeightIteration it = iterate_weights(s.data.dataset.images, s.bundles, tasks, MatchConfig{}, cfg);
    const auto& last = it.fine_changes.back();
    const auto stable = std::count_if(last.begin(), last.end(), [](double d) { return d < 1e-3; });
    const double frac = static_cast<double>(stable) / static_cast<double>(last.size());
    verdict(5, "weight-convergence", frac >= 0.90,
            format("%.1f%% of %zu fine weights moved < 1e-3 at iteration %d (max change %.3e)", 100.0 * frac,
                   last.size(), it.iterations, it.max_change.back()));
}

void zero_noise() {
    const Synth s = make_synth(0.0, 0.0, 0.0, 5);
    const CmcReport r = run_evaluation(s.data.dataset, s.bundles, EngineConfig{});
    verdict(6, "zero-noise", r.mean[0] == 1.0, format("mean CMC@1 = %.6f over %zu splits", r.mean[0], r.split_rates.size()));
}

double mean_rank1(double p_mem, const EngineConfig& cfg, Variant v) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Synth s = make_synth(0.3, 0.2, p_mem, seed);
        EngineConfig c = cfg;
        c.seed = seed;
        total += run_evaluation(s.data.dataset, s.bundles, c, v).mean[0];
    }
    return total / 5.0;
}

void ablation() {
    const EngineConfig cfg;
    double r[5];
    const Variant order[5] = {Variant::global_only, Variant::fine_only, Variant::fine_medium,
                              Variant::fine_medium_coarse, Variant::full};
    for (int k = 0; k < 5; ++k) r[k] = mean_rank1(0.3, cfg, order[k]);
    const bool ok = r[0] < r[1] && r[1] <= r[2] && r[2] <= r[3] && r[3] <= r[4] && r[4] >= r[0] + 0.10;
    verdict(7, "ablation-trend", ok,
            format("rank-1 global %.3f, fine %.3f, +medium %.3f, +coarse %.3f, full %.3f", r[0], r[1], r[2], r[3],
                   r[4]));
}

void unmatched_term() {
    EngineConfig with, without;
    with.match.lambda_r = 0.5;
    without.match.lambda_r = 0.0;
    const double a = mean_rank1(0.5, with, Variant::full);
    const double b = mean_rank1(0.5, without, Variant::full);
    verdict(8, "unmatched-term", b < a, format("rank-1 lambda_r=0.5 %.3f, lambda_r=0 %.3f", a, b));
}

void runtime() {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<int> size(2, 6);
    std::vector<RandomPair> pairs;
    for (int t = 0; t < 500; ++t) pairs.push_back(random_pair(rng, size(rng), size(rng), 32));
    pairs[0] = random_pair(rng, 6, 6, 32);
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& p : pairs) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)match_pair(p.probe(), p.gallery(), MatchConfig{});
        worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    const double mean =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / static_cast<double>(pairs.size());
    verdict(9, "runtime", mean <= 0.2, format("mean %.2e s, worst %.2e s over %zu pairs", mean, worst, pairs.size()));
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    try {
        oracle_criteria();
        closed_form();
        invariants();
        convergence();
        zero_noise();
        ablation();
        unmatched_term();
        runtime();
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("acceptance: %d of 9 criteria passed\n", 9 - failures);
    return strict && failures > 0 ? 1 : 0;
}
