#include "greid/harness/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "greid/error.hpp"
#include "greid/harness/cmc.hpp"
#include "greid/iterate.hpp"

namespace greid::harness {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::global_only: return "global";
        case Variant::fine_only: return "fine";
        case Variant::fine_medium: return "fine+medium";
        case Variant::fine_medium_coarse: return "fine+medium+coarse";
        case Variant::full: return "full";
    }
    return "full";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::global_only, Variant::fine_only, Variant::fine_medium, Variant::fine_medium_coarse,
                      Variant::full}) {
        if (name == to_string(v)) return v;
    }
    throw Error("invalid-config", "unknown variant '" + name + "'");
}

EngineConfig variant_config(const EngineConfig& cfg, Variant v) {
    EngineConfig out = cfg;
    if (v == Variant::full) return out;
    out.importance.enabled = false;
    switch (v) {
        case Variant::global_only: out.match.use_order = {false, false, false, true}; break;
        case Variant::fine_only: out.match.use_order = {true, false, false, false}; break;
        case Variant::fine_medium: out.match.use_order = {true, true, false, false}; break;
        case Variant::fine_medium_coarse: out.match.use_order = {true, true, true, false}; break;
        case Variant::full: break;
    }
    return out;
}

std::vector<std::vector<int>> validation_splits(std::span<const int> groups, int n_splits, std::uint64_t seed) {
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n_splits; ++s) {
        std::vector<int> g(groups.begin(), groups.end());
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
        std::shuffle(g.begin(), g.end(), rng);
        std::vector<int> val(g.begin() + static_cast<std::ptrdiff_t>(g.size() / 2), g.end());
        std::sort(val.begin(), val.end());
        out.push_back(std::move(val));
    }
    return out;
}

SplitScores score_groups(const Dataset& dataset, std::span<const FeatureBundle> features,
                         std::span<const int> groups, const EngineConfig& base, Variant variant, bool parallel) {
    const EngineConfig cfg = variant_config(base, variant);
    const std::set<int> keep(groups.begin(), groups.end());
    const std::string& probe_camera = dataset.cameras.front();

    // Observations of the selected groups, probes first.
    std::vector<GroupObservation> obs;
    std::vector<FeatureBundle> feats;
    SplitScores out;
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < dataset.images.size(); ++i) {
            const auto& im = dataset.images[i];
            if (!keep.contains(im.group_id) || (im.camera_id == probe_camera) != (pass == 0)) continue;
            (pass == 0 ? out.probes : out.gallery).push_back(static_cast<int>(i));
            obs.push_back(im);
            feats.push_back(features[i]);
        }
    }
    const std::size_t np = out.probes.size(), ng = out.gallery.size();
    out.scores.assign(np * ng, 0.0);

    if (variant == Variant::global_only) {
        for (std::size_t p = 0; p < np; ++p)
            for (std::size_t g = 0; g < ng; ++g)
                out.scores[p * ng + g] = global_score(feats[p], feats[np + g], cfg.match.solver.eps_dist);
        out.match_calls = np * ng;
        return out;
    }

    std::vector<PairTask> tasks;
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t g = 0; g < ng; ++g) tasks.push_back({static_cast<int>(p), static_cast<int>(np + g)});
    const WeightIteration it = iterate_weights(obs, feats, tasks, cfg.match, cfg.importance, parallel);
    for (std::size_t t = 0; t < tasks.size(); ++t) out.scores[t] = it.results[t].fused_score;
    out.match_calls = tasks.size() * static_cast<std::size_t>(it.iterations + 1);
    return out;
}

CmcReport run_evaluation(const Dataset& dataset, std::span<const FeatureBundle> features, const EngineConfig& cfg,
                         Variant variant, bool parallel) {
    cfg.validate();
    if (features.size() != dataset.images.size()) throw Error("invalid-argument", "one bundle per image expected");
    const auto groups = dataset.evaluable_groups();
    if (groups.size() < 2) {
        throw Error("dataset-too-small", "need at least 2 evaluable groups, found " + std::to_string(groups.size()));
    }
    CmcReport report;
    report.variant = to_string(variant);
    report.ranks = cfg.ranks;
    report.mean.assign(cfg.ranks.size(), 0.0);
    double seconds = 0.0;
    std::size_t calls = 0;
    for (const auto& val : validation_splits(groups, cfg.splits, cfg.seed)) {
        const auto start = std::chrono::steady_clock::now();
        const SplitScores s = score_groups(dataset, features, val, cfg, variant, parallel);
        seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        calls += s.match_calls;
        std::vector<int> pg, gg;
        for (int i : s.probes) pg.push_back(dataset.images[static_cast<std::size_t>(i)].group_id);
        for (int i : s.gallery) gg.push_back(dataset.images[static_cast<std::size_t>(i)].group_id);
        const CmcRow row = cmc_curve(s.scores, pg, gg, cfg.ranks);
        report.split_rates.push_back(row.rates);
        report.pairs += s.probes.size() * s.gallery.size();
        report.excluded_probes += row.n_excluded;
        for (std::size_t r = 0; r < row.rates.size(); ++r) report.mean[r] += row.rates[r] / cfg.splits;
    }
    report.seconds_per_pair = calls ? seconds / static_cast<double>(calls) : 0.0;
    return report;
}

}  // namespace greid::harness
