#include "greid/iterate.hpp"

#include <algorithm>
#include <cmath>

#include "greid/error.hpp"
#include "greid/transport.hpp"
#include "parallel.hpp"

namespace greid {

std::vector<std::vector<MatchSet>> build_match_sets(std::span<const GroupObservation> observations,
                                                    std::span<const FeatureBundle> features,
                                                    std::span<const PairTask> tasks,
                                                    std::span<const MatchResult> results) {
    if (tasks.size() != results.size()) throw Error("invalid-argument", "one result per task expected");
    std::vector<std::vector<MatchSet>> sets(observations.size());
    for (std::size_t o = 0; o < observations.size(); ++o)
        sets[o].resize(static_cast<std::size_t>(observations[o].size()));
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const auto p = static_cast<std::size_t>(tasks[t].probe), g = static_cast<std::size_t>(tasks[t].gallery);
        for (const auto& c : results[t].mapping.pairs) {
            const auto i = static_cast<std::size_t>(c.probe_person), j = static_cast<std::size_t>(c.gallery_person);
            sets[p][i].features.push_back(features[g].person_appearance[j]);
            sets[p][i].sources.push_back(observations[g].image_id);
            sets[g][j].features.push_back(features[p].person_appearance[i]);
            sets[g][j].sources.push_back(observations[p].image_id);
        }
    }
    return sets;
}

std::vector<ImportanceMap> dynamic_weights(std::span<const GroupObservation> observations,
                                           std::span<const FeatureBundle> features,
                                           std::span<const std::vector<MatchSet>> match_sets,
                                           const ImportanceConfig& cfg) {
    const std::size_t n_obs = observations.size();
    // W1 between every pair of non-empty sets of one image; -1 marks a pair with an empty set.
    std::vector<std::vector<double>> w1(n_obs);
    detail::parallel_for(static_cast<std::ptrdiff_t>(n_obs), [&](std::ptrdiff_t k) {
        const auto o = static_cast<std::size_t>(k);
        const auto& sets = match_sets[o];
        const std::size_t n = sets.size();
        w1[o].assign(n * n, -1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (!sets[i].empty() && !sets[j].empty())
                    w1[o][i * n + j] = w1[o][j * n + i] = wasserstein1(sets[i].features, sets[j].features);
    });
    double max_w1 = 0.0;
    for (const auto& m : w1)
        for (double v : m) max_w1 = std::max(max_w1, v);

    std::vector<ImportanceMap> out(n_obs);
    for (std::size_t o = 0; o < n_obs; ++o) {
        const auto& obs = observations[o];
        const std::size_t n = static_cast<std::size_t>(obs.size());
        const auto t1 = static_weight_fine(local_density(obs, cfg.k_density), cfg.ratio_floor);
        const auto s = saliency(features[o].person_appearance, match_sets[o]);
        std::vector<double> p(n, 1.0);
        if (n > 1) {
            std::vector<double> raw(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) raw[i] += w1[o][i * n + j] < 0.0 ? max_w1 : w1[o][i * n + j];
            p = normalize_unit_sum(raw);
        }
        out[o] = compose_weights(obs, t1, s, p, cfg);
    }
    return out;
}

WeightIteration iterate_weights(std::span<const GroupObservation> observations,
                                std::span<const FeatureBundle> features, std::span<const PairTask> tasks,
                                const MatchConfig& match_cfg, const ImportanceConfig& cfg, bool parallel) {
    if (observations.size() != features.size()) throw Error("invalid-argument", "one bundle per observation expected");
    WeightIteration it;
    it.weights.reserve(observations.size());
    for (const auto& obs : observations) it.weights.push_back(initial_weights(obs, cfg));

    auto run = [&] {
        const GroupCollection groups{observations, features, it.weights};
        return parallel ? match_pairs(groups, tasks, match_cfg) : match_pairs_serial(groups, tasks, match_cfg);
    };

    // Uniform weights have no dynamic part to update.
    const int max_iter = cfg.enabled ? cfg.max_iter : 0;
    while (it.iterations < max_iter) {
        const auto results = run();
        const auto sets = build_match_sets(observations, features, tasks, results);
        auto next = dynamic_weights(observations, features, sets, cfg);
        std::vector<double> changes;
        for (std::size_t o = 0; o < next.size(); ++o)
            for (std::size_t i = 0; i < next[o].fine.size(); ++i)
                changes.push_back(std::abs(next[o].fine[i] - it.weights[o].fine[i]));
        const double worst = changes.empty() ? 0.0 : *std::max_element(changes.begin(), changes.end());
        it.weights = std::move(next);
        it.fine_changes.push_back(std::move(changes));
        it.max_change.push_back(worst);
        ++it.iterations;
        if (worst < cfg.tol) {
            it.converged = true;
            break;
        }
    }
    it.results = run();
    return it;
}

}  // namespace greid
