#pragma once

#include <span>
#include <vector>

#include "greid/importance.hpp"
#include "greid/matcher.hpp"
#include "greid/pair_scoring.hpp"

namespace greid {

/// Match sets of every person of every observation, from the mappings of all tasks.
/// Probe persons collect matched gallery features and gallery persons collect matched
/// probe features.
std::vector<std::vector<MatchSet>> build_match_sets(std::span<const GroupObservation> observations,
                                                    std::span<const FeatureBundle> features,
                                                    std::span<const PairTask> tasks,
                                                    std::span<const MatchResult> results);

/// Fine, medium and coarse weights of every observation from its match sets. Purity terms
/// against an empty set use the largest W1 found between non-empty sets of any image.
std::vector<ImportanceMap> dynamic_weights(std::span<const GroupObservation> observations,
                                           std::span<const FeatureBundle> features,
                                           std::span<const std::vector<MatchSet>> match_sets,
                                           const ImportanceConfig& cfg);

struct WeightIteration {
    std::vector<ImportanceMap> weights;         // final weights, per observation
    std::vector<MatchResult> results;           // matching of every task under the final weights
    std::vector<std::vector<double>> fine_changes;  // |delta alpha_i| of every person, per iteration
    std::vector<double> max_change;             // per iteration
    int iterations = 0;
    bool converged = false;
};

/// Alternates matching of all tasks and weight updates, starting from dynamic terms of 1,
/// until every fine weight moves less than cfg.tol or cfg.max_iter updates were made.
WeightIteration iterate_weights(std::span<const GroupObservation> observations,
                                std::span<const FeatureBundle> features, std::span<const PairTask> tasks,
                                const MatchConfig& match_cfg, const ImportanceConfig& cfg,
                                bool parallel = true);

}  // namespace greid
