#pragma once

#include <span>
#include <string>
#include <vector>

#include "greid/core.hpp"
#include "greid/harness/config.hpp"
#include "greid/harness/dataset.hpp"

namespace greid::harness {

// Granularity ablations. The partial variants use unit importance weights; global_only
// ranks by the global score alone.
enum class Variant { global_only, fine_only, fine_medium, fine_medium_coarse, full };

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);  // throws "invalid-config"

/// Engine settings of a variant derived from the full configuration.
EngineConfig variant_config(const EngineConfig& cfg, Variant v);

struct CmcReport {
    std::string variant = "full";
    std::vector<int> ranks;
    std::vector<std::vector<double>> split_rates;  // [split][rank]
    std::vector<double> mean;                      // [rank]
    std::size_t pairs = 0;                         // matched probe-gallery pairs, all splits
    std::size_t excluded_probes = 0;
    double seconds_per_pair = 0.0;

    bool operator==(const CmcReport&) const = default;
};

/// Validation groups of each split: a seeded shuffle of the evaluable groups, second half.
std::vector<std::vector<int>> validation_splits(std::span<const int> groups, int n_splits, std::uint64_t seed);

struct SplitScores {
    std::vector<int> probes;    // dataset image indices
    std::vector<int> gallery;
    std::vector<double> scores; // probes x gallery
    std::size_t match_calls = 0;
};

/// Fused scores of every probe (first camera) against every gallery image (other cameras)
/// of the given groups.
SplitScores score_groups(const Dataset& dataset, std::span<const FeatureBundle> features,
                         std::span<const int> groups, const EngineConfig& cfg, Variant variant,
                         bool parallel = true);

/// Throws "dataset-too-small" with fewer than 2 evaluable groups.
CmcReport run_evaluation(const Dataset& dataset, std::span<const FeatureBundle> features,
                         const EngineConfig& cfg, Variant variant = Variant::full, bool parallel = true);

}  // namespace greid::harness
