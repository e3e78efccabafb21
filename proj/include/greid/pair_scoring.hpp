#pragma once

#include <span>
#include <vector>

#include "greid/core.hpp"
#include "greid/importance.hpp"
#include "greid/matcher.hpp"

namespace greid {

/// Indices of a probe and a gallery observation within one collection.
struct PairTask {
    int probe = 0;
    int gallery = 0;

    friend auto operator<=>(const PairTask&, const PairTask&) = default;
};

/// Read-only per-observation inputs shared by all pair matchings.
struct GroupCollection {
    std::span<const GroupObservation> observations;
    std::span<const FeatureBundle> features;
    std::span<const ImportanceMap> weights;

    GroupView view(int index) const;
};

// match_pair over every task. The parallel version runs tasks on OpenMP threads; the
// serial one is the reference. Results are in task order and identical between the two.
std::vector<MatchResult> match_pairs(const GroupCollection& groups, std::span<const PairTask> tasks,
                                     const MatchConfig& cfg);
std::vector<MatchResult> match_pairs_serial(const GroupCollection& groups, std::span<const PairTask> tasks,
                                            const MatchConfig& cfg);

}  // namespace greid
