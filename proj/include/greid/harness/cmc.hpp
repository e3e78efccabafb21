#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace greid::harness {

struct CmcRow {
    std::vector<int> ranks;
    std::vector<double> rates;       // one per rank
    std::size_t n_probes = 0;        // probes with a true match
    std::size_t n_excluded = 0;      // probes without one
};

/// Rank of the best-scoring true match of each probe (1-based), ties broken by gallery
/// index; -1 when the probe has no true match. scores is row-major probes x gallery.
std::vector<int> true_match_ranks(std::span<const double> scores, std::span<const int> probe_groups,
                                  std::span<const int> gallery_groups);

CmcRow cmc_curve(std::span<const double> scores, std::span<const int> probe_groups,
                 std::span<const int> gallery_groups, std::span<const int> ranks);

}  // namespace greid::harness
