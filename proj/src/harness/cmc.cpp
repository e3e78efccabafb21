#include "greid/harness/cmc.hpp"

#include <algorithm>
#include <numeric>

#include "greid/error.hpp"

namespace greid::harness {

std::vector<int> true_match_ranks(std::span<const double> scores, std::span<const int> probe_groups,
                                  std::span<const int> gallery_groups) {
    const std::size_t np = probe_groups.size(), ng = gallery_groups.size();
    if (scores.size() != np * ng) throw Error("invalid-argument", "score matrix has wrong size");
    std::vector<int> out(np, -1);
    std::vector<std::size_t> order(ng);
    for (std::size_t p = 0; p < np; ++p) {
        std::iota(order.begin(), order.end(), 0);
        const double* row = scores.data() + p * ng;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
        for (std::size_t r = 0; r < ng; ++r) {
            if (gallery_groups[order[r]] == probe_groups[p]) {
                out[p] = static_cast<int>(r) + 1;
                break;
            }
        }
    }
    return out;
}

CmcRow cmc_curve(std::span<const double> scores, std::span<const int> probe_groups,
                 std::span<const int> gallery_groups, std::span<const int> ranks) {
    const auto found = true_match_ranks(scores, probe_groups, gallery_groups);
    CmcRow row;
    row.ranks.assign(ranks.begin(), ranks.end());
    for (int r : found) (r < 0 ? row.n_excluded : row.n_probes)++;
    for (int k : ranks) {
        const auto hits = std::count_if(found.begin(), found.end(), [k](int r) { return r > 0 && r <= k; });
        row.rates.push_back(row.n_probes ? static_cast<double>(hits) / static_cast<double>(row.n_probes) : 0.0);
    }
    return row;
}

}  // namespace greid::harness
