#include "greid/pair_scoring.hpp"

#include "greid/error.hpp"
#include "parallel.hpp"

namespace greid {

GroupView GroupCollection::view(int index) const {
    const auto i = static_cast<std::size_t>(index);
    if (i >= observations.size() || i >= features.size() || i >= weights.size()) {
        throw Error("invalid-argument", "observation index out of range");
    }
    return {observations[i], features[i], weights[i]};
}

std::vector<MatchResult> match_pairs(const GroupCollection& groups, std::span<const PairTask> tasks,
                                     const MatchConfig& cfg) {
    std::vector<MatchResult> out(tasks.size());
    detail::parallel_for(static_cast<std::ptrdiff_t>(tasks.size()), [&](std::ptrdiff_t t) {
        const auto k = static_cast<std::size_t>(t);
        out[k] = match_pair(groups.view(tasks[k].probe), groups.view(tasks[k].gallery), cfg);
    });
    return out;
}

std::vector<MatchResult> match_pairs_serial(const GroupCollection& groups, std::span<const PairTask> tasks,
                                            const MatchConfig& cfg) {
    std::vector<MatchResult> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) out.push_back(match_pair(groups.view(t.probe), groups.view(t.gallery), cfg));
    return out;
}

}  // namespace greid
