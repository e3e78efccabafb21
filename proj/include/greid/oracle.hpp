#pragma once

#include <span>

#include "greid/core.hpp"
#include "greid/matcher.hpp"

// Brute-force references for tests. They share only the data types with the production
// code paths.
namespace greid::oracle {

struct BruteForceResult {
    Mapping mapping;
    double objective = 0.0;
};

/// Objective of a mapping, recomputed from features and weights over the unpruned graph.
double mapping_objective(const Mapping& mapping, const GroupView& probe, const GroupView& gallery,
                         const MatchConfig& cfg);

/// Best full injection of the smaller group into the larger one. Ties go to the
/// lexicographically smallest pair list. Throws "instance-too-large" when min(N_p, N_g) > 6.
BruteForceResult brute_force_mapping(const GroupView& probe, const GroupView& gallery, const MatchConfig& cfg);

/// W1 between uniform empirical distributions by enumerating transport polytope vertices.
/// Throws "instance-too-large" for sets larger than 4.
double exhaustive_wasserstein(std::span<const Vector> a, std::span<const Vector> b);

}  // namespace greid::oracle
