#pragma once

#include <span>

#include "greid/core.hpp"

namespace greid {

/// Exact Wasserstein-1 distance between the uniform empirical distributions on two
/// point sets under the Euclidean ground metric. Both sets must be non-empty.
double wasserstein1(std::span<const Vector> a, std::span<const Vector> b);

/// Exact transportation cost for integer supplies/demands (equal totals) and a row-major
/// cost matrix, solved by successive shortest paths. Returns the total cost.
double min_cost_transport(std::span<const long long> supply, std::span<const long long> demand,
                          std::span<const double> cost);

}  // namespace greid
