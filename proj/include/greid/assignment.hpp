#pragma once

#include <span>
#include <vector>

namespace greid {

// Maximum-weight assignment on a rows x cols row-major score matrix. Cells holding
// -infinity are forbidden. Returns, per row, the assigned column or -1. As many rows as
// possible are assigned (min(rows, cols) when the allowed cells permit).

/// Exact enumeration; ties go to the lexicographically smallest (row, column) pair list.
std::vector<int> assign_exhaustive(std::span<const double> score, int rows, int cols);

/// Kuhn-Munkres, O(n^3).
std::vector<int> assign_hungarian(std::span<const double> score, int rows, int cols);

}  // namespace greid
