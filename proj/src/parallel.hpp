#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace greid::detail {

// Runs body(i) for i in [0, n) across OpenMP threads. The first exception thrown by
// any iteration (lowest index) is rethrown after the loop.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n > 0 ? n : 0));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace greid::detail
