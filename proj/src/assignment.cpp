#include "greid/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "greid/error.hpp"

namespace greid {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Transposed {
    std::vector<double> score;
    int rows;
    int cols;
    bool flipped;
};

// Orients the matrix so that rows <= cols.
Transposed orient(std::span<const double> score, int rows, int cols) {
    if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != score.size()) {
        throw Error("invalid-argument", "assignment matrix has wrong size");
    }
    if (rows <= cols) return {{score.begin(), score.end()}, rows, cols, false};
    std::vector<double> t(score.size());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t[static_cast<std::size_t>(c) * rows + r] = score[static_cast<std::size_t>(r) * cols + c];
    return {std::move(t), cols, rows, true};
}

std::vector<int> unorient(const std::vector<int>& assign, const Transposed& t, int rows) {
    if (!t.flipped) return assign;
    std::vector<int> out(static_cast<std::size_t>(rows), -1);
    for (int r = 0; r < t.rows; ++r)
        if (assign[static_cast<std::size_t>(r)] >= 0) out[static_cast<std::size_t>(assign[static_cast<std::size_t>(r)])] = r;
    return out;
}

}  // namespace

std::vector<int> assign_exhaustive(std::span<const double> score, int rows, int cols) {
    const Transposed t = orient(score, rows, cols);
    std::vector<int> current(static_cast<std::size_t>(t.rows), -1), best = current;
    std::vector<char> used(static_cast<std::size_t>(t.cols), 0);
    int best_count = -1;
    double best_score = kNegInf;
    std::vector<std::pair<int, int>> best_pairs;

    auto pairs_of = [&](const std::vector<int>& a) {
        std::vector<std::pair<int, int>> p;
        for (int r = 0; r < t.rows; ++r) {
            const int c = a[static_cast<std::size_t>(r)];
            if (c >= 0) p.push_back(t.flipped ? std::pair{c, r} : std::pair{r, c});
        }
        std::sort(p.begin(), p.end());
        return p;
    };

    auto recurse = [&](auto&& self, int r, int count, double sum) -> void {
        if (r == t.rows) {
            const double tol = 1e-12 * std::max(1.0, std::abs(best_score));
            bool take = count > best_count;
            if (!take && count == best_count) {
                if (sum > best_score + tol) {
                    take = true;
                } else if (sum >= best_score - tol) {
                    take = pairs_of(current) < best_pairs;
                }
            }
            if (take) {
                best_count = count;
                best_score = sum;
                best = current;
                best_pairs = pairs_of(current);
            }
            return;
        }
        for (int c = 0; c < t.cols; ++c) {
            const double s = t.score[static_cast<std::size_t>(r) * t.cols + c];
            if (used[static_cast<std::size_t>(c)] || s == kNegInf) continue;
            used[static_cast<std::size_t>(c)] = 1;
            current[static_cast<std::size_t>(r)] = c;
            self(self, r + 1, count + 1, sum + s);
            current[static_cast<std::size_t>(r)] = -1;
            used[static_cast<std::size_t>(c)] = 0;
        }
        self(self, r + 1, count, sum);
    };
    recurse(recurse, 0, 0, 0.0);
    return unorient(best, t, rows);
}

std::vector<int> assign_hungarian(std::span<const double> score, int rows, int cols) {
    const Transposed t = orient(score, rows, cols);
    const std::size_t n = static_cast<std::size_t>(t.rows), m = static_cast<std::size_t>(t.cols);
    double max_abs = 1.0;
    for (double s : t.score)
        if (s != kNegInf) max_abs = std::max(max_abs, std::abs(s));
    const double forbidden = 1e6 * max_abs * static_cast<double>(n + 1);
    auto cost = [&](std::size_t r, std::size_t c) {
        const double s = t.score[r * m + c];
        return s == kNegInf ? forbidden : -s;
    };

    // Potentials formulation with 1-based rows/columns; column 0 is the virtual root.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assign(n, -1);
    for (std::size_t j = 1; j <= m; ++j) {
        const std::size_t i = p[j];
        if (i > 0 && t.score[(i - 1) * m + (j - 1)] != kNegInf) assign[i - 1] = static_cast<int>(j - 1);
    }
    return unorient(assign, t, rows);
}

}  // namespace greid
