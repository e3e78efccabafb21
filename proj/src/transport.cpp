#include "greid/transport.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "greid/error.hpp"

namespace greid {

// Nodes: 0 = source, 1..m = supply rows, m+1..m+n = demand columns, m+n+1 = sink.
// Row->column arcs are uncapacitated; their residual reverse arcs carry the current flow.
double min_cost_transport(std::span<const long long> supply, std::span<const long long> demand,
                          std::span<const double> cost) {
    const std::size_t m = supply.size(), n = demand.size();
    if (cost.size() != m * n) throw Error("invalid-argument", "transport cost matrix has wrong size");
    if (std::accumulate(supply.begin(), supply.end(), 0LL) != std::accumulate(demand.begin(), demand.end(), 0LL)) {
        throw Error("invalid-argument", "transport supplies and demands differ");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t V = m + n + 2, src = 0, sink = m + n + 1;
    std::vector<long long> sup(supply.begin(), supply.end()), dem(demand.begin(), demand.end());
    std::vector<long long> flow(m * n, 0);
    std::vector<double> pot(V, 0.0), dist(V);
    std::vector<std::size_t> prev(V);
    std::vector<char> done(V);
    double total = 0.0;

    auto relax = [&](std::size_t u, std::size_t v, double c) {
        if (done[v]) return;
        const double nd = dist[u] + c + pot[u] - pot[v];
        if (nd < dist[v]) {
            dist[v] = nd;
            prev[v] = u;
        }
    };

    while (true) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(done.begin(), done.end(), 0);
        dist[src] = 0.0;
        for (std::size_t iter = 0; iter < V; ++iter) {
            std::size_t u = V;
            for (std::size_t v = 0; v < V; ++v)
                if (!done[v] && dist[v] < inf && (u == V || dist[v] < dist[u])) u = v;
            if (u == V) break;
            done[u] = 1;
            if (u == sink) break;
            if (u == src) {
                for (std::size_t i = 0; i < m; ++i)
                    if (sup[i] > 0) relax(u, 1 + i, 0.0);
            } else if (u <= m) {
                const std::size_t i = u - 1;
                for (std::size_t j = 0; j < n; ++j) relax(u, 1 + m + j, cost[i * n + j]);
            } else if (u < sink) {
                const std::size_t j = u - 1 - m;
                for (std::size_t i = 0; i < m; ++i)
                    if (flow[i * n + j] > 0) relax(u, 1 + i, -cost[i * n + j]);
                if (dem[j] > 0) relax(u, sink, 0.0);
            }
        }
        if (dist[sink] == inf) break;
        // Only settled nodes get new potentials, shifted so reduced costs stay non-negative.
        for (std::size_t v = 0; v < V; ++v)
            if (done[v]) pot[v] += dist[v] - dist[sink];

        long long push = std::numeric_limits<long long>::max();
        for (std::size_t v = sink; v != src; v = prev[v]) {
            const std::size_t u = prev[v];
            if (u == src) {
                push = std::min(push, sup[v - 1]);
            } else if (v == sink) {
                push = std::min(push, dem[u - 1 - m]);
            } else if (u > m) {  // reverse arc column -> row
                push = std::min(push, flow[(v - 1) * n + (u - 1 - m)]);
            }
        }
        for (std::size_t v = sink; v != src; v = prev[v]) {
            const std::size_t u = prev[v];
            if (u == src) {
                sup[v - 1] -= push;
            } else if (v == sink) {
                dem[u - 1 - m] -= push;
            } else if (u <= m) {
                flow[(u - 1) * n + (v - 1 - m)] += push;
            } else {
                flow[(v - 1) * n + (u - 1 - m)] -= push;
            }
        }
    }
    for (std::size_t k = 0; k < m * n; ++k) total += static_cast<double>(flow[k]) * cost[k];
    return total;
}

double wasserstein1(std::span<const Vector> a, std::span<const Vector> b) {
    if (a.empty() || b.empty()) throw Error("invalid-argument", "wasserstein1 needs non-empty sets");
    const std::size_t m = a.size(), n = b.size();
    std::vector<double> cost(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = euclidean(a[i], b[j]);
    // Mass 1/m per row and 1/n per column, scaled by m*n to integers.
    const std::vector<long long> supply(m, static_cast<long long>(n));
    const std::vector<long long> demand(n, static_cast<long long>(m));
    return min_cost_transport(supply, demand, cost) / static_cast<double>(m * n);
}

}  // namespace greid
