#include "netboot/error.hpp"
#include "netboot/netanalysis.hpp"

#include <omp.h>

#include <algorithm>

namespace netboot {

namespace {

constexpr std::size_t kSourceBlock = 64;

std::vector<std::vector<std::size_t>> adjacency_lists(std::size_t p, std::span<const SignedEdge> edges) {
    std::vector<std::vector<std::size_t>> adj(p);
    for (const auto& e : edges) {
        if (e.i >= p || e.j >= p || e.i == e.j) throw UsageError("invalid edge in network");
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

}  // namespace

CentralityReport centrality(std::size_t p, std::span<const SignedEdge> edges, int threads) {
    if (threads < 1) throw UsageError("threads must be positive");
    const auto adj = adjacency_lists(p, edges);

    CentralityReport rep;
    rep.degree.resize(p);
    rep.strength.assign(p, 0.0);
    for (std::size_t v = 0; v < p; ++v) rep.degree[v] = adj[v].size();
    for (const auto& e : edges) {
        rep.strength[e.i] += e.weight;
        rep.strength[e.j] += e.weight;
    }

    std::vector<double> total(p, 0.0);
    const auto blocks = static_cast<std::ptrdiff_t>((p + kSourceBlock - 1) / kSourceBlock);

#pragma omp parallel num_threads(threads)
    {
        std::vector<double> partial(p), sigma(p), delta(p);
        std::vector<long> dist(p);
        std::vector<std::size_t> order, queue;
        order.reserve(p);
        queue.reserve(p);

#pragma omp for ordered schedule(static, 1)
        for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
            std::fill(partial.begin(), partial.end(), 0.0);
            const std::size_t first = static_cast<std::size_t>(blk) * kSourceBlock;
            const std::size_t last = std::min(p, first + kSourceBlock);
            for (std::size_t s = first; s < last; ++s) {
                std::fill(sigma.begin(), sigma.end(), 0.0);
                std::fill(delta.begin(), delta.end(), 0.0);
                std::fill(dist.begin(), dist.end(), -1L);
                order.clear();
                queue.clear();
                sigma[s] = 1.0;
                dist[s] = 0;
                queue.push_back(s);
                for (std::size_t head = 0; head < queue.size(); ++head) {
                    const auto v = queue[head];
                    order.push_back(v);
                    for (auto w : adj[v]) {
                        if (dist[w] < 0) {
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
                    }
                }
                for (auto it = order.rbegin(); it != order.rend(); ++it) {
                    const auto w = *it;
                    for (auto v : adj[w])
                        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                    if (w != s) partial[w] += delta[w];
                }
            }
#pragma omp ordered
            for (std::size_t v = 0; v < p; ++v) total[v] += partial[v];
        }
    }

    rep.betweenness.assign(p, 0.0);
    if (p >= 3) {
        // Each unordered pair is seen from both endpoints.
        const double norm = static_cast<double>(p - 1) * static_cast<double>(p - 2);
        for (std::size_t v = 0; v < p; ++v) rep.betweenness[v] = total[v] / norm;
    }
    return rep;
}

}  // namespace netboot
