#include "netboot/error.hpp"
#include "netboot/netanalysis.hpp"
#include "netboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace netboot {

namespace {

// Weighted graph for one Louvain level; self-loops carry aggregated internal weight.
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // includes self-loops once
    std::vector<double> self;                                      // self-loop weight
    double total = 0.0;                                            // 2m

    double degree(std::size_t v) const {
        double k = 2.0 * self[v];
        for (auto [u, w] : adj[v])
            if (u != v) k += w;
        return k;
    }
};

// One round of local moves. Returns true if any node changed community.
bool local_moves(const LevelGraph& g, std::vector<std::size_t>& comm, Xoshiro256& rng) {
    const std::size_t n = g.n;
    std::vector<double> tot(n, 0.0), k(n);
    for (std::size_t v = 0; v < n; ++v) {
        k[v] = g.degree(v);
        tot[comm[v]] += k[v];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);

    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (auto v : order) {
            const auto own = comm[v];
            touched.clear();
            for (auto [u, w] : g.adj[v]) {
                if (u == v) continue;
                const auto c = comm[u];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w;
            }
            tot[own] -= k[v];
            const double m2 = g.total;
            auto gain = [&](std::size_t c) { return link[c] - tot[c] * k[v] / m2; };
            std::size_t best = own;
            double best_gain = gain(own);
            std::sort(touched.begin(), touched.end());
            for (auto c : touched) {
                const double gc = gain(c);
                if (gc > best_gain + 1e-12) {
                    best = c;
                    best_gain = gc;
                }
            }
            tot[best] += k[v];
            for (auto c : touched) link[c] = 0.0;
            link[own] = 0.0;
            if (best != own) {
                comm[v] = best;
                improved = true;
                any = true;
            }
        }
    }
    return any;
}

std::vector<std::size_t> renumber(const std::vector<std::size_t>& comm) {
    std::map<std::size_t, std::size_t> ids;
    std::vector<std::size_t> out(comm.size());
    for (std::size_t v = 0; v < comm.size(); ++v) {
        auto [it, inserted] = ids.emplace(comm[v], ids.size());
        out[v] = it->second;
    }
    return out;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& comm, std::size_t nc) {
    std::vector<std::map<std::size_t, double>> acc(nc);
    LevelGraph h;
    h.n = nc;
    h.self.assign(nc, 0.0);
    h.total = g.total;
    for (std::size_t v = 0; v < g.n; ++v) {
        h.self[comm[v]] += g.self[v];
        for (auto [u, w] : g.adj[v]) {
            if (u == v) continue;
            if (comm[u] == comm[v]) {
                h.self[comm[v]] += 0.5 * w;  // each internal edge is seen from both ends
            } else {
                acc[comm[v]][comm[u]] += w;
            }
        }
    }
    h.adj.resize(nc);
    for (std::size_t c = 0; c < nc; ++c)
        for (auto [d, w] : acc[c]) h.adj[c].emplace_back(d, w);
    return h;
}

}  // namespace

double modularity(std::size_t p, std::span<const SignedEdge> edges, std::span<const std::size_t> community) {
    if (community.size() != p) throw UsageError("community vector length must equal node count");
    double m = 0.0;
    std::vector<double> k(p, 0.0);
    std::map<std::size_t, double> internal, tot;
    for (const auto& e : edges) {
        const double w = std::abs(e.weight);
        m += w;
        k[e.i] += w;
        k[e.j] += w;
        if (community[e.i] == community[e.j]) internal[community[e.i]] += w;
    }
    if (m <= 0.0) return 0.0;
    for (std::size_t v = 0; v < p; ++v) tot[community[v]] += k[v];
    double q = 0.0;
    for (auto [c, t] : tot) {
        const double in = internal.count(c) ? internal[c] : 0.0;
        q += in / m - (t / (2.0 * m)) * (t / (2.0 * m));
    }
    return q;
}

CommunityAssignment communities(std::size_t p, std::span<const SignedEdge> edges, std::uint64_t seed) {
    CommunityAssignment out;
    out.community.resize(p);
    std::iota(out.community.begin(), out.community.end(), std::size_t{0});

    LevelGraph g;
    g.n = p;
    g.adj.resize(p);
    g.self.assign(p, 0.0);
    for (const auto& e : edges) {
        if (e.i >= p || e.j >= p || e.i == e.j) throw UsageError("invalid edge in network");
        const double w = std::abs(e.weight);
        if (w == 0.0) continue;
        g.adj[e.i].emplace_back(e.j, w);
        g.adj[e.j].emplace_back(e.i, w);
        g.total += 2.0 * w;
    }
    if (g.total <= 0.0) return out;

    Xoshiro256 rng(splitmix64(seed));
    std::vector<std::size_t> membership = out.community;  // original node -> current level node
    while (true) {
        std::vector<std::size_t> comm(g.n);
        std::iota(comm.begin(), comm.end(), std::size_t{0});
        if (!local_moves(g, comm, rng)) break;
        comm = renumber(comm);
        const std::size_t nc = *std::max_element(comm.begin(), comm.end()) + 1;
        for (auto& m : membership) m = comm[m];
        if (nc == g.n) break;
        g = aggregate(g, comm, nc);
    }
    out.community = renumber(membership);
    out.modularity = modularity(p, edges, out.community);
    return out;
}

}  // namespace netboot
