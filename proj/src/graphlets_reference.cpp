// Brute-force orbit counts by enumerating every node subset of size <= 4.
// Slow on purpose: it shares no code path with gdvm_unsigned/gdvm_signed.

#include "netboot/error.hpp"
#include "netboot/graphlets.hpp"

#include <array>
#include <bit>
#include <cstdint>

namespace netboot {

namespace {

struct Dense {
    std::size_t p;
    std::vector<std::uint64_t> adj;  // bitmask per node
    std::vector<std::int8_t> sign;   // p x p

    explicit Dense(const SignedGraph& g) : p(g.size()), adj(p, 0), sign(p * p, 0) {
        for (const auto& e : g.edges()) {
            adj[e.u] |= std::uint64_t{1} << e.v;
            adj[e.v] |= std::uint64_t{1} << e.u;
            sign[e.u * p + e.v] = sign[e.v * p + e.u] = static_cast<std::int8_t>(e.sign);
        }
    }
    bool edge(std::size_t a, std::size_t b) const { return (adj[a] >> b) & 1U; }
    int s(std::size_t a, std::size_t b) const { return sign[a * p + b]; }
};

int neg(int s) { return s < 0 ? 1 : 0; }

bool connected(const Dense& d, const std::array<std::size_t, 4>& nodes, std::size_t k) {
    std::uint64_t set = 0;
    for (std::size_t i = 0; i < k; ++i) set |= std::uint64_t{1} << nodes[i];
    std::uint64_t seen = std::uint64_t{1} << nodes[0];
    std::uint64_t frontier = seen;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::size_t i = 0; i < k; ++i)
            if ((frontier >> nodes[i]) & 1U) next |= d.adj[nodes[i]] & set;
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == set;
}

}  // namespace

OrbitMatrix brute_force_oracle(const SignedGraph& g, int max_size, bool is_signed) {
    if (g.size() > kBruteForceMaxNodes) throw UsageError("brute-force oracle is limited to 64 nodes");
    if (max_size != 3 && max_size != 4) throw UsageError("brute-force oracle supports graphlets of 3 or 4 nodes");
    if (is_signed && max_size != 3) throw UsageError("signed orbits are defined for graphlets up to 3 nodes");

    const Dense d(g);
    const std::size_t p = d.p;
    OrbitMatrix out(p, is_signed ? kSignedOrbits : kUnsignedOrbits);

    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            if (!d.edge(i, j)) continue;
            if (is_signed) {
                const int c = neg(d.s(i, j));
                ++out(i, c);
                ++out(j, c);
            } else {
                ++out(i, 0);
                ++out(j, 0);
            }
        }

    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            for (std::size_t k = j + 1; k < p; ++k) {
                const std::array<std::size_t, 3> v{i, j, k};
                std::array<int, 3> deg{};
                int edges = 0;
                for (int a = 0; a < 3; ++a)
                    for (int b = a + 1; b < 3; ++b)
                        if (d.edge(v[a], v[b])) {
                            ++deg[a];
                            ++deg[b];
                            ++edges;
                        }
                if (edges < 2) continue;
                for (int a = 0; a < 3; ++a) {
                    const auto x = v[a];
                    const auto y = v[(a + 1) % 3];
                    const auto z = v[(a + 2) % 3];
                    if (edges == 3) {
                        if (is_signed)
                            ++out(x, 9 + 2 * (neg(d.s(x, y)) + neg(d.s(x, z))) + neg(d.s(y, z)));
                        else
                            ++out(x, 3);
                    } else if (deg[a] == 2) {
                        if (is_signed)
                            ++out(x, 6 + neg(d.s(x, y)) + neg(d.s(x, z)));
                        else
                            ++out(x, 2);
                    } else {
                        // x is a path end; its single neighbor is the center.
                        const auto center = d.edge(x, y) ? y : z;
                        const auto far = center == y ? z : y;
                        if (is_signed)
                            ++out(x, 2 + 2 * neg(d.s(x, center)) + neg(d.s(center, far)));
                        else
                            ++out(x, 1);
                    }
                }
            }

    if (max_size < 4) return out;

    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            for (std::size_t k = j + 1; k < p; ++k)
                for (std::size_t l = k + 1; l < p; ++l) {
                    const std::array<std::size_t, 4> v{i, j, k, l};
                    std::array<int, 4> deg{};
                    int edges = 0;
                    for (int a = 0; a < 4; ++a)
                        for (int b = a + 1; b < 4; ++b)
                            if (d.edge(v[a], v[b])) {
                                ++deg[a];
                                ++deg[b];
                                ++edges;
                            }
                    if (edges < 3 || !connected(d, v, 4)) continue;
                    int max_deg = 0;
                    for (int a : deg) max_deg = std::max(max_deg, a);
                    for (int a = 0; a < 4; ++a) {
                        int orbit = -1;
                        switch (edges) {
                        case 3:
                            if (max_deg == 3) orbit = deg[a] == 3 ? 7 : 6;
                            else orbit = deg[a] == 1 ? 4 : 5;
                            break;
                        case 4:
                            if (max_deg == 3) orbit = deg[a] == 1 ? 9 : (deg[a] == 2 ? 10 : 11);
                            else orbit = 8;
                            break;
                        case 5: orbit = deg[a] == 2 ? 12 : 13; break;
                        case 6: orbit = 14; break;
                        default: break;
                        }
                        ++out(v[a], static_cast<std::size_t>(orbit));
                    }
                }
    return out;
}

}  // namespace netboot
