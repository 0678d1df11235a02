#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace netboot {

struct EdgeInput {
    std::size_t u = 0, v = 0;
    int sign = 1;
};

// Simple undirected graph with +1/-1 edge signs in compressed adjacency form.
// Neighbor lists are sorted ascending.
class SignedGraph {
public:
    SignedGraph() = default;
    // Throws UsageError on self-loops, repeated pairs, out-of-range nodes or
    // signs other than +1/-1.
    SignedGraph(std::size_t p, std::span<const EdgeInput> edges);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return nbr_.size() / 2; }
    std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {nbr_.data() + offsets_[v], degree(v)};
    }
    std::span<const std::int8_t> signs(std::size_t v) const { return {sgn_.data() + offsets_[v], degree(v)}; }
    // Position of v's first arc in the concatenated adjacency lists; arcs are
    // numbered 0..2m-1 in node order.
    std::size_t arc_offset(std::size_t v) const { return offsets_[v]; }

    bool adjacent(std::size_t u, std::size_t v) const { return sign(u, v) != 0; }
    // Sign of edge u-v, or 0 when absent.
    int sign(std::size_t u, std::size_t v) const;

    std::vector<EdgeInput> edges() const;  // u < v, lexicographic

private:
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> nbr_;
    std::vector<std::int8_t> sgn_;
};

}  // namespace netboot
