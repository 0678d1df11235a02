#pragma once

#include "netboot/signed_graph.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace netboot {

// Node x orbit count matrix, row-major.
struct OrbitMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> data;

    OrbitMatrix() = default;
    OrbitMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    std::int64_t& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const std::int64_t> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::int64_t column_sum(std::size_t c) const;

    bool operator==(const OrbitMatrix&) const = default;
};

inline constexpr std::size_t kUnsignedOrbits = 15;
inline constexpr std::size_t kSignedOrbits = 15;

// Orbit numbering (graphlets up to 4 nodes):
//   0 edge | 1 end, 2 center of a 3-path | 3 triangle
//   4 end, 5 interior of a 4-path | 6 leaf, 7 center of a 3-star | 8 4-cycle
//   9 tail, 10 triangle node off the tail, 11 cut vertex of a tailed triangle
//   12 degree-2, 13 degree-3 node of a diamond | 14 4-clique
const std::array<std::string, kUnsignedOrbits>& unsigned_orbit_names();  // o0..o14

// Signed orbits over graphlets up to 3 nodes ("p" positive, "n" negative):
//   o0_p o0_n                      edge by sign
//   o1_pp o1_pn o1_np o1_nn        path end: (incident edge, far edge)
//   o2_pp o2_pn o2_nn              path center: incident sign multiset
//   o3_pp_p ... o3_nn_n            triangle corner: (incident multiset, opposite edge)
const std::array<std::string, kSignedOrbits>& signed_orbit_names();

// Signed column of each signed orbit's unsigned orbit (0..3).
inline constexpr std::array<std::size_t, kSignedOrbits> kSignedToUnsigned = {0, 0, 1, 1, 1, 1, 2, 2, 2,
                                                                             3, 3, 3, 3, 3, 3};

// Exact induced orbit counts 0-14 per node. Work per node is proportional to
// the sizes of its neighbors' adjacency lists; 4-node orbits come from a linear
// system over path/triangle statistics plus a node-local 4-clique count.
// Rows are independent, so the result does not depend on `threads`.
OrbitMatrix gdvm_unsigned(const SignedGraph& g, int threads = 1);

// Exact counts of the 15 signed orbits per node (columns as signed_orbit_names()).
OrbitMatrix gdvm_signed(const SignedGraph& g, int threads = 1);

inline constexpr std::size_t kBruteForceMaxNodes = 64;

// Enumerates every connected induced subgraph with at most max_size (3 or 4)
// nodes. Unsigned output has 15 columns (4-node orbits stay zero when
// max_size == 3); signed output requires max_size == 3. Throws UsageError for
// graphs over 64 nodes.
OrbitMatrix brute_force_oracle(const SignedGraph& g, int max_size, bool is_signed);

// Sums signed columns within each unsigned orbit: a p x 4 matrix for orbits 0-3.
OrbitMatrix collapse_signs(const OrbitMatrix& signed_counts);

// Orbit dependency counts o_k for orbits 0-14 and the derived weights
// w_k = 1 - log(o_k) / log(15).
inline constexpr std::array<int, kUnsignedOrbits> kOrbitDependencies = {1, 2, 2, 2, 3, 4, 3, 3,
                                                                       4, 3, 4, 4, 4, 4, 3};
std::array<double, kUnsignedOrbits> orbit_weights();

// 1 - sum_k w_k |log(a_k+1) - log(b_k+1)| / sum_k w_k log(max(a_k,b_k)+2).
double gdv_similarity(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                      std::span<const double> weights);
double gdv_similarity(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

}  // namespace netboot
