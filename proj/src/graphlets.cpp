#include "netboot/graphlets.hpp"

#include "netboot/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace netboot {

const std::array<std::string, kUnsignedOrbits>& unsigned_orbit_names() {
    static const std::array<std::string, kUnsignedOrbits> names = {
        "o0", "o1", "o2", "o3", "o4", "o5", "o6", "o7", "o8", "o9", "o10", "o11", "o12", "o13", "o14"};
    return names;
}

const std::array<std::string, kSignedOrbits>& signed_orbit_names() {
    static const std::array<std::string, kSignedOrbits> names = {
        "o0_p",    "o0_n",    "o1_pp",   "o1_pn",   "o1_np",   "o1_nn",   "o2_pp",  "o2_pn",
        "o2_nn",   "o3_pp_p", "o3_pp_n", "o3_pn_p", "o3_pn_n", "o3_nn_p", "o3_nn_n"};
    return names;
}

std::int64_t OrbitMatrix::column_sum(std::size_t c) const {
    std::int64_t s = 0;
    for (std::size_t r = 0; r < rows; ++r) s += (*this)(r, c);
    return s;
}

namespace {

// Common-neighbor count for every arc (triangles through each edge).
std::vector<std::int64_t> arc_triangles(const SignedGraph& g, int threads) {
    std::vector<std::int64_t> tri(2 * g.edge_count(), 0);
    const auto p = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
    for (std::ptrdiff_t xi = 0; xi < p; ++xi) {
        const auto x = static_cast<std::size_t>(xi);
        const auto nx = g.neighbors(x);
        for (std::size_t a = 0; a < nx.size(); ++a) {
            const auto ny = g.neighbors(nx[a]);
            std::int64_t c = 0;
            for (std::size_t i = 0, j = 0; i < nx.size() && j < ny.size();) {
                if (nx[i] == ny[j]) {
                    ++c;
                    ++i;
                    ++j;
                } else if (nx[i] < ny[j]) {
                    ++i;
                } else {
                    ++j;
                }
            }
            tri[g.arc_offset(x) + a] = c;
        }
    }
    return tri;
}

inline int neg(int s) { return s < 0 ? 1 : 0; }

}  // namespace

OrbitMatrix gdvm_unsigned(const SignedGraph& g, int threads) {
    if (threads < 1) throw UsageError("threads must be positive");
    const std::size_t p = g.size();
    OrbitMatrix out(p, kUnsignedOrbits);
    const auto tri = arc_triangles(g, threads);

#pragma omp parallel num_threads(threads)
    {
        std::vector<std::uint8_t> in_nx(p, 0), in_pair(p, 0);
        std::vector<std::int64_t> common(p, 0);
        std::vector<std::uint32_t> touched;
        std::vector<std::uint32_t> pair_list;

#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t xi = 0; xi < static_cast<std::ptrdiff_t>(p); ++xi) {
            const auto x = static_cast<std::size_t>(xi);
            const auto nx = g.neighbors(x);
            const auto dx = static_cast<std::int64_t>(nx.size());
            const std::size_t off_x = g.arc_offset(x);
            for (auto y : nx) in_nx[y] = 1;

            // Non-induced counts; each f_a_b combines orbit a with the denser
            // orbits it can be part of, and is resolved by the system below.
            std::int64_t f12_14 = 0, f10_13 = 0, f13_14 = 0, f11_13 = 0, f7_11 = 0, f5_8 = 0;
            std::int64_t f6_9 = 0, f9_12 = 0, f4_8 = 0, f8_12 = 0;
            std::int64_t o1 = 0, o2 = 0, o3 = 0;

            // Triangles x-y-z seen from x, and common-neighbor counts of x with
            // each node at distance two.
            for (std::size_t a = 0; a < nx.size(); ++a) {
                const auto y = nx[a];
                const auto ny = g.neighbors(y);
                const auto dy = static_cast<std::int64_t>(ny.size());
                const std::size_t off_y = g.arc_offset(y);
                for (std::size_t b = 0; b < ny.size(); ++b) {
                    const auto z = ny[b];
                    if (z == x) continue;
                    if (in_nx[z]) {
                        if (z < y) {
                            const auto t_yz = tri[off_y + b];
                            const auto dz = static_cast<std::int64_t>(g.degree(z));
                            f12_14 += t_yz - 1;
                            f10_13 += (dy - 1 - t_yz) + (dz - 1 - t_yz);
                        }
                    } else {
                        if (common[z] == 0) touched.push_back(z);
                        ++common[z];
                    }
                }
            }

            // Pairs of neighbors: x as a triangle corner or a path center.
            for (std::size_t a = 0; a < nx.size(); ++a) {
                const auto y = nx[a];
                const auto t_xy = tri[off_x + a];
                const auto dy = static_cast<std::int64_t>(g.degree(y));
                for (std::size_t b = a + 1; b < nx.size(); ++b) {
                    const auto z = nx[b];
                    const auto t_xz = tri[off_x + b];
                    if (g.adjacent(y, z)) {
                        ++o3;
                        f13_14 += (t_xy - 1) + (t_xz - 1);
                        f11_13 += (dx - 1 - t_xy) + (dx - 1 - t_xz);
                    } else {
                        const auto dz = static_cast<std::int64_t>(g.degree(z));
                        ++o2;
                        f7_11 += (dx - 2 - t_xy) + (dx - 2 - t_xz);
                        f5_8 += (dy - 1 - t_xy) + (dz - 1 - t_xz);
                    }
                }
            }

            // Induced paths x-y-z: x as a path end.
            for (std::size_t a = 0; a < nx.size(); ++a) {
                const auto y = nx[a];
                const auto t_xy = tri[off_x + a];
                const auto ny = g.neighbors(y);
                const auto dy = static_cast<std::int64_t>(ny.size());
                const std::size_t off_y = g.arc_offset(y);
                for (std::size_t b = 0; b < ny.size(); ++b) {
                    const auto z = ny[b];
                    if (z == x || in_nx[z]) continue;
                    const auto t_yz = tri[off_y + b];
                    ++o1;
                    f6_9 += dy - 2 - t_xy;
                    f9_12 += t_yz;
                    f4_8 += static_cast<std::int64_t>(g.degree(z)) - 1 - t_yz;
                    f8_12 += common[z] - 1;
                }
            }

            // 4-cliques containing x: triangles inside N(x).
            std::int64_t k4 = 0;
            for (auto y : nx) {
                pair_list.clear();
                for (auto z : g.neighbors(y))
                    if (z > y && in_nx[z]) pair_list.push_back(z);
                for (auto z : pair_list) in_pair[z] = 1;
                for (auto z : pair_list)
                    for (auto w : g.neighbors(z))
                        if (w > z && in_pair[w]) ++k4;
                for (auto z : pair_list) in_pair[z] = 0;
            }

            for (auto y : nx) in_nx[y] = 0;
            for (auto z : touched) common[z] = 0;
            touched.clear();

            auto row = [&](std::size_t k) -> std::int64_t& { return out(x, k); };
            row(0) = dx;
            row(1) = o1;
            row(2) = o2;
            row(3) = o3;
            row(14) = k4;
            row(13) = (f13_14 - 6 * k4) / 2;
            row(12) = f12_14 - 3 * k4;
            row(11) = (f11_13 - f13_14 + 6 * k4) / 2;
            row(10) = f10_13 - f13_14 + 6 * k4;
            row(9) = (f9_12 - 2 * f12_14 + 6 * k4) / 2;
            row(8) = (f8_12 - 2 * f12_14 + 6 * k4) / 2;
            row(7) = (f13_14 + f7_11 - f11_13 - 6 * k4) / 6;
            row(6) = (2 * f12_14 + f6_9 - f9_12 - 6 * k4) / 2;
            row(5) = 2 * f12_14 + f5_8 - f8_12 - 6 * k4;
            row(4) = 2 * f12_14 + f4_8 - f8_12 - 6 * k4;
        }
    }
    return out;
}

OrbitMatrix gdvm_signed(const SignedGraph& g, int threads) {
    if (threads < 1) throw UsageError("threads must be positive");
    const std::size_t p = g.size();
    OrbitMatrix out(p, kSignedOrbits);

#pragma omp parallel num_threads(threads)
    {
        std::vector<std::int8_t> sign_to_x(p, 0);

#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t xi = 0; xi < static_cast<std::ptrdiff_t>(p); ++xi) {
            const auto x = static_cast<std::size_t>(xi);
            const auto nx = g.neighbors(x);
            const auto sx = g.signs(x);
            std::int64_t d_pos = 0, d_neg = 0;
            for (std::size_t a = 0; a < nx.size(); ++a) {
                sign_to_x[nx[a]] = sx[a];
                (sx[a] > 0 ? d_pos : d_neg)++;
            }
            std::int64_t* row = &out(x, 0);
            row[0] = d_pos;
            row[1] = d_neg;

            for (std::size_t a = 0; a < nx.size(); ++a) {
                const auto y = nx[a];
                const int s_xy = sx[a];
                const auto ny = g.neighbors(y);
                const auto sy = g.signs(y);
                for (std::size_t b = 0; b < ny.size(); ++b) {
                    const auto z = ny[b];
                    if (z == x) continue;
                    const int s_yz = sy[b];
                    const int s_xz = sign_to_x[z];
                    if (s_xz != 0) {
                        if (z > y) ++row[9 + 2 * (neg(s_xy) + neg(s_xz)) + neg(s_yz)];
                    } else {
                        ++row[2 + 2 * neg(s_xy) + neg(s_yz)];
                    }
                }
            }

            // Neighbor pairs by incident sign multiset, minus those closed into triangles.
            const std::int64_t tri_pp = row[9] + row[10];
            const std::int64_t tri_pn = row[11] + row[12];
            const std::int64_t tri_nn = row[13] + row[14];
            row[6] = d_pos * (d_pos - 1) / 2 - tri_pp;
            row[7] = d_pos * d_neg - tri_pn;
            row[8] = d_neg * (d_neg - 1) / 2 - tri_nn;

            for (auto y : nx) sign_to_x[y] = 0;
        }
    }
    return out;
}

OrbitMatrix collapse_signs(const OrbitMatrix& signed_counts) {
    if (signed_counts.cols != kSignedOrbits) throw UsageError("expected a signed orbit matrix");
    OrbitMatrix out(signed_counts.rows, 4);
    for (std::size_t r = 0; r < signed_counts.rows; ++r)
        for (std::size_t c = 0; c < kSignedOrbits; ++c) out(r, kSignedToUnsigned[c]) += signed_counts(r, c);
    return out;
}

std::array<double, kUnsignedOrbits> orbit_weights() {
    std::array<double, kUnsignedOrbits> w{};
    for (std::size_t k = 0; k < kUnsignedOrbits; ++k)
        w[k] = 1.0 - std::log(static_cast<double>(kOrbitDependencies[k])) / std::log(15.0);
    return w;
}

double gdv_similarity(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                      std::span<const double> weights) {
    if (a.size() != b.size() || a.size() != weights.size())
        throw UsageError("graphlet degree vectors and weights must have equal length");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto ak = static_cast<double>(a[k]);
        const auto bk = static_cast<double>(b[k]);
        num += weights[k] * std::abs(std::log(ak + 1.0) - std::log(bk + 1.0));
        den += weights[k] * std::log(std::max(ak, bk) + 2.0);
    }
    if (den <= 0.0) return 1.0;
    return 1.0 - num / den;
}

double gdv_similarity(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    const auto w = orbit_weights();
    return gdv_similarity(a, b, w);
}

}  // namespace netboot
