#include "netboot/error.hpp"
#include "netboot/netanalysis.hpp"
#include "netboot/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace netboot {

EnsembleSummary EnsembleSummary::of(const ConsensusNetwork& cn) {
    EnsembleSummary s;
    s.var_names = cn.var_names;
    for (const auto& e : cn.edges) s.freqs.push_back({e.i, e.j, e.freq});
    s.replicates = cn.replicates;
    return s;
}

namespace {

std::vector<std::size_t> match_names(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) throw DataError("networks have different variable counts");
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < a.size(); ++i) pos.emplace(a[i], i);
    std::vector<std::size_t> map(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto it = pos.find(b[i]);
        if (it == pos.end()) throw DataError("variable '" + b[i] + "' is not present in both networks");
        map[i] = it->second;
    }
    return map;
}

// dc from two dense p x p frequency matrices.
std::vector<double> connectivity_change(const std::vector<double>& fa, const std::vector<double>& fb, std::size_t p) {
    std::vector<double> dc(p, 0.0);
    for (std::size_t v = 0; v < p; ++v)
        for (std::size_t u = 0; u < p; ++u)
            if (u != v) dc[v] += std::abs(fa[v * p + u] - fb[v * p + u]);
    return dc;
}

// Dense frequency matrix from a set of replicate adjacencies.
void replicate_freqs(const std::vector<const ReplicateAdjacency*>& reps, std::size_t p, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    std::size_t valid = 0;
    for (const auto* r : reps) {
        if (!r->valid) continue;
        ++valid;
        for (auto [i, j] : r->edges) {
            out[i * p + j] += 1.0;
            out[j * p + i] += 1.0;
        }
    }
    if (valid == 0) return;
    for (auto& f : out) f /= static_cast<double>(valid);
}

}  // namespace

DifferentialReport differential(const EnsembleSummary& a, const EnsembleSummary& b, std::size_t n_perm,
                                std::uint64_t seed, int threads) {
    if (threads < 1) throw UsageError("threads must be positive");
    const auto map_b = match_names(a.var_names, b.var_names);
    const std::size_t p = a.var_names.size();

    DifferentialReport rep;
    rep.var_names = a.var_names;

    using Key = std::pair<std::size_t, std::size_t>;
    std::map<Key, std::pair<double, double>> joint;
    auto key = [](std::size_t i, std::size_t j) { return i < j ? Key{i, j} : Key{j, i}; };
    for (const auto& f : a.freqs) joint[key(f.i, f.j)].first = f.freq;
    for (const auto& f : b.freqs) joint[key(map_b[f.i], map_b[f.j])].second = f.freq;

    rep.dc.assign(p, 0.0);
    for (const auto& [k, v] : joint) {
        const double d = v.first - v.second;
        rep.pairs.push_back({k.first, k.second, d});
        rep.dc[k.first] += std::abs(d);
        rep.dc[k.second] += std::abs(d);
    }

    if (n_perm == 0) return rep;
    if (a.replicates.empty() || b.replicates.empty())
        throw DataError("permutation test needs replicate adjacencies retained for both ensembles");
    if (a.replicates.size() != b.replicates.size())
        throw DataError("permutation test needs equal replicate counts in both ensembles");

    // Re-express B's replicates in A's node indexing.
    std::vector<ReplicateAdjacency> b_mapped = b.replicates;
    for (auto& r : b_mapped)
        for (auto& [i, j] : r.edges) {
            const auto u = map_b[i], v = map_b[j];
            i = std::min(u, v);
            j = std::max(u, v);
        }

    const std::size_t B = a.replicates.size();
    std::vector<std::size_t> exceed(p, 0);
    const auto obs = rep.dc;

#pragma omp parallel num_threads(threads)
    {
        std::vector<double> fa(p * p), fb(p * p);
        std::vector<const ReplicateAdjacency*> ga(B), gb(B);
        std::vector<std::size_t> local(p, 0);

#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t perm = 0; perm < static_cast<std::ptrdiff_t>(n_perm); ++perm) {
            Xoshiro256 rng(replicate_seed(seed, static_cast<std::uint64_t>(perm)));
            for (std::size_t r = 0; r < B; ++r) {
                const bool swap = (rng.next() >> 63) != 0;
                ga[r] = swap ? &b_mapped[r] : &a.replicates[r];
                gb[r] = swap ? &a.replicates[r] : &b_mapped[r];
            }
            replicate_freqs(ga, p, fa);
            replicate_freqs(gb, p, fb);
            const auto dc = connectivity_change(fa, fb, p);
            for (std::size_t v = 0; v < p; ++v)
                if (dc[v] >= obs[v] - 1e-12) ++local[v];
        }
#pragma omp critical(netboot_differential_merge)
        for (std::size_t v = 0; v < p; ++v) exceed[v] += local[v];
    }

    rep.pval.emplace(p);
    for (std::size_t v = 0; v < p; ++v)
        (*rep.pval)[v] = static_cast<double>(1 + exceed[v]) / static_cast<double>(n_perm + 1);
    return rep;
}

}  // namespace netboot
