#pragma once

#include "netboot/ensemble.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netboot {

struct CentralityReport {
    std::vector<std::size_t> degree;
    std::vector<double> strength;     // sum of incident edge weights (signed)
    std::vector<double> betweenness;  // unweighted, normalized by (p-1)(p-2)/2
};

// Exact Brandes betweenness, parallel over source nodes. Sources are processed
// in fixed blocks folded in block order, so the result is identical for any
// thread count.
CentralityReport centrality(std::size_t p, std::span<const SignedEdge> edges, int threads = 1);

struct CommunityAssignment {
    std::vector<std::size_t> community;  // contiguous ids from 0, by first node
    double modularity = 0.0;
};

// Newman-Girvan modularity with edge weights |weight|. 0 for a graph without
// positive weight.
double modularity(std::size_t p, std::span<const SignedEdge> edges, std::span<const std::size_t> community);

// Louvain: local moves in a seed-derived node order, then aggregation, until no
// node moves. Weights are |weight|.
CommunityAssignment communities(std::size_t p, std::span<const SignedEdge> edges, std::uint64_t seed);

// Selection frequencies of one ensemble, enough for differential connectivity.
struct EnsembleSummary {
    std::vector<std::string> var_names;
    struct PairFreq {
        std::size_t i = 0, j = 0;
        double freq = 0.0;
    };
    std::vector<PairFreq> freqs;                   // pairs with freq > 0
    std::vector<ReplicateAdjacency> replicates;    // empty if not retained

    static EnsembleSummary of(const ConsensusNetwork& cn);
};

struct DifferentialReport {
    std::vector<std::string> var_names;
    struct PairDelta {
        std::size_t i = 0, j = 0;
        double dfreq = 0.0;  // freq_A - freq_B
    };
    std::vector<PairDelta> pairs;  // union of observed pairs, (i, j) ordered
    std::vector<double> dc;        // sum over u of |dfreq(v, u)|
    std::optional<std::vector<double>> pval;
};

// Node indices follow a.var_names; b is matched by variable name. With
// n_perm > 0, replicate adjacencies are swapped between groups per replicate
// index (each with probability 1/2) and dc recomputed; pval is the add-one
// proportion of permutations with dc >= observed. Throws DataError on a
// variable-set mismatch or when replicates are missing or of unequal count.
DifferentialReport differential(const EnsembleSummary& a, const EnsembleSummary& b, std::size_t n_perm,
                                std::uint64_t seed, int threads = 1);

}  // namespace netboot
