#pragma once

#include "netboot/dataset.hpp"
#include "netboot/ensemble.hpp"
#include "netboot/resampling.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace netboot {

struct CiTestResult {
    bool independent = false;
    double pval = 0.0;
    double r = 0.0;          // sample partial correlation of (i, j) given S
    bool degenerate = false; // singular submatrix or |r| >= 1
};

// Fisher z test of i _||_ j | S from correlation matrix C and sample size n:
// statistic sqrt(n - |S| - 3) * |atanh(r)| against a standard normal.
CiTestResult fisher_z_test(const Eigen::MatrixXd& C, std::size_t i, std::size_t j, std::span<const std::size_t> S,
                           std::size_t n, double alpha);

using NodePair = std::pair<std::size_t, std::size_t>;  // always (min, max)

struct Skeleton {
    std::size_t p = 0;
    std::vector<std::uint8_t> adj;  // p x p, symmetric
    std::map<NodePair, std::vector<std::size_t>> sepsets;
    std::size_t degenerate_tests = 0;

    bool adjacent(std::size_t i, std::size_t j) const { return adj[i * p + j] != 0; }
    std::vector<NodePair> edges() const;
};

// PC-stable skeleton search: adjacency sets are frozen at the start of each
// conditioning level, pairs and conditioning sets are visited in lexicographic
// order, so the skeleton does not depend on variable order.
Skeleton pc_skeleton(const Eigen::MatrixXd& C, std::size_t n, double alpha, std::size_t max_cond);

// Edge marks: mark(i, j) set means an arrowhead may point at j from i. Both
// marks set is an undirected edge, one mark is a directed edge, none is no edge.
class Cpdag {
public:
    explicit Cpdag(std::size_t p = 0) : p_(p), mark_(p * p, 0) {}
    static Cpdag from_skeleton(const Skeleton& s);

    std::size_t size() const { return p_; }
    bool adjacent(std::size_t a, std::size_t b) const { return mark(a, b) || mark(b, a); }
    bool directed(std::size_t a, std::size_t b) const { return mark(a, b) && !mark(b, a); }
    bool undirected(std::size_t a, std::size_t b) const { return mark(a, b) && mark(b, a); }

    void add_undirected(std::size_t a, std::size_t b);
    // Turns the undirected edge a - b into a -> b.
    void orient(std::size_t a, std::size_t b) { mark_[b * p_ + a] = 0; }

    std::vector<NodePair> directed_edges() const;   // (from, to), lexicographic
    std::vector<NodePair> undirected_edges() const; // (min, max), lexicographic

    std::map<NodePair, std::vector<std::size_t>> sepsets;
    // Edges proposed in both directions by different v-structures; kept undirected.
    std::vector<NodePair> conflicts;

    bool locked(std::size_t a, std::size_t b) const;

private:
    bool mark(std::size_t a, std::size_t b) const { return mark_[a * p_ + b] != 0; }
    std::size_t p_;
    std::vector<std::uint8_t> mark_;
};

// V-structures i -> j <- k for non-adjacent i, k with j outside sepset(i, k),
// then Meek rules R1-R4 to a fixpoint.
Cpdag orient_cpdag(const Skeleton& skeleton);

// One fixpoint pass of Meek rules R1-R4 in fixed scan order. Returns true if
// any edge was oriented.
bool apply_meek_rules(Cpdag& g);

// Neighbors of v (any edge type) plus co-parents of v's directed children.
std::vector<std::size_t> markov_blanket(const Cpdag& g, std::size_t v);

struct PcEnsembleOptions {
    double alpha = 0.01;
    std::size_t max_cond = 3;
    double tau = 0.8;
    int threads = 1;
    bool keep_replicates = false;
};

struct BnEnsembleStats {
    std::vector<std::string> var_names;
    std::size_t p = 0;
    std::size_t n_valid = 0;
    std::vector<std::size_t> failed_replicates;
    ResamplePlan plan;
    PcEnsembleOptions options;
    // Counts over valid replicates, row-major p x p.
    std::vector<std::size_t> skeleton_count;  // symmetric
    std::vector<std::size_t> orient_count;    // [from][to], directed edges only
    std::vector<std::size_t> mb_count;        // [node][member]
    std::vector<SignedEdge> consensus;        // skeleton_freq >= tau; sign of full-data correlation
    std::vector<ReplicateAdjacency> replicates;

    double skeleton_freq(std::size_t i, std::size_t j) const { return freq(skeleton_count, i, j); }
    double orient_freq(std::size_t from, std::size_t to) const { return freq(orient_count, from, to); }
    double mb_freq(std::size_t node, std::size_t member) const { return freq(mb_count, node, member); }

private:
    double freq(const std::vector<std::size_t>& c, std::size_t a, std::size_t b) const {
        return static_cast<double>(c[a * p + b]) / static_cast<double>(n_valid);
    }
};

// Per replicate: draw, correlate, pc_skeleton, orient_cpdag, Markov blankets.
// Same stability rule and determinism contract as run_ensemble_ggm.
BnEnsembleStats run_ensemble_pc(const Dataset& d, const ResamplePlan& plan, const PcEnsembleOptions& opts);

}  // namespace netboot
