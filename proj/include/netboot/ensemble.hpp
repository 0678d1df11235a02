#pragma once

#include "netboot/dataset.hpp"
#include "netboot/ggm.hpp"
#include "netboot/resampling.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace netboot {

// Penalty selection for the whole ensemble. The value is resolved once on the
// full dataset and held fixed across replicates.
//   scale_of_max: value * lambda_max
//   fixed:        value
//   calibrated:   max(value * lambda_max, null_correlation_bound(n, P, alpha)), P = p(p-1)/2
struct LambdaRule {
    enum class Kind { calibrated, scale_of_max, fixed };
    Kind kind = Kind::calibrated;
    double value = 0.2;

    double resolve(const Eigen::MatrixXd& full_correlation, std::size_t n, double alpha) const;
};

// Bonferroni bound on |r| for P independent pairs at level alpha, through the
// Fisher transform: tanh(z_{1 - alpha/(2P)} / sqrt(n - 3)). 0 when n <= 3.
double null_correlation_bound(std::size_t n, std::size_t pairs, double alpha);

const char* to_string(LambdaRule::Kind kind);

struct GgmEnsembleOptions {
    LambdaRule lambda;
    double tau = 0.8;
    double alpha = 0.05;
    int threads = 1;
    bool keep_replicates = false;
    GlassoOptions glasso;
};

struct EdgeStats {
    std::size_t i = 0, j = 0;  // i < j
    std::size_t selected = 0;  // replicates with the edge
    std::size_t n_valid = 0;
    double freq = 0.0;
    double pcor_mean = 0.0;
    std::optional<double> ci_lo, ci_hi;
    double pval = 1.0;
    double padj = 1.0;
    int sign = 1;
};

struct SignedEdge {
    std::size_t i = 0, j = 0;
    double weight = 0.0;
    int sign = 1;
};

// Edge list of one replicate network; retained only on request.
struct ReplicateAdjacency {
    std::size_t replicate_id = 0;
    bool valid = false;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct ConsensusNetwork {
    std::vector<std::string> var_names;
    std::vector<EdgeStats> edges;  // every pair with freq > 0, ordered by (i, j)
    std::vector<SignedEdge> graph; // pairs with freq >= tau
    double tau = 0.8;
    double alpha = 0.05;
    double lambda = 0.0;
    LambdaRule lambda_rule;
    ResamplePlan plan;
    std::size_t n_valid = 0;
    std::vector<std::size_t> failed_replicates;
    std::size_t bh_tests = 0;
    std::vector<ReplicateAdjacency> replicates;  // empty unless keep_replicates
};

// Smallest number of valid replicates an ensemble of B may finish with:
// fewer than max(10, B/2) is an unstable ensemble.
bool ensemble_is_stable(std::size_t n_valid, std::size_t B);

// Per replicate: draw rows, restrict, re-standardize, correlate, glasso, threshold.
// Replicates whose correlation is degenerate or whose glasso fails to converge
// are excluded from every denominator. Output does not depend on `threads`.
// Throws NumericalError("ensemble unstable ...") when too few replicates survive.
ConsensusNetwork run_ensemble_ggm(const Dataset& d, const ResamplePlan& plan, const GgmEnsembleOptions& opts);

// Aggregation step, exposed for testing. `samples[k]` holds the non-zero
// partial correlations of pair k as (replicate order) values; pairs are indexed
// by the upper-triangle enumeration of p variables.
struct PairSamples {
    std::size_t i = 0, j = 0;
    std::vector<double> nonzero;  // one per replicate that selected the pair
};

std::vector<EdgeStats> aggregate_edges(const std::vector<PairSamples>& pairs, std::size_t n_valid, double alpha);

}  // namespace netboot
