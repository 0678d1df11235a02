#pragma once

#include "netboot/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace netboot {

// Correlation matrix of the given rows (with multiplicity) of x. The rows are
// re-standardized with their own mean and n-1 sd before forming X'X/(m-1).
// Throws DataError when fewer than 3 distinct rows are given or a column has
// no variance within the rows.
Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x, std::span<const std::size_t> rows);
Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x);

// Largest off-diagonal magnitude; the smallest penalty giving an empty graph.
double lambda_max(const Eigen::MatrixXd& S);

struct GlassoOptions {
    double tol = 1e-4;       // convergence when duality gap <= tol * p
    int max_iter = 500;      // outer sweeps
    double inner_tol = 1e-6; // max coefficient change in a lasso subproblem
    int inner_max_iter = 1000;
    bool record_trace = false;
};

struct PrecisionEstimate {
    Eigen::MatrixXd theta;
    Eigen::MatrixXd w;  // inverse of theta
    double lambda = 0.0;
    bool converged = false;
    int iterations = 0;
    double duality_gap = 0.0;
    // log det of the working covariance after each sweep (record_trace only).
    std::vector<double> logdet_trace;
};

// Graphical lasso by block coordinate descent over columns, each column a
// lasso solved by cyclic coordinate descent with warm starts. Maximizes
//   log det(Theta) - tr(S Theta) - lambda * sum_{i != j} |theta_ij|
// with the diagonal unpenalized. Non-convergence is reported through
// `converged`, not thrown. Throws NumericalError when lambda == 0 and S is
// singular, UsageError for a negative lambda or non-square S.
PrecisionEstimate glasso(const Eigen::MatrixXd& S, double lambda, const GlassoOptions& opts = {});

// Stationarity residual of (S, lambda) at est.theta, using est.w as its inverse:
// the largest violation over all entries of W - S - lambda * Gamma = 0, where
// Gamma is a subgradient of the off-diagonal l1 norm.
double kkt_residual(const Eigen::MatrixXd& S, const PrecisionEstimate& est);

struct NetworkEstimate {
    Eigen::MatrixXd pcor;  // zero diagonal
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;
};

inline constexpr double kEdgeThreshold = 1e-8;

// pcor_ij = -theta_ij / sqrt(theta_ii theta_jj); edge iff |theta_ij| > 1e-8.
NetworkEstimate to_network(const Eigen::MatrixXd& theta);
// Throws UsageError if est did not converge.
NetworkEstimate to_network(const PrecisionEstimate& est);

}  // namespace netboot
