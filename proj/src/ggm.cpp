#include "netboot/ggm.hpp"

#include "netboot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace netboot {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// log det of a symmetric matrix, or nullopt-like NaN if it is not positive definite.
double logdet_spd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    const auto& L = llt.matrixL();
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double d = L(i, i);
        if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        s += std::log(d);
    }
    return 2.0 * s;
}

double offdiag_l1(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

// Precision matrix implied by the column regressions: theta_jj = 1/(w_jj - w12'beta),
// theta_{-j,j} = -beta * theta_jj, then symmetrized.
Eigen::MatrixXd theta_from_betas(const Eigen::MatrixXd& W, const Eigen::MatrixXd& B) {
    const auto p = W.rows();
    Eigen::MatrixXd theta(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double q = W(j, j);
        for (Eigen::Index k = 0; k < p; ++k)
            if (k != j) q -= W(k, j) * B(k, j);
        const double tjj = 1.0 / q;
        for (Eigen::Index k = 0; k < p; ++k) theta(k, j) = k == j ? tjj : -B(k, j) * tjj;
    }
    return 0.5 * (theta + theta.transpose());
}

}  // namespace

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto p = x.cols();
    {
        std::vector<std::size_t> distinct(rows.begin(), rows.end());
        std::sort(distinct.begin(), distinct.end());
        const auto nd = std::unique(distinct.begin(), distinct.end()) - distinct.begin();
        if (nd < 3) throw DataError("replicate has fewer than 3 distinct rows");
    }
    Eigen::MatrixXd xr(m, p);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto src = rows[static_cast<std::size_t>(r)];
        if (src >= static_cast<std::size_t>(x.rows())) throw UsageError("row index out of range");
        xr.row(r) = x.row(static_cast<Eigen::Index>(src));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        auto col = xr.col(j);
        const double mean = col.mean();
        col.array() -= mean;
        const double var = col.squaredNorm() / static_cast<double>(m - 1);
        if (!(var > 1e-12)) throw DataError("zero-variance column " + std::to_string(j) + " in replicate");
        col /= std::sqrt(var);
    }
    Eigen::MatrixXd S = (xr.transpose() * xr) / static_cast<double>(m - 1);
    S = 0.5 * (S + S.transpose()).eval();
    S = S.cwiseMax(-1.0).cwiseMin(1.0);
    S.diagonal().setOnes();
    return S;
}

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& x) {
    std::vector<std::size_t> all(static_cast<std::size_t>(x.rows()));
    std::iota(all.begin(), all.end(), std::size_t{0});
    return sample_correlation(x, all);
}

double lambda_max(const Eigen::MatrixXd& S) {
    double lm = 0.0;
    for (Eigen::Index j = 0; j < S.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) lm = std::max(lm, std::abs(S(i, j)));
    return lm;
}

PrecisionEstimate glasso(const Eigen::MatrixXd& S, double lambda, const GlassoOptions& opts) {
    if (S.rows() != S.cols() || S.rows() == 0) throw UsageError("glasso needs a non-empty square matrix");
    if (!(lambda >= 0.0)) throw UsageError("glasso penalty must be non-negative");
    if ((S.diagonal().array() <= 0.0).any()) throw NumericalError("covariance has a non-positive diagonal");
    const auto p = S.rows();

    if (lambda == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (!(lo > 1e-10 * std::max(1.0, hi))) throw NumericalError("covariance is singular and lambda is 0");
    }

    PrecisionEstimate est;
    est.lambda = lambda;

    // Dual start W = (1 - t) diag(S) + t S with t = 1 - lambda / lambda_max: every
    // off-diagonal lies within lambda of S, the diagonal equals diag(S), and the
    // matrix is positive definite for lambda > 0 even when S is singular.
    const double lmax = lambda_max(S);
    const double t = lmax > lambda ? 1.0 - lambda / lmax : 0.0;
    Eigen::MatrixXd W = t * S;
    W.diagonal() = S.diagonal();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);  // column j: regression of j on the rest
    Eigen::MatrixXd theta;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        for (Eigen::Index j = 0; j < p; ++j) {
            auto beta = B.col(j);
            // grad(k) = sum_{l != j} W(k,l) beta(l); kept current across coordinate updates.
            Eigen::VectorXd wb = W * beta;
            for (int it = 0; it < opts.inner_max_iter; ++it) {
                double max_delta = 0.0;
                for (Eigen::Index k = 0; k < p; ++k) {
                    if (k == j) continue;
                    const double old = beta(k);
                    const double z = S(k, j) - (wb(k) - W(k, k) * old);
                    const double updated = soft_threshold(z, lambda) / W(k, k);
                    const double delta = updated - old;
                    if (delta != 0.0) {
                        beta(k) = updated;
                        wb += W.col(k) * delta;
                        max_delta = std::max(max_delta, std::abs(delta));
                    }
                }
                if (max_delta < opts.inner_tol) break;
            }
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == j) continue;
                // wb(k) still includes W(k,j) * beta(j) == 0, so it equals (W11 beta)_k.
                W(k, j) = wb(k);
                W(j, k) = wb(k);
            }
        }
        est.iterations = iter;

        theta = theta_from_betas(W, B);
        if (opts.record_trace) est.logdet_trace.push_back(logdet_spd(W));

        Eigen::MatrixXd Wp = W;
        for (Eigen::Index j = 0; j < p; ++j)
            for (Eigen::Index i = 0; i < p; ++i)
                if (i != j) Wp(i, j) = std::clamp(W(i, j), S(i, j) - lambda, S(i, j) + lambda);
        const double ld_w = logdet_spd(Wp);
        const double ld_t = logdet_spd(theta);
        double gap = std::numeric_limits<double>::infinity();
        if (std::isfinite(ld_w) && std::isfinite(ld_t)) {
            gap = -ld_w - static_cast<double>(p) - ld_t + (S.cwiseProduct(theta)).sum() + lambda * offdiag_l1(theta);
        }
        est.duality_gap = gap;
        if (gap <= opts.tol * static_cast<double>(p)) {
            est.converged = true;
            break;
        }
    }

    est.theta = theta;
    Eigen::LLT<Eigen::MatrixXd> llt(theta);
    if (llt.info() == Eigen::Success) {
        est.w = llt.solve(Eigen::MatrixXd::Identity(p, p));
        est.w = 0.5 * (est.w + est.w.transpose()).eval();
    } else {
        est.converged = false;
        est.w = W;
    }
    return est;
}

double kkt_residual(const Eigen::MatrixXd& S, const PrecisionEstimate& est) {
    const auto p = S.rows();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            const double diff = est.w(i, j) - S(i, j);
            double r;
            if (i == j) {
                r = std::abs(diff);
            } else if (std::abs(est.theta(i, j)) > kEdgeThreshold) {
                // W - S = lambda * sign(theta) on the support
                r = std::abs(diff - est.lambda * (est.theta(i, j) > 0 ? 1.0 : -1.0));
            } else {
                r = std::max(0.0, std::abs(diff) - est.lambda);
            }
            worst = std::max(worst, r);
        }
    }
    return worst;
}

NetworkEstimate to_network(const Eigen::MatrixXd& theta) {
    const auto p = theta.rows();
    NetworkEstimate net;
    net.pcor = Eigen::MatrixXd::Zero(p, p);
    net.adjacency.setConstant(p, p, false);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double t = 0.5 * (theta(i, j) + theta(j, i));
            if (std::abs(t) <= kEdgeThreshold) continue;
            const double r = -t / std::sqrt(theta(i, i) * theta(j, j));
            net.pcor(i, j) = net.pcor(j, i) = r;
            net.adjacency(i, j) = net.adjacency(j, i) = true;
        }
    }
    return net;
}

NetworkEstimate to_network(const PrecisionEstimate& est) {
    if (!est.converged) throw UsageError("precision estimate did not converge");
    return to_network(est.theta);
}

}  // namespace netboot
