#include "netboot/ensemble.hpp"

#include "netboot/error.hpp"
#include "netboot/stats.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace netboot {

double null_correlation_bound(std::size_t n, std::size_t pairs, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (n <= 3 || pairs == 0) return 0.0;
    const double tail = alpha / (2.0 * static_cast<double>(pairs));
    const double z = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * tail);
    return std::tanh(z / std::sqrt(static_cast<double>(n - 3)));
}

double LambdaRule::resolve(const Eigen::MatrixXd& full_correlation, std::size_t n, double alpha) const {
    if (!(value >= 0.0)) throw UsageError("lambda rule value must be non-negative");
    switch (kind) {
        case Kind::fixed: return value;
        case Kind::scale_of_max: return value * lambda_max(full_correlation);
        case Kind::calibrated: {
            const auto p = static_cast<std::size_t>(full_correlation.rows());
            return std::max(value * lambda_max(full_correlation), null_correlation_bound(n, p * (p - 1) / 2, alpha));
        }
    }
    throw UsageError("unknown lambda rule");
}

const char* to_string(LambdaRule::Kind kind) {
    switch (kind) {
        case LambdaRule::Kind::fixed: return "fixed";
        case LambdaRule::Kind::scale_of_max: return "scale_of_max";
        case LambdaRule::Kind::calibrated: return "calibrated";
    }
    return "unknown";
}

bool ensemble_is_stable(std::size_t n_valid, std::size_t B) {
    const double needed = std::max(10.0, static_cast<double>(B) / 2.0);
    return static_cast<double>(n_valid) >= needed;
}

std::vector<EdgeStats> aggregate_edges(const std::vector<PairSamples>& pairs, std::size_t n_valid, double alpha) {
    std::vector<EdgeStats> edges;
    for (const auto& ps : pairs) {
        if (ps.nonzero.size() > n_valid) throw UsageError("more selections than valid replicates");
        if (ps.nonzero.empty()) continue;
        EdgeStats e;
        e.i = ps.i;
        e.j = ps.j;
        e.selected = ps.nonzero.size();
        e.n_valid = n_valid;
        e.freq = static_cast<double>(e.selected) / static_cast<double>(n_valid);
        edges.push_back(e);
    }

    std::size_t next = 0;
    std::vector<std::size_t> slot(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (!pairs[k].nonzero.empty()) slot[k] = next++;

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(pairs.size()); ++k) {
        const auto& ps = pairs[static_cast<std::size_t>(k)];
        if (ps.nonzero.empty()) continue;
        auto& e = edges[slot[static_cast<std::size_t>(k)]];
        std::vector<double> all(n_valid, 0.0);
        double sum = 0.0;
        for (std::size_t r = 0; r < ps.nonzero.size(); ++r) {
            all[r] = ps.nonzero[r];
            sum += ps.nonzero[r];
        }
        e.pcor_mean = sum / static_cast<double>(n_valid);
        e.sign = e.pcor_mean < 0.0 ? -1 : 1;
        if (auto ci = percentile_ci(all, alpha)) {
            e.ci_lo = ci->first;
            e.ci_hi = ci->second;
        }
        e.pval = empirical_pvalue(all);
    }

    std::vector<double> p(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) p[k] = edges[k].pval;
    const auto adj = bh_adjust(p);
    for (std::size_t k = 0; k < edges.size(); ++k) edges[k].padj = adj[k];
    return edges;
}

namespace {

struct ReplicateResult {
    bool valid = false;
    std::string failure;
    std::vector<std::pair<std::size_t, double>> nonzero;  // (pair index, pcor)
};

inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t p) {
    // i < j, row-major upper triangle
    return i * p - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

ConsensusNetwork run_ensemble_ggm(const Dataset& d, const ResamplePlan& plan, const GgmEnsembleOptions& opts) {
    const auto meta = SampleMeta::of(d);
    check_plan(plan, meta);
    if (!(opts.tau > 0.0 && opts.tau <= 1.0)) throw UsageError("tau must lie in (0, 1]");
    if (!(opts.alpha > 0.0 && opts.alpha < 0.5)) throw UsageError("alpha must lie in (0, 0.5)");
    if (opts.threads < 1) throw UsageError("threads must be positive");

    const auto z = standardize(d);
    const std::size_t p = d.n_vars();

    ConsensusNetwork cn;
    cn.var_names = d.var_names;
    cn.tau = opts.tau;
    cn.alpha = opts.alpha;
    cn.plan = plan;
    cn.lambda_rule = opts.lambda;
    cn.lambda = opts.lambda.resolve(sample_correlation(z.values), d.n_samples(), opts.alpha);

    std::vector<ReplicateResult> results(plan.B);
    std::exception_ptr fatal;

#pragma omp parallel for schedule(dynamic, 1) num_threads(opts.threads)
    for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(plan.B); ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        auto& out = results[r];
        try {
            const auto idx = draw(plan, r, meta);
            const auto S = sample_correlation(z.values, idx.rows);
            const auto est = glasso(S, cn.lambda, opts.glasso);
            if (!est.converged) {
                out.failure = "glasso did not converge";
                continue;
            }
            const auto net = to_network(est);
            for (std::size_t j = 1; j < p; ++j)
                for (std::size_t i = 0; i < j; ++i)
                    if (net.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                        out.nonzero.emplace_back(pair_index(i, j, p),
                                                 net.pcor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            std::sort(out.nonzero.begin(), out.nonzero.end());
            out.valid = true;
        } catch (const DataError& e) {
            out.failure = e.what();
        } catch (const NumericalError& e) {
            out.failure = e.what();
        } catch (...) {
#pragma omp critical(netboot_ensemble_fatal)
            if (!fatal) fatal = std::current_exception();
        }
    }
    if (fatal) std::rethrow_exception(fatal);

    // Deterministic fold in replicate order.
    std::vector<PairSamples> pairs(p * (p - 1) / 2);
    for (std::size_t i = 0; i + 1 < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            auto& ps = pairs[pair_index(i, j, p)];
            ps.i = i;
            ps.j = j;
        }
    for (std::size_t r = 0; r < plan.B; ++r) {
        const auto& res = results[r];
        if (!res.valid) {
            cn.failed_replicates.push_back(r);
            continue;
        }
        ++cn.n_valid;
        for (auto [k, v] : res.nonzero) pairs[k].nonzero.push_back(v);
    }
    if (!ensemble_is_stable(cn.n_valid, plan.B)) {
        throw NumericalError("ensemble unstable: only " + std::to_string(cn.n_valid) + " of " +
                             std::to_string(plan.B) + " replicates succeeded");
    }

    cn.edges = aggregate_edges(pairs, cn.n_valid, opts.alpha);
    cn.bh_tests = cn.edges.size();
    for (const auto& e : cn.edges)
        if (e.freq >= opts.tau - 1e-12) cn.graph.push_back({e.i, e.j, e.pcor_mean, e.sign});

    if (opts.keep_replicates) {
        cn.replicates.resize(plan.B);
        for (std::size_t r = 0; r < plan.B; ++r) {
            auto& ra = cn.replicates[r];
            ra.replicate_id = r;
            ra.valid = results[r].valid;
            for (auto [k, v] : results[r].nonzero) {
                (void)v;
                ra.edges.emplace_back(pairs[k].i, pairs[k].j);
            }
        }
    }
    return cn;
}

}  // namespace netboot
