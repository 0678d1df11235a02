#include "netboot/pc.hpp"

#include "netboot/error.hpp"
#include "netboot/ggm.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace netboot {

namespace {

NodePair ordered(std::size_t a, std::size_t b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

// Calls f(subset) for each size-k subset of items in lexicographic order
// until f returns true. Returns whether f ever returned true.
template <class F>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k, F&& f) {
    const std::size_t n = items.size();
    if (k > n) return false;
    std::vector<std::size_t> pos(k);
    for (std::size_t i = 0; i < k; ++i) pos[i] = i;
    std::vector<std::size_t> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[pos[i]];
        if (f(std::span<const std::size_t>(subset))) return true;
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return false;
        ++pos[i - 1];
        for (std::size_t t = i; t < k; ++t) pos[t] = pos[t - 1] + 1;
    }
}

}  // namespace

CiTestResult fisher_z_test(const Eigen::MatrixXd& C, std::size_t i, std::size_t j, std::span<const std::size_t> S,
                           std::size_t n, double alpha) {
    const auto p = static_cast<std::size_t>(C.rows());
    if (i == j) throw UsageError("conditional independence test needs two distinct variables");
    if (i >= p || j >= p) throw UsageError("variable index out of range");
    if (n < S.size() + 4) throw UsageError("sample size too small for the conditioning set");

    const std::size_t k = S.size() + 2;
    std::vector<std::size_t> idx{i, j};
    idx.insert(idx.end(), S.begin(), S.end());
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                C(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));

    CiTestResult res;
    double r;
    if (S.empty()) {
        r = sub(0, 1);
    } else {
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (llt.info() != Eigen::Success) {
            res.degenerate = true;
            return res;
        }
        const Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(sub.rows(), sub.cols()));
        r = -P(0, 1) / std::sqrt(P(0, 0) * P(1, 1));
    }
    res.r = r;
    if (!std::isfinite(r) || std::abs(r) >= 1.0) {
        res.degenerate = true;
        return res;
    }
    const double stat = std::sqrt(static_cast<double>(n - S.size() - 3)) * std::abs(std::atanh(r));
    res.pval = std::erfc(stat / std::sqrt(2.0));
    res.independent = res.pval > alpha;
    return res;
}

std::vector<NodePair> Skeleton::edges() const {
    std::vector<NodePair> out;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            if (adjacent(i, j)) out.emplace_back(i, j);
    return out;
}

Skeleton pc_skeleton(const Eigen::MatrixXd& C, std::size_t n, double alpha, std::size_t max_cond) {
    if (C.rows() != C.cols()) throw UsageError("correlation matrix must be square");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    Skeleton sk;
    sk.p = static_cast<std::size_t>(C.rows());
    const std::size_t p = sk.p;
    sk.adj.assign(p * p, 1);
    for (std::size_t i = 0; i < p; ++i) sk.adj[i * p + i] = 0;

    for (std::size_t level = 0; level <= max_cond; ++level) {
        if (n < level + 4) break;
        std::vector<std::vector<std::size_t>> frozen(p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                if (sk.adjacent(i, j)) frozen[i].push_back(j);

        bool any_candidate = false;
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = i + 1; j < p; ++j) {
                if (!sk.adjacent(i, j)) continue;
                for (auto [x, y] : {NodePair{i, j}, NodePair{j, i}}) {
                    std::vector<std::size_t> candidates;
                    for (auto v : frozen[x])
                        if (v != y) candidates.push_back(v);
                    if (candidates.size() < level) continue;
                    any_candidate = true;
                    const bool removed = for_each_subset(candidates, level, [&](std::span<const std::size_t> S) {
                        const auto t = fisher_z_test(C, i, j, S, n, alpha);
                        if (t.degenerate) ++sk.degenerate_tests;
                        if (!t.independent) return false;
                        sk.adj[i * p + j] = sk.adj[j * p + i] = 0;
                        std::vector<std::size_t> sep(S.begin(), S.end());
                        std::sort(sep.begin(), sep.end());
                        sk.sepsets[{i, j}] = std::move(sep);
                        return true;
                    });
                    if (removed) break;
                }
            }
        }
        if (!any_candidate) break;
    }
    return sk;
}

Cpdag Cpdag::from_skeleton(const Skeleton& s) {
    Cpdag g(s.p);
    for (auto [i, j] : s.edges()) g.add_undirected(i, j);
    g.sepsets = s.sepsets;
    return g;
}

void Cpdag::add_undirected(std::size_t a, std::size_t b) {
    if (a == b) throw UsageError("self-loop in CPDAG");
    mark_[a * p_ + b] = 1;
    mark_[b * p_ + a] = 1;
}

std::vector<NodePair> Cpdag::directed_edges() const {
    std::vector<NodePair> out;
    for (std::size_t a = 0; a < p_; ++a)
        for (std::size_t b = 0; b < p_; ++b)
            if (directed(a, b)) out.emplace_back(a, b);
    return out;
}

std::vector<NodePair> Cpdag::undirected_edges() const {
    std::vector<NodePair> out;
    for (std::size_t a = 0; a < p_; ++a)
        for (std::size_t b = a + 1; b < p_; ++b)
            if (undirected(a, b)) out.emplace_back(a, b);
    return out;
}

bool Cpdag::locked(std::size_t a, std::size_t b) const {
    return std::binary_search(conflicts.begin(), conflicts.end(), ordered(a, b));
}

Cpdag orient_cpdag(const Skeleton& skeleton) {
    Cpdag g = Cpdag::from_skeleton(skeleton);
    const std::size_t p = skeleton.p;

    std::vector<std::uint8_t> proposed(p * p, 0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = i + 1; k < p; ++k) {
            if (skeleton.adjacent(i, k)) continue;
            auto it = skeleton.sepsets.find({i, k});
            static const std::vector<std::size_t> kEmpty;
            const auto& sep = it == skeleton.sepsets.end() ? kEmpty : it->second;
            for (std::size_t j = 0; j < p; ++j) {
                if (!skeleton.adjacent(i, j) || !skeleton.adjacent(k, j)) continue;
                if (std::binary_search(sep.begin(), sep.end(), j)) continue;
                proposed[i * p + j] = 1;
                proposed[k * p + j] = 1;
            }
        }
    }
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) {
            const bool ab = proposed[a * p + b] != 0;
            const bool ba = proposed[b * p + a] != 0;
            if (ab && ba) {
                g.conflicts.emplace_back(a, b);
            } else if (ab) {
                g.orient(a, b);
            } else if (ba) {
                g.orient(b, a);
            }
        }
    }
    while (apply_meek_rules(g)) {
    }
    return g;
}

bool apply_meek_rules(Cpdag& g) {
    const std::size_t p = g.size();
    bool changed = false;

    auto candidates = [&](auto&& rule) {
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) {
                if (a == b || !g.undirected(a, b) || g.locked(a, b)) continue;
                if (rule(a, b)) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
    };

    // R1: c -> a, a - b, c and b non-adjacent  =>  a -> b
    candidates([&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < p; ++c)
            if (c != b && g.directed(c, a) && !g.adjacent(c, b)) return true;
        return false;
    });
    // R2: a -> c -> b, a - b  =>  a -> b
    candidates([&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < p; ++c)
            if (g.directed(a, c) && g.directed(c, b)) return true;
        return false;
    });
    // R3: a - c -> b, a - d -> b, c and d non-adjacent, a - b  =>  a -> b
    candidates([&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < p; ++c) {
            if (!g.undirected(a, c) || !g.directed(c, b)) continue;
            for (std::size_t d = c + 1; d < p; ++d)
                if (g.undirected(a, d) && g.directed(d, b) && !g.adjacent(c, d)) return true;
        }
        return false;
    });
    // R4: a - b, c -> d -> b, a adjacent to c and d, c and b non-adjacent  =>  a -> b
    candidates([&](std::size_t a, std::size_t b) {
        for (std::size_t d = 0; d < p; ++d) {
            if (d == a || !g.directed(d, b) || !g.adjacent(a, d)) continue;
            for (std::size_t c = 0; c < p; ++c)
                if (c != a && c != b && g.directed(c, d) && g.adjacent(a, c) && !g.adjacent(c, b)) return true;
        }
        return false;
    });
    return changed;
}

std::vector<std::size_t> markov_blanket(const Cpdag& g, std::size_t v) {
    const std::size_t p = g.size();
    if (v >= p) throw UsageError("node index out of range");
    std::vector<std::uint8_t> in(p, 0);
    for (std::size_t u = 0; u < p; ++u)
        if (u != v && g.adjacent(u, v)) in[u] = 1;
    for (std::size_t w = 0; w < p; ++w) {
        if (!g.directed(v, w)) continue;
        for (std::size_t u = 0; u < p; ++u)
            if (u != v && g.directed(u, w)) in[u] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < p; ++u)
        if (in[u]) out.push_back(u);
    return out;
}

BnEnsembleStats run_ensemble_pc(const Dataset& d, const ResamplePlan& plan, const PcEnsembleOptions& opts) {
    const auto meta = SampleMeta::of(d);
    check_plan(plan, meta);
    if (!(opts.tau > 0.0 && opts.tau <= 1.0)) throw UsageError("tau must lie in (0, 1]");
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (opts.threads < 1) throw UsageError("threads must be positive");

    const auto z = standardize(d);
    const std::size_t p = d.n_vars();

    struct Result {
        bool valid = false;
        std::vector<NodePair> skeleton, directed, mb;
    };
    std::vector<Result> results(plan.B);
    std::exception_ptr fatal;

#pragma omp parallel for schedule(dynamic, 1) num_threads(opts.threads)
    for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(plan.B); ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        auto& out = results[r];
        try {
            const auto idx = draw(plan, r, meta);
            const auto C = sample_correlation(z.values, idx.rows);
            const auto sk = pc_skeleton(C, idx.rows.size(), opts.alpha, opts.max_cond);
            const auto g = orient_cpdag(sk);
            out.skeleton = sk.edges();
            out.directed = g.directed_edges();
            for (std::size_t v = 0; v < p; ++v)
                for (auto u : markov_blanket(g, v)) out.mb.emplace_back(v, u);
            out.valid = true;
        } catch (const DataError&) {
        } catch (const NumericalError&) {
        } catch (...) {
#pragma omp critical(netboot_pc_fatal)
            if (!fatal) fatal = std::current_exception();
        }
    }
    if (fatal) std::rethrow_exception(fatal);

    BnEnsembleStats st;
    st.var_names = d.var_names;
    st.p = p;
    st.plan = plan;
    st.options = opts;
    st.skeleton_count.assign(p * p, 0);
    st.orient_count.assign(p * p, 0);
    st.mb_count.assign(p * p, 0);
    for (std::size_t r = 0; r < plan.B; ++r) {
        const auto& res = results[r];
        if (!res.valid) {
            st.failed_replicates.push_back(r);
            continue;
        }
        ++st.n_valid;
        for (auto [i, j] : res.skeleton) {
            ++st.skeleton_count[i * p + j];
            ++st.skeleton_count[j * p + i];
        }
        for (auto [a, b] : res.directed) ++st.orient_count[a * p + b];
        for (auto [v, u] : res.mb) ++st.mb_count[v * p + u];
    }
    if (!ensemble_is_stable(st.n_valid, plan.B)) {
        throw NumericalError("ensemble unstable: only " + std::to_string(st.n_valid) + " of " +
                             std::to_string(plan.B) + " replicates succeeded");
    }

    const auto full = sample_correlation(z.values);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            if (st.skeleton_freq(i, j) >= opts.tau - 1e-12) {
                const double c = full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                st.consensus.push_back({i, j, st.skeleton_freq(i, j), c < 0.0 ? -1 : 1});
            }

    if (opts.keep_replicates) {
        st.replicates.resize(plan.B);
        for (std::size_t r = 0; r < plan.B; ++r) {
            st.replicates[r].replicate_id = r;
            st.replicates[r].valid = results[r].valid;
            st.replicates[r].edges = results[r].skeleton;
        }
    }
    return st;
}

}  // namespace netboot
