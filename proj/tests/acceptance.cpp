// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include "netboot/cli.hpp"
#include "netboot/ensemble.hpp"
#include "netboot/graphlets.hpp"
#include "netboot/pc.hpp"
#include "netboot/resampling.hpp"
#include "netboot/stats.hpp"

#include "support/simulate.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

using namespace netboot;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

Eigen::MatrixXd random_correlation(std::size_t p, Xoshiro256& rng) {
    Eigen::MatrixXd a(p + 5, p);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
    Eigen::MatrixXd c = a.transpose() * a;
    const Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * c * d.asDiagonal();
}

Outcome glasso_correctness() {
    const auto t0 = Clock::now();
    Xoshiro256 rng(2024);
    GlassoOptions opts;
    opts.tol = 1e-12;
    opts.inner_tol = 1e-13;
    opts.max_iter = 5000;
    double worst_kkt = 0.0, worst_inv = 0.0;
    int failures = 0;
    const std::size_t dims[] = {3, 5, 10};
    for (int k = 0; k < 50; ++k) {
        const auto S = random_correlation(dims[k % 3], rng);
        for (double lam : {0.0, 0.05, 0.2}) {
            const auto est = glasso(S, lam, opts);
            if (!est.converged) ++failures;
            worst_kkt = std::max(worst_kkt, kkt_residual(S, est));
            if (lam == 0.0) {
                const Eigen::MatrixXd inv = S.inverse();
                worst_inv = std::max(worst_inv, (est.theta - inv).cwiseAbs().maxCoeff() / inv.cwiseAbs().maxCoeff());
            }
        }
    }
    const double secs = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "max KKT residual %.2e (<= 1e-5), max rel. inverse error %.2e (<= 1e-6), %d unconverged, %.2f s (< 10 s)",
                  worst_kkt, worst_inv, failures, secs);
    return {worst_kkt <= 1e-5 && worst_inv <= 1e-6 && failures == 0 && secs < 10.0, buf};
}

struct GraphletRun {
    Outcome oracle, collapse;
};

GraphletRun graphlet_equivalence() {
    const auto t0 = Clock::now();
    int mismatched = 0, collapse_bad = 0;
    Xoshiro256 pick(77);
    for (int k = 0; k < 200; ++k) {
        const std::size_t p = 2 + pick.uniform_index(29);  // 2..30
        const double density = 0.05 + 0.45 * pick.uniform01();
        const auto g = testsupport::random_signed_graph(p, density, 5000 + static_cast<std::uint64_t>(k));
        const auto u = gdvm_unsigned(g, 4);
        const auto s = gdvm_signed(g, 4);
        if (!(u == brute_force_oracle(g, 4, false)) || !(s == brute_force_oracle(g, 3, true))) ++mismatched;
        const auto c = collapse_signs(s);
        for (std::size_t v = 0; v < p; ++v)
            for (std::size_t o = 0; o < 4; ++o)
                if (c(v, o) != u(v, o)) ++collapse_bad;
    }
    const double secs = seconds_since(t0);
    char a[160], b[160];
    std::snprintf(a, sizeof a, "%d of 200 graphs differ from brute force, %.2f s (< 60 s)", mismatched, secs);
    std::snprintf(b, sizeof b, "%d signed/unsigned disagreements over orbits 0-3 on 200 graphs", collapse_bad);
    return {{mismatched == 0 && secs < 60.0, a}, {collapse_bad == 0, b}};
}

Outcome graphlet_performance() {
    const auto g = testsupport::random_sparse_graph(20000, 60000, 4);
    const auto t0 = Clock::now();
    const auto u = gdvm_unsigned(g, 4);
    const auto s = gdvm_signed(g, 4);
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "p = 20000, m = %zu: signed + unsigned GDVM in %.2f s on 4 threads (<= 30 s)",
                  g.edge_count(), secs);
    const bool sane = u.column_sum(0) == 120000 && s.column_sum(0) + s.column_sum(1) == 120000;
    return {sane && g.edge_count() == 60000 && secs <= 30.0, buf};
}

Outcome ensemble_recovery() {
    const auto t0 = Clock::now();
    const auto model = testsupport::random_sparse_model(20, 10, 0.4, 11);
    const auto d = testsupport::simulate_ggm(model.theta, 500, 12);
    const auto plan = make_plan(Strategy::bootstrap, 100, 0.8, 0.8, 13, SampleMeta::of(d));
    GgmEnsembleOptions opts;
    opts.tau = 0.8;
    const auto cn = run_ensemble_ggm(d, plan, opts);
    std::set<std::pair<std::size_t, std::size_t>> truth(model.edges.begin(), model.edges.end()), found;
    for (const auto& e : cn.graph) found.emplace(e.i, e.j);
    std::size_t tp = 0;
    for (const auto& e : found) tp += truth.count(e);
    const double prec = found.empty() ? 0.0 : static_cast<double>(tp) / found.size();
    const double rec = static_cast<double>(tp) / truth.size();
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    int ci_ok = 0;
    for (const auto& e : cn.edges)
        if (truth.count({e.i, e.j}) && e.ci_lo && (*e.ci_lo > 0.0 || *e.ci_hi < 0.0)) ++ci_ok;
    const double secs = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "F1 %.3f (>= 0.9; %zu found, %zu true positives), %d of 10 true-edge CIs exclude 0, lambda %.4f, %.2f s (< 120 s)",
                  f1, found.size(), tp, ci_ok, cn.lambda, secs);
    return {f1 >= 0.9 && ci_ok == 10 && secs < 120.0, buf};
}

Outcome null_control() {
    int ok = 0;
    std::string sizes;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = testsupport::simulate_ggm(Eigen::MatrixXd::Identity(20, 20), 500, 900 + seed);
        const auto plan = make_plan(Strategy::bootstrap, 100, 0.8, 0.8, seed, SampleMeta::of(d));
        const auto cn = run_ensemble_ggm(d, plan, GgmEnsembleOptions{});
        if (cn.graph.size() <= 1) ++ok;
        sizes += (sizes.empty() ? "" : ",") + std::to_string(cn.graph.size());
    }
    return {ok >= 19, std::to_string(ok) + " of 20 seeds with <= 1 consensus edge (>= 19 needed); edge counts " + sizes};
}

Outcome cluster_resampling() {
    std::vector<std::string> labels;
    for (int c = 0; c < 30; ++c)
        for (int k = 0; k < 4; ++k) labels.push_back("c" + std::to_string(c));
    const SampleMeta meta{120, std::nullopt, Labels::from_strings(labels)};
    int broken = 0, wrong_count = 0;
    for (auto s : {Strategy::cluster_bootstrap, Strategy::fractional_cluster_bootstrap}) {
        const auto plan = make_plan(s, 200, 0.8, 0.8, 31, meta);
        for (std::size_t r = 0; r < plan.B; ++r) {
            std::map<std::size_t, std::size_t> mult;
            for (auto row : draw(plan, r, meta).rows) ++mult[row];
            std::map<std::size_t, std::set<std::size_t>> per_cluster;
            std::map<std::size_t, std::size_t> members;
            for (auto [row, m] : mult) {
                per_cluster[meta.cluster->code[row]].insert(m);
                ++members[meta.cluster->code[row]];
            }
            std::size_t draws = 0;
            for (const auto& [c, ms] : per_cluster) {
                if (ms.size() != 1 || members[c] != 4) ++broken;
                draws += *ms.begin();
            }
            if (s == Strategy::fractional_cluster_bootstrap && draws != 24) ++wrong_count;
            if (s == Strategy::cluster_bootstrap && draws != 30) ++wrong_count;
        }
    }
    return {broken == 0 && wrong_count == 0,
            std::to_string(broken) + " split clusters, " + std::to_string(wrong_count) +
                " replicates with a wrong cluster count (400 replicates; fractional expects ceil(0.8*30) = 24)"};
}

Outcome pc_recovery() {
    Eigen::MatrixXd chain(3, 3), collider(3, 3);
    chain << 1, 0.6, 0.36, 0.6, 1, 0.6, 0.36, 0.6, 1;
    collider << 1, 0, 0.6, 0, 1, 0.6, 0.6, 0.6, 1;
    using Pairs = std::vector<NodePair>;
    const auto gc = orient_cpdag(pc_skeleton(chain, 1000, 0.01, 3));
    const auto gv = orient_cpdag(pc_skeleton(collider, 1000, 0.01, 3));
    const bool oracle = gc.undirected_edges() == Pairs{{0, 1}, {1, 2}} && gc.directed_edges().empty() &&
                        gv.directed_edges() == Pairs{{0, 2}, {1, 2}} && gv.undirected_edges().empty();

    // Simulated chain x0 -> x1 -> x2 and collider x0 -> x2 <- x1, n = 1000, B = 50.
    double worst = 1.0;
    for (int model = 0; model < 2; ++model) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 3);
        if (model == 0) {
            B(1, 0) = 0.6;
            B(2, 1) = 0.6;
        } else {
            B(2, 0) = 0.6;
            B(2, 1) = 0.6;
        }
        const Eigen::MatrixXd A = (Eigen::Matrix3d::Identity() - B).inverse();
        Xoshiro256 rng(400 + model);
        Dataset d;
        d.values.resize(1000, 3);
        for (Eigen::Index r = 0; r < 1000; ++r) {
            const Eigen::Vector3d e(rng.normal(), rng.normal(), rng.normal());
            d.values.row(r) = (A * e).transpose();
        }
        d.var_names = {"x0", "x1", "x2"};
        for (int r = 0; r < 1000; ++r) d.sample_ids.push_back("r" + std::to_string(r));
        const auto plan = make_plan(Strategy::bootstrap, 50, 0.8, 0.8, 41, SampleMeta::of(d));
        const auto st = run_ensemble_pc(d, plan, PcEnsembleOptions{});
        const Pairs truth = model == 0 ? Pairs{{0, 1}, {1, 2}} : Pairs{{0, 2}, {1, 2}};
        for (auto [i, j] : truth) worst = std::min(worst, st.skeleton_freq(i, j));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "oracle chain/collider CPDAGs %s; min true-edge skeleton freq %.2f (>= 0.9)",
                  oracle ? "exact" : "WRONG", worst);
    return {oracle && worst >= 0.9, buf};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    testsupport::TempDir dir("accept");
    const auto data = dir / "data.tsv";
    const auto model = testsupport::random_sparse_model(15, 8, 0.4, 3);
    write_dataset_tsv(testsupport::simulate_ggm(model.theta, 200, 4), data);
    auto run = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "netboot");
        return cli_main(args);
    };
    int rc = 0;
    std::vector<std::string> labels;
    for (const char* threads : {"1", "8", "1"}) {
        const std::string tag = std::string("t") + threads + "_" + std::to_string(labels.size());
        labels.push_back(tag);
        rc |= run({"infer-ggm", "--data", data.string(), "--resampling", "bootstrap", "--B", "40", "--tau", "0.8",
                   "--alpha", "0.05", "--seed", "5", "--threads", threads, "--out", (dir / ("g" + tag)).string()});
        rc |= run({"infer-pc", "--data", data.string(), "--resampling", "bootstrap", "--B", "30", "--alpha", "0.01",
                   "--max-cond", "3", "--tau", "0.8", "--seed", "5", "--threads", threads, "--out",
                   (dir / ("p" + tag)).string()});
        rc |= run({"graphlets", "--graph", (dir / ("g" + labels[0]) / "graph.tsv").string(), "--signed", "--out",
                   (dir / ("x" + tag)).string(), "--threads", threads});
    }
    int differing = 0;
    for (std::size_t k = 1; k < labels.size(); ++k) {
        differing += slurp(dir / ("g" + labels[0]) / "edges.tsv") != slurp(dir / ("g" + labels[k]) / "edges.tsv");
        differing += slurp(dir / ("p" + labels[0]) / "bn_skeleton.tsv") != slurp(dir / ("p" + labels[k]) / "bn_skeleton.tsv");
        differing += slurp(dir / ("x" + labels[0]) / "gdvm.tsv") != slurp(dir / ("x" + labels[k]) / "gdvm.tsv");
    }
    const bool nonempty = !slurp(dir / ("g" + labels[0]) / "edges.tsv").empty();
    return {rc == 0 && differing == 0 && nonempty,
            "edges.tsv, bn_skeleton.tsv, gdvm.tsv: " + std::to_string(differing) +
                " of 6 comparisons differ (threads 1 vs 8, repeat run), exit status " + std::to_string(rc)};
}

Outcome statistics_units() {
    bool ok = true;
    std::vector<double> pos(99, 0.25), mixed(50, 0.1), zeros(99, 0.0);
    mixed.insert(mixed.end(), 49, -0.1);
    ok &= empirical_pvalue(pos) == 0.02;
    ok &= empirical_pvalue(mixed) == 1.0;
    ok &= empirical_pvalue(zeros) == 1.0;
    ok &= bh_adjust(std::vector<double>{0.01, 0.02, 0.03, 0.04}) == std::vector<double>{0.04, 0.04, 0.04, 0.04};
    ok &= bh_adjust(std::vector<double>{0.5}) == std::vector<double>{0.5};
    ok &= bh_adjust(std::vector<double>{0.0, 1.0}) == std::vector<double>{0.0, 1.0};
    std::vector<double> seq(100);
    for (int k = 0; k < 100; ++k) seq[k] = k + 1;
    const auto ci = percentile_ci(seq, 0.05);
    const bool ci_ok = ci && std::abs(ci->first - 3.475) < 1e-12 && std::abs(ci->second - 97.525) < 1e-12;
    return {ok && ci_ok, std::string("empirical_pvalue and bh_adjust worked examples ") + (ok ? "exact" : "MISMATCH") +
                             "; percentile CI [1..100] " + (ci_ok ? "3.475/97.525" : "MISMATCH")};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("criterion %2d %-34s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    };
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("threw: ") + e.what()};
        }
    };
    report(1, "glasso correctness", guarded(glasso_correctness));
    GraphletRun g;
    try {
        g = graphlet_equivalence();
    } catch (const std::exception& e) {
        g = {{false, e.what()}, {false, e.what()}};
    }
    report(2, "graphlet oracle equivalence", g.oracle);
    report(3, "sign-collapse identity", g.collapse);
    report(4, "graphlet performance", guarded(graphlet_performance));
    report(5, "ensemble recovery", guarded(ensemble_recovery));
    report(6, "null control", guarded(null_control));
    report(7, "cluster resampling", guarded(cluster_resampling));
    report(8, "PC recovery", guarded(pc_recovery));
    report(9, "determinism", guarded(determinism));
    report(10, "statistics units", guarded(statistics_units));
    std::printf("%d of 10 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
