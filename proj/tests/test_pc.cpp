#include "netboot/error.hpp"
#include "netboot/output.hpp"
#include "netboot/pc.hpp"

#include "support/simulate.hpp"

#include <doctest.h>

#include <algorithm>

using namespace netboot;

namespace {

using Pairs = std::vector<NodePair>;

// Correlation matrix implied by a linear SEM x = B x + e with unit error
// variances; B(i, j) is the weight of edge j -> i.
Eigen::MatrixXd sem_correlation(const Eigen::MatrixXd& B) {
    const auto p = B.rows();
    const Eigen::MatrixXd A = (Eigen::MatrixXd::Identity(p, p) - B).inverse();
    const Eigen::MatrixXd cov = A * A.transpose();
    const Eigen::VectorXd d = cov.diagonal().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * cov * d.asDiagonal();
}

Eigen::MatrixXd chain_correlation() {
    Eigen::MatrixXd C(3, 3);
    C << 1, 0.6, 0.36, 0.6, 1, 0.6, 0.36, 0.6, 1;
    return C;
}

// X = 0, Y = 1, Z = 2 with X -> Z <- Y.
Eigen::MatrixXd collider_correlation() {
    Eigen::MatrixXd C(3, 3);
    C << 1, 0, 0.6, 0, 1, 0.6, 0.6, 0.6, 1;
    return C;
}

Dataset sem_data(const Eigen::MatrixXd& B, std::size_t n, std::uint64_t seed) {
    const auto p = B.rows();
    const Eigen::MatrixXd A = (Eigen::MatrixXd::Identity(p, p) - B).inverse();
    Xoshiro256 rng(seed);
    Dataset d;
    d.values.resize(static_cast<Eigen::Index>(n), p);
    Eigen::VectorXd e(p);
    for (std::size_t r = 0; r < n; ++r) {
        for (Eigen::Index k = 0; k < p; ++k) e(k) = rng.normal();
        d.values.row(static_cast<Eigen::Index>(r)) = (A * e).transpose();
    }
    for (Eigen::Index k = 0; k < p; ++k) d.var_names.push_back("x" + std::to_string(k));
    for (std::size_t r = 0; r < n; ++r) d.sample_ids.push_back("r" + std::to_string(r));
    return d;
}

Eigen::MatrixXd collider_weights() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 3);
    B(2, 0) = 0.8;
    B(2, 1) = 0.8;
    return B;
}

}  // namespace

TEST_CASE("fisher_z_test basics") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    const std::vector<std::size_t> none, y = {1};
    const auto t = fisher_z_test(I, 0, 2, none, 50, 0.01);
    CHECK(t.independent);
    CHECK(t.pval == 1.0);
    CHECK(t.r == 0.0);

    const auto c = fisher_z_test(chain_correlation(), 0, 2, y, 1000, 0.01);
    CHECK(std::abs(c.r) < 1e-12);
    CHECK(c.independent);
    CHECK(!fisher_z_test(chain_correlation(), 0, 2, none, 1000, 0.01).independent);

    // r = 0.1, n = 103: z = atanh(0.1) * 10, p = 2 (1 - Phi(z)).
    Eigen::MatrixXd C(2, 2);
    C << 1, 0.1, 0.1, 1;
    const double z = std::atanh(0.1) * 10.0;
    const auto r = fisher_z_test(C, 0, 1, none, 103, 0.05);
    CHECK(r.pval == doctest::Approx(std::erfc(z / std::sqrt(2.0))).epsilon(1e-12));

    CHECK_THROWS_AS(fisher_z_test(I, 1, 1, none, 50, 0.01), UsageError);
    CHECK_THROWS_AS(fisher_z_test(I, 0, 2, y, 4, 0.01), UsageError);
}

TEST_CASE("degenerate tests are dependent with p = 0") {
    Eigen::MatrixXd C(3, 3);
    C << 1, 1, 0.5, 1, 1, 0.5, 0.5, 0.5, 1;
    const std::vector<std::size_t> s = {2};
    const auto t = fisher_z_test(C, 0, 1, s, 100, 0.01);
    CHECK(t.degenerate);
    CHECK(!t.independent);
    CHECK(t.pval == 0.0);
}

TEST_CASE("oracle chain: skeleton X-Y-Z, no orientation") {
    const auto sk = pc_skeleton(chain_correlation(), 1000, 0.01, 3);
    CHECK(sk.edges() == Pairs{{0, 1}, {1, 2}});
    CHECK(sk.sepsets.at({0, 2}) == std::vector<std::size_t>{1});
    const auto g = orient_cpdag(sk);
    CHECK(g.directed_edges().empty());
    CHECK(g.undirected_edges() == Pairs{{0, 1}, {1, 2}});
    CHECK(markov_blanket(g, 1) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("oracle collider: X -> Z <- Y") {
    const auto sk = pc_skeleton(collider_correlation(), 1000, 0.01, 3);
    CHECK(sk.edges() == Pairs{{0, 2}, {1, 2}});
    CHECK(sk.sepsets.at({0, 1}).empty());
    const auto g = orient_cpdag(sk);
    CHECK(g.directed_edges() == Pairs{{0, 2}, {1, 2}});
    CHECK(g.undirected_edges().empty());
    CHECK(markov_blanket(g, 0) == std::vector<std::size_t>{1, 2});
    CHECK(markov_blanket(g, 2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("diagonal correlation gives an empty skeleton; single edge stays undirected") {
    CHECK(pc_skeleton(Eigen::MatrixXd::Identity(4, 4), 200, 0.01, 3).edges().empty());
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(3, 3);
    C(0, 1) = C(1, 0) = 0.5;
    const auto g = orient_cpdag(pc_skeleton(C, 200, 0.01, 3));
    CHECK(g.undirected_edges() == Pairs{{0, 1}});
    CHECK(markov_blanket(g, 2).empty());
}

TEST_CASE("v-structure followed by R1") {
    // 0 -> 2 <- 1, 2 -> 3.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
    B(2, 0) = 0.7;
    B(2, 1) = 0.7;
    B(3, 2) = 0.7;
    const auto g = orient_cpdag(pc_skeleton(sem_correlation(B), 5000, 0.01, 3));
    CHECK(g.directed_edges() == Pairs{{0, 2}, {1, 2}, {2, 3}});
    CHECK(markov_blanket(g, 0) == std::vector<std::size_t>{1, 2});
    CHECK(markov_blanket(g, 3) == std::vector<std::size_t>{2});
}

TEST_CASE("Meek rules on hand-built graphs") {
    SUBCASE("R2") {
        Cpdag g(3);
        g.add_undirected(0, 1);
        g.add_undirected(1, 2);
        g.add_undirected(0, 2);
        g.orient(0, 1);
        g.orient(1, 2);
        CHECK(apply_meek_rules(g));
        CHECK(g.directed(0, 2));
    }
    SUBCASE("R3") {
        // a = 0, b = 1, c = 2, d = 3: 0-2->1, 0-3->1, 2 and 3 non-adjacent, 0-1.
        Cpdag g(4);
        for (auto [u, v] : Pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}) g.add_undirected(u, v);
        g.orient(2, 1);
        g.orient(3, 1);
        CHECK(apply_meek_rules(g));
        CHECK(g.directed(0, 1));
        CHECK(g.undirected(0, 2));
        CHECK(g.undirected(0, 3));
    }
    SUBCASE("R4") {
        // a = 0, b = 1, c = 2, d = 3: 2 -> 3 -> 1, 0 adjacent to 2 and 3, 2 and 1 non-adjacent.
        Cpdag g(4);
        for (auto [u, v] : Pairs{{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}}) g.add_undirected(u, v);
        g.orient(2, 3);
        g.orient(3, 1);
        apply_meek_rules(g);
        CHECK(g.directed(0, 1));
    }
    SUBCASE("fixpoint: a second pass changes nothing") {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 6);
        B(2, 0) = 0.6;
        B(2, 1) = 0.6;
        B(3, 2) = 0.6;
        B(4, 3) = 0.6;
        B(5, 3) = 0.5;
        B(5, 4) = 0.5;
        auto g = orient_cpdag(pc_skeleton(sem_correlation(B), 5000, 0.01, 3));
        const auto before = g.directed_edges();
        CHECK(!apply_meek_rules(g));
        CHECK(g.directed_edges() == before);
        for (auto [a, b] : g.directed_edges()) CHECK(!g.directed(b, a));
    }
}

TEST_CASE("conflicting v-structures leave the edge undirected and flagged") {
    // Skeleton 0-1, 1-2, 2-3 with empty sepsets everywhere proposes 0->1<-2 and 1->2<-3.
    Skeleton sk;
    sk.p = 4;
    sk.adj.assign(16, 0);
    for (auto [u, v] : Pairs{{0, 1}, {1, 2}, {2, 3}}) sk.adj[u * 4 + v] = sk.adj[v * 4 + u] = 1;
    for (auto pr : Pairs{{0, 2}, {0, 3}, {1, 3}}) sk.sepsets[pr] = {};
    const auto g = orient_cpdag(sk);
    CHECK(g.conflicts == Pairs{{1, 2}});
    CHECK(g.undirected(1, 2));
    CHECK(g.directed(0, 1));
    CHECK(g.directed(3, 2));
}

TEST_CASE("PC-stable skeleton does not depend on variable order") {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 6);
    B(1, 0) = 0.7;
    B(2, 0) = 0.5;
    B(3, 1) = 0.6;
    B(3, 2) = 0.6;
    B(4, 3) = 0.7;
    B(5, 2) = 0.5;
    const auto C = sem_correlation(B);
    const auto base = pc_skeleton(C, 2000, 0.01, 3);
    const std::vector<int> perm = {4, 2, 5, 0, 3, 1};  // new index k holds old variable perm[k]
    Eigen::MatrixXd Cp(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) Cp(a, b) = C(perm[a], perm[b]);
    const auto other = pc_skeleton(Cp, 2000, 0.01, 3);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            if (a != b) CHECK(other.adjacent(a, b) == base.adjacent(perm[a], perm[b]));
}

TEST_CASE("Markov blanket symmetry without directed edges") {
    const auto g = orient_cpdag(pc_skeleton(chain_correlation(), 1000, 0.01, 3));
    for (std::size_t u = 0; u < 3; ++u)
        for (auto v : markov_blanket(g, u)) {
            const auto mv = markov_blanket(g, v);
            CHECK(std::find(mv.begin(), mv.end(), u) != mv.end());
        }
}

TEST_CASE("PC ensemble on a simulated collider") {
    const auto d = sem_data(collider_weights(), 1000, 31);
    const auto plan = make_plan(Strategy::bootstrap, 50, 0.8, 0.8, 4, SampleMeta::of(d));
    PcEnsembleOptions opts;
    const auto st = run_ensemble_pc(d, plan, opts);
    CHECK(st.n_valid == 50);
    CHECK(st.skeleton_freq(0, 2) >= 0.9);
    CHECK(st.skeleton_freq(1, 2) >= 0.9);
    CHECK(st.orient_freq(0, 2) >= 0.7);
    CHECK(st.mb_freq(0, 1) >= 0.7);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(st.skeleton_freq(i, j) == st.skeleton_freq(j, i));
            CHECK(st.skeleton_freq(i, j) >= st.orient_freq(i, j));
            CHECK(st.mb_freq(i, j) <= 1.0);
        }
    REQUIRE(st.consensus.size() == 2);
    CHECK(st.consensus[0].sign == 1);
}

TEST_CASE("PC ensemble under the null and determinism across threads") {
    const auto d = testsupport::simulate_ggm(Eigen::MatrixXd::Identity(5, 5), 300, 12);
    const auto plan = make_plan(Strategy::subsample, 30, 0.8, 0.8, 6, SampleMeta::of(d));
    PcEnsembleOptions one, four;
    four.threads = 4;
    const auto a = run_ensemble_pc(d, plan, one);
    const auto b = run_ensemble_pc(d, plan, four);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) CHECK(a.skeleton_freq(i, j) < 0.5);
    CHECK(io::bn_skeleton_tsv(a) == io::bn_skeleton_tsv(b));
    CHECK(io::bn_orient_tsv(a) == io::bn_orient_tsv(b));
    CHECK(io::bn_mb_tsv(a) == io::bn_mb_tsv(b));
    CHECK_THROWS_AS(make_plan(Strategy::bootstrap, 1, 0.8, 0.8, 1, SampleMeta::of(d)), UsageError);
}
