#include "netboot/cli.hpp"

#include "support/simulate.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

const std::string kDemo = std::string(NETBOOT_DEMO_DIR) + "/demo20.tsv";
const std::string kDemoMeta = std::string(NETBOOT_DEMO_DIR) + "/demo20_meta.tsv";

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "netboot");
    return netboot::cli_main(args);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> ggm_args(const fs::path& out, const std::string& threads, const std::string& seed = "7") {
    return {"infer-ggm", "--data",  kDemo, "--meta",    kDemoMeta, "--resampling", "cluster-bootstrap",
            "--B",       "30",      "--tau", "0.8",     "--alpha", "0.05",         "--seed",
            seed,        "--threads", threads, "--out", out.string(), "--keep-replicates"};
}

std::vector<std::string> pc_args(const fs::path& out, const std::string& threads) {
    return {"infer-pc", "--data", kDemo,  "--meta",    kDemoMeta, "--resampling", "stratified-subsample",
            "--B",      "20",     "--alpha", "0.01",   "--max-cond", "2",         "--tau",
            "0.8",      "--seed", "3",    "--threads", threads,   "--out",        out.string()};
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
    TempDir dir("cli");
    CHECK(run({"infer-ggm", "--resampling", "bootstrap", "--B", "20", "--tau", "0.8", "--alpha", "0.05", "--seed",
               "1", "--threads", "1", "--out", (dir / "o").string()}) == 1);
    CHECK(run({}) == 1);
    CHECK(run({"frobnicate"}) == 1);
    auto bad = ggm_args(dir / "o", "1");
    bad[6] = "jackknife";
    CHECK(run(bad) == 1);
    // A cluster strategy without cluster labels.
    CHECK(run({"infer-ggm", "--data", kDemo, "--resampling", "cluster-bootstrap", "--B", "20", "--tau", "0.8",
               "--alpha", "0.05", "--seed", "1", "--threads", "1", "--out", (dir / "o").string()}) == 1);
    auto both = ggm_args(dir / "o", "1");
    both.insert(both.end(), {"--lambda", "0.1", "--lambda-scale", "0.2"});
    CHECK(run(both) == 1);
    CHECK(run({"--help"}) == 0);
    CHECK(!fs::exists(dir / "o"));
}

TEST_CASE("infer-ggm writes its outputs and is reproducible") {
    TempDir dir("cli");
    REQUIRE(run(ggm_args(dir / "a", "1")) == 0);
    for (const char* f : {"consensus.json", "edges.tsv", "graph.tsv", "provenance.json", "replicate_edges.tsv",
                          "replicate_rows.tsv"})
        CHECK(fs::exists(dir / "a" / f));
    for (const auto& entry : fs::directory_iterator(dir / "a")) CHECK(entry.path().extension() != ".tmp");
    CHECK(slurp(dir / "a" / "edges.tsv").rfind("source\ttarget\tfreq\tpcor_mean\tci_lo\tci_hi\tpval\tpadj\tsign\n", 0) == 0);

    const auto prov = nlohmann::json::parse(slurp(dir / "a" / "provenance.json"));
    CHECK(prov["version"] == netboot::kToolVersion);
    CHECK(prov["config"]["seed"] == 7);
    CHECK(prov["config"]["resampling"] == "cluster-bootstrap");
    const auto cons = nlohmann::json::parse(slurp(dir / "a" / "consensus.json"));
    CHECK(cons["B"] == 30);

    REQUIRE(run(ggm_args(dir / "b", "1")) == 0);
    REQUIRE(run(ggm_args(dir / "c", "8")) == 0);
    for (const char* f : {"consensus.json", "edges.tsv", "graph.tsv", "replicate_edges.tsv", "replicate_rows.tsv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "c" / f));
    }
    auto pa = nlohmann::json::parse(slurp(dir / "a" / "provenance.json"));
    auto pb = nlohmann::json::parse(slurp(dir / "b" / "provenance.json"));
    CHECK(pa["config"]["out"] != pb["config"]["out"]);
    pa["config"].erase("out");
    pb["config"].erase("out");
    CHECK(pa == pb);

    REQUIRE(run(ggm_args(dir / "d", "1", "8")) == 0);
    CHECK(slurp(dir / "a" / "replicate_rows.tsv") != slurp(dir / "d" / "replicate_rows.tsv"));
}

TEST_CASE("infer-pc outputs are thread invariant") {
    TempDir dir("cli");
    REQUIRE(run(pc_args(dir / "a", "1")) == 0);
    REQUIRE(run(pc_args(dir / "b", "8")) == 0);
    for (const char* f : {"consensus.json", "bn_skeleton.tsv", "bn_orient.tsv", "bn_mb.tsv", "graph.tsv"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(slurp(dir / "a" / "bn_orient.tsv").rfind("from\tto\torient_freq\n", 0) == 0);
}

TEST_CASE("graphlets, analyze and compare") {
    TempDir dir("cli");
    REQUIRE(run(ggm_args(dir / "g1", "1")) == 0);
    REQUIRE(run(ggm_args(dir / "g2", "1", "11")) == 0);
    const auto graph = (dir / "g1" / "graph.tsv").string();

    REQUIRE(run({"graphlets", "--graph", graph, "--signed", "--out", (dir / "gl1").string(), "--threads", "1"}) == 0);
    REQUIRE(run({"graphlets", "--graph", graph, "--signed", "--out", (dir / "gl8").string(), "--threads", "8"}) == 0);
    CHECK(slurp(dir / "gl1" / "gdvm.tsv") == slurp(dir / "gl8" / "gdvm.tsv"));
    CHECK(slurp(dir / "gl1" / "gdvm_signed.tsv") == slurp(dir / "gl8" / "gdvm_signed.tsv"));
    CHECK(slurp(dir / "gl1" / "gdvm.tsv").rfind("node\to0\to1\to2", 0) == 0);

    REQUIRE(run({"analyze", "--graph", graph, "--centrality", "--communities", "--seed", "3", "--out",
                 (dir / "an").string()}) == 0);
    CHECK(fs::exists(dir / "an" / "centrality.tsv"));
    CHECK(fs::exists(dir / "an" / "communities.tsv"));

    REQUIRE(run({"compare", "--a", (dir / "g1").string(), "--b", (dir / "g2").string(), "--permutations", "49",
                 "--seed", "1", "--out", (dir / "cmp").string()}) == 0);
    const auto diff = slurp(dir / "cmp" / "differential.tsv");
    CHECK(diff.rfind("node\tdc\tpval\n", 0) == 0);
    CHECK(diff.find("\tNA\n") == std::string::npos);

    // Without retained replicates a permutation test is a data error.
    auto plain = ggm_args(dir / "g3", "1");
    plain.pop_back();
    REQUIRE(run(plain) == 0);
    CHECK(run({"compare", "--a", (dir / "g1").string(), "--b", (dir / "g3").string(), "--permutations", "49",
               "--seed", "1", "--out", (dir / "cmp2").string()}) == 2);
    CHECK(run({"compare", "--a", (dir / "g1").string(), "--b", (dir / "g3").string(), "--out",
               (dir / "cmp3").string()}) == 0);
}

TEST_CASE("data and numerical errors map to exit codes 2 and 3") {
    TempDir dir("cli");
    {
        std::ofstream f(dir / "na.tsv");
        f << "sample_id\ta\tb\ns1\t1\t2\ns2\tNA\t3\ns3\t2\t1\ns4\t0\t0\n";
    }
    auto args = std::vector<std::string>{"infer-ggm", "--data", (dir / "na.tsv").string(), "--resampling",
                                         "bootstrap", "--B", "20", "--tau", "0.8", "--alpha", "0.05", "--seed", "1",
                                         "--threads", "1", "--out", (dir / "o").string()};
    CHECK(run(args) == 2);

    // A column that is non-zero in one row only: nearly every small subsample fails.
    {
        std::ofstream f(dir / "flat.tsv");
        f << "sample_id\ta\tb\tc\n";
        netboot::Xoshiro256 rng(1);
        for (int r = 0; r < 100; ++r)
            f << "s" << r << "\t" << rng.normal() << "\t" << rng.normal() << "\t" << (r == 5 ? 1 : 0) << "\n";
    }
    CHECK(run({"infer-ggm", "--data", (dir / "flat.tsv").string(), "--resampling", "subsample",
               "--subsample-fraction", "0.03", "--B", "40", "--tau", "0.8", "--alpha", "0.05", "--seed", "1",
               "--threads", "1", "--out", (dir / "o").string()}) == 3);
    CHECK(!fs::exists(dir / "o"));
}
