#include "netboot/cli.hpp"

#include "netboot/dataset.hpp"
#include "netboot/ensemble.hpp"
#include "netboot/error.hpp"
#include "netboot/graphlets.hpp"
#include "netboot/netanalysis.hpp"
#include "netboot/output.hpp"
#include "netboot/pc.hpp"
#include "netboot/resampling.hpp"
#include "netboot/tsv.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace netboot {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct InferConfig {
    std::string data;
    std::string meta;
    std::string missing = "reject";
    std::string resampling;
    std::size_t B = 0;
    double subsample_fraction = 0.8;
    double cluster_fraction = 0.8;
    std::optional<double> lambda;
    std::optional<double> lambda_scale;
    double tau = 0.8;
    double alpha = 0.05;
    std::size_t max_cond = 3;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    bool keep_replicates = false;
};

struct GraphletsConfig {
    std::string graph;
    bool is_signed = false;
    std::string out;
    int threads = 1;
};

struct AnalyzeConfig {
    std::string graph;
    bool centrality = false;
    bool communities = false;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
};

struct CompareConfig {
    std::string a, b;
    std::size_t permutations = 0;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
};

json provenance(const std::string& subcommand, json config) {
    return {{"tool", "netboot"}, {"version", kToolVersion}, {"subcommand", subcommand}, {"config", std::move(config)}};
}

void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files) tsv::write_atomic(dir / name, content);
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

Dataset load_for_inference(const InferConfig& c) {
    const auto policy = c.missing == "drop-rows" ? MissingPolicy::drop_rows : MissingPolicy::reject;
    LoadReport report;
    auto d = load_dataset(c.data, c.meta.empty() ? std::nullopt : std::optional<fs::path>(c.meta), policy, &report);
    std::cerr << "loaded " << d.n_samples() << " samples x " << d.n_vars() << " variables";
    if (report.rows_dropped > 0) std::cerr << "; " << report.rows_dropped << " row(s) dropped for missing values";
    std::cerr << "\n";
    return d;
}

ResamplePlan plan_for(const InferConfig& c, const Dataset& d) {
    return make_plan(parse_strategy(c.resampling), c.B, c.subsample_fraction, c.cluster_fraction, c.seed,
                     SampleMeta::of(d));
}

json infer_config_json(const InferConfig& c, bool ggm) {
    json j = {{"data", c.data},
              {"meta", c.meta.empty() ? json(nullptr) : json(c.meta)},
              {"missing", c.missing},
              {"resampling", c.resampling},
              {"B", c.B},
              {"subsample_fraction", c.subsample_fraction},
              {"cluster_fraction", c.cluster_fraction},
              {"tau", c.tau},
              {"alpha", c.alpha},
              {"seed", c.seed},
              {"threads", c.threads},
              {"out", c.out},
              {"keep_replicates", c.keep_replicates}};
    if (ggm) {
        j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
        j["lambda_scale"] = c.lambda_scale ? json(*c.lambda_scale) : json(nullptr);
    } else {
        j["max_cond"] = c.max_cond;
    }
    return j;
}

std::vector<ResampleIndex> all_draws(const ResamplePlan& plan, const Dataset& d) {
    std::vector<ResampleIndex> draws;
    const auto meta = SampleMeta::of(d);
    for (std::size_t r = 0; r < plan.B; ++r) draws.push_back(draw(plan, r, meta));
    return draws;
}

void run_infer_ggm(const InferConfig& c) {
    const auto d = load_for_inference(c);
    const auto plan = plan_for(c, d);
    GgmEnsembleOptions opts;
    if (c.lambda) opts.lambda = {LambdaRule::Kind::fixed, *c.lambda};
    if (c.lambda_scale) opts.lambda = {LambdaRule::Kind::scale_of_max, *c.lambda_scale};
    opts.tau = c.tau;
    opts.alpha = c.alpha;
    opts.threads = c.threads;
    opts.keep_replicates = c.keep_replicates;

    const auto cn = run_ensemble_ggm(d, plan, opts);
    std::cerr << cn.n_valid << " of " << plan.B << " replicates valid; lambda = " << cn.lambda << "; "
              << cn.graph.size() << " consensus edges\n";

    std::vector<std::pair<std::string, std::string>> files = {
        {"consensus.json", json_text(io::consensus_json(cn))},
        {"edges.tsv", io::edges_tsv(cn)},
        {"graph.tsv", io::graph_tsv(cn.var_names, cn.graph)},
    };
    if (c.keep_replicates) {
        files.emplace_back("replicate_edges.tsv", io::replicate_edges_tsv(cn.var_names, cn.replicates));
        files.emplace_back("replicate_rows.tsv", replicates_tsv(all_draws(plan, d)));
    }
    auto prov = provenance("infer-ggm", infer_config_json(c, true));
    prov["resolved"] = {{"lambda", cn.lambda}, {"plan", io::plan_json(plan)}};
    files.emplace_back("provenance.json", json_text(prov));
    write_outputs(c.out, files);
}

void run_infer_pc(const InferConfig& c) {
    const auto d = load_for_inference(c);
    const auto plan = plan_for(c, d);
    PcEnsembleOptions opts;
    opts.alpha = c.alpha;
    opts.max_cond = c.max_cond;
    opts.tau = c.tau;
    opts.threads = c.threads;
    opts.keep_replicates = c.keep_replicates;

    const auto st = run_ensemble_pc(d, plan, opts);
    std::cerr << st.n_valid << " of " << plan.B << " replicates valid; " << st.consensus.size()
              << " consensus skeleton edges\n";

    std::vector<std::pair<std::string, std::string>> files = {
        {"consensus.json", json_text(io::bn_consensus_json(st))},
        {"bn_skeleton.tsv", io::bn_skeleton_tsv(st)},
        {"bn_orient.tsv", io::bn_orient_tsv(st)},
        {"bn_mb.tsv", io::bn_mb_tsv(st)},
        {"graph.tsv", io::graph_tsv(st.var_names, st.consensus)},
    };
    if (c.keep_replicates) {
        files.emplace_back("replicate_edges.tsv", io::replicate_edges_tsv(st.var_names, st.replicates));
        files.emplace_back("replicate_rows.tsv", replicates_tsv(all_draws(plan, d)));
    }
    auto prov = provenance("infer-pc", infer_config_json(c, false));
    prov["resolved"] = {{"plan", io::plan_json(plan)}};
    files.emplace_back("provenance.json", json_text(prov));
    write_outputs(c.out, files);
}

void run_graphlets(const GraphletsConfig& c) {
    const auto lg = io::read_graph(c.graph);
    const auto g = lg.signed_graph();
    const auto counts = gdvm_unsigned(g, c.threads);
    std::vector<std::pair<std::string, std::string>> files = {{"gdvm.tsv", io::gdvm_tsv(lg.names, counts)}};
    if (c.is_signed) {
        const auto sc = gdvm_signed(g, c.threads);
        files.emplace_back("gdvm_signed.tsv", io::gdvm_signed_tsv(lg.names, sc, counts));
    }
    files.emplace_back("provenance.json",
                       json_text(provenance("graphlets", {{"graph", c.graph},
                                                          {"signed", c.is_signed},
                                                          {"out", c.out},
                                                          {"threads", c.threads}})));
    std::cerr << g.size() << " nodes, " << g.edge_count() << " edges\n";
    write_outputs(c.out, files);
}

void run_analyze(AnalyzeConfig c) {
    if (!c.centrality && !c.communities) c.centrality = c.communities = true;
    const auto lg = io::read_graph(c.graph);
    std::vector<std::pair<std::string, std::string>> files;
    if (c.centrality)
        files.emplace_back("centrality.tsv",
                           io::centrality_tsv(lg.names, centrality(lg.names.size(), lg.edges, c.threads)));
    if (c.communities) {
        const auto ca = communities(lg.names.size(), lg.edges, c.seed);
        std::cerr << "modularity " << ca.modularity << "\n";
        files.emplace_back("communities.tsv", io::communities_tsv(lg.names, ca));
    }
    files.emplace_back("provenance.json",
                       json_text(provenance("analyze", {{"graph", c.graph},
                                                        {"centrality", c.centrality},
                                                        {"communities", c.communities},
                                                        {"seed", c.seed},
                                                        {"out", c.out},
                                                        {"threads", c.threads}})));
    write_outputs(c.out, files);
}

void run_compare(const CompareConfig& c) {
    const auto a = io::read_ensemble_summary(c.a);
    const auto b = io::read_ensemble_summary(c.b);
    const auto rep = differential(a, b, c.permutations, c.seed, c.threads);
    write_outputs(c.out, {{"differential.tsv", io::differential_tsv(rep)},
                          {"differential_edges.tsv", io::differential_edges_tsv(rep)},
                          {"provenance.json", json_text(provenance("compare", {{"a", c.a},
                                                                               {"b", c.b},
                                                                               {"permutations", c.permutations},
                                                                               {"seed", c.seed},
                                                                               {"out", c.out},
                                                                               {"threads", c.threads}}))}});
}

void add_infer_common(CLI::App* sub, InferConfig& c) {
    sub->add_option("--data", c.data, "Sample x variable TSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--meta", c.meta, "Metadata TSV with sample_id and optional stratum/cluster")
        ->check(CLI::ExistingFile);
    sub->add_option("--missing", c.missing, "Missing-value policy")
        ->check(CLI::IsMember({"reject", "drop-rows"}));
    sub->add_option("--resampling", c.resampling, "Resampling strategy")
        ->required()
        ->check(CLI::IsMember({"bootstrap", "subsample", "stratified-bootstrap", "stratified-subsample",
                               "cluster-bootstrap", "fractional-cluster-bootstrap"}));
    sub->add_option("--B", c.B, "Number of replicates")->required();
    sub->add_option("--tau", c.tau, "Consensus selection-frequency threshold")->required();
    sub->add_option("--seed", c.seed, "Master seed")->required();
    sub->add_option("--threads", c.threads, "Worker threads")->required()->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output directory")->required();
    sub->add_flag("--keep-replicates", c.keep_replicates, "Write per-replicate edges and row draws");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Resampling-based network inference and graphlet analysis", "netboot"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    InferConfig ggm, pc;
    auto* s_ggm = app.add_subcommand("infer-ggm", "Graphical-lasso ensemble with edge-level statistics");
    add_infer_common(s_ggm, ggm);
    s_ggm->add_option("--subsample-fraction", ggm.subsample_fraction, "Row fraction for subsampling strategies");
    s_ggm->add_option("--cluster-fraction", ggm.cluster_fraction, "Cluster fraction for fractional cluster bootstrap");
    auto* o_lambda = s_ggm->add_option("--lambda", ggm.lambda, "Fixed glasso penalty");
    auto* o_scale = s_ggm->add_option("--lambda-scale", ggm.lambda_scale, "Penalty as a multiple of lambda_max, without the null floor");
    o_lambda->excludes(o_scale);
    s_ggm->add_option("--alpha", ggm.alpha, "Confidence-interval level")->required();

    auto* s_pc = app.add_subcommand("infer-pc", "PC-stable ensemble with skeleton and Markov-blanket frequencies");
    add_infer_common(s_pc, pc);
    s_pc->add_option("--subsample-fraction", pc.subsample_fraction, "Row fraction for subsampling strategies");
    s_pc->add_option("--cluster-fraction", pc.cluster_fraction, "Cluster fraction for fractional cluster bootstrap");
    s_pc->add_option("--alpha", pc.alpha, "Conditional-independence test level")->required();
    s_pc->add_option("--max-cond", pc.max_cond, "Largest conditioning set")->required();

    GraphletsConfig gl;
    auto* s_gl = app.add_subcommand("graphlets", "Graphlet degree vector matrices");
    s_gl->add_option("--graph", gl.graph, "Edge list TSV (source, target[, sign])")->required()->check(CLI::ExistingFile);
    s_gl->add_flag("--signed", gl.is_signed, "Also write signed orbit counts");
    s_gl->add_option("--out", gl.out, "Output directory")->required();
    s_gl->add_option("--threads", gl.threads, "Worker threads")->required()->check(CLI::PositiveNumber);

    AnalyzeConfig an;
    auto* s_an = app.add_subcommand("analyze", "Centrality and community detection");
    s_an->add_option("--graph", an.graph, "Edge list TSV")->required()->check(CLI::ExistingFile);
    s_an->add_flag("--centrality", an.centrality, "Degree, strength and betweenness");
    auto* f_comm = s_an->add_flag("--communities", an.communities, "Louvain communities");
    s_an->add_option("--seed", an.seed, "Seed for the community scan order")->needs(f_comm);
    s_an->add_option("--out", an.out, "Output directory")->required();
    s_an->add_option("--threads", an.threads, "Worker threads")->check(CLI::PositiveNumber);

    CompareConfig cmp;
    auto* s_cmp = app.add_subcommand("compare", "Differential connectivity between two ensembles");
    s_cmp->add_option("--a", cmp.a, "First ensemble output directory")->required()->check(CLI::ExistingDirectory);
    s_cmp->add_option("--b", cmp.b, "Second ensemble output directory")->required()->check(CLI::ExistingDirectory);
    auto* o_perm = s_cmp->add_option("--permutations", cmp.permutations, "Permutation count");
    s_cmp->add_option("--seed", cmp.seed, "Permutation seed")->needs(o_perm);
    s_cmp->add_option("--out", cmp.out, "Output directory")->required();
    s_cmp->add_option("--threads", cmp.threads, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (s_ggm->parsed()) run_infer_ggm(ggm);
        else if (s_pc->parsed()) run_infer_pc(pc);
        else if (s_gl->parsed()) run_graphlets(gl);
        else if (s_an->parsed()) run_analyze(an);
        else if (s_cmp->parsed()) run_compare(cmp);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace netboot
