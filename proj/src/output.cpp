#include "netboot/output.hpp"

#include "netboot/error.hpp"
#include "netboot/tsv.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

namespace netboot::io {

using tsv::format_double;
using nlohmann::json;

namespace {

std::string opt_double(const std::optional<double>& x) { return x ? format_double(*x) : "NA"; }

std::string sign_text(int s) { return s < 0 ? "-1" : "1"; }

json edge_list_json(const std::vector<std::string>& names, const std::vector<SignedEdge>& graph) {
    json arr = json::array();
    for (const auto& e : graph)
        arr.push_back({{"source", names[e.i]}, {"target", names[e.j]}, {"weight", e.weight}, {"sign", e.sign}});
    return arr;
}

}  // namespace

json plan_json(const ResamplePlan& plan) {
    return {{"strategy", std::string(strategy_name(plan.strategy))},
            {"B", plan.B},
            {"subsample_fraction", plan.subsample_fraction},
            {"cluster_fraction", plan.cluster_fraction},
            {"seed", plan.master_seed}};
}

json consensus_json(const ConsensusNetwork& cn) {
    json edges = json::array();
    for (const auto& e : cn.edges) {
        edges.push_back({{"source", cn.var_names[e.i]},
                         {"target", cn.var_names[e.j]},
                         {"freq", e.freq},
                         {"selected", e.selected},
                         {"n_valid", e.n_valid},
                         {"pcor_mean", e.pcor_mean},
                         {"ci_lo", e.ci_lo ? json(*e.ci_lo) : json(nullptr)},
                         {"ci_hi", e.ci_hi ? json(*e.ci_hi) : json(nullptr)},
                         {"pval", e.pval},
                         {"padj", e.padj},
                         {"sign", e.sign}});
    }
    return {{"kind", "ggm"},
            {"variables", cn.var_names},
            {"B", cn.plan.B},
            {"n_valid", cn.n_valid},
            {"failed_replicates", cn.failed_replicates},
            {"lambda", cn.lambda},
            {"lambda_rule",
             {{"kind", to_string(cn.lambda_rule.kind)},
              {"value", cn.lambda_rule.value}}},
            {"tau", cn.tau},
            {"alpha", cn.alpha},
            {"bh_tests", cn.bh_tests},
            {"plan", plan_json(cn.plan)},
            {"edges", std::move(edges)},
            {"graph", edge_list_json(cn.var_names, cn.graph)}};
}

std::string edges_tsv(const ConsensusNetwork& cn) {
    std::string s = "source\ttarget\tfreq\tpcor_mean\tci_lo\tci_hi\tpval\tpadj\tsign\n";
    for (const auto& e : cn.edges) {
        s += cn.var_names[e.i] + "\t" + cn.var_names[e.j] + "\t" + format_double(e.freq) + "\t" +
             format_double(e.pcor_mean) + "\t" + opt_double(e.ci_lo) + "\t" + opt_double(e.ci_hi) + "\t" +
             format_double(e.pval) + "\t" + format_double(e.padj) + "\t" + sign_text(e.sign) + "\n";
    }
    return s;
}

std::string graph_tsv(const std::vector<std::string>& names, const std::vector<SignedEdge>& graph) {
    std::string s = "source\ttarget\tweight\tsign\n";
    for (const auto& e : graph)
        s += names[e.i] + "\t" + names[e.j] + "\t" + format_double(e.weight) + "\t" + sign_text(e.sign) + "\n";
    return s;
}

std::string replicate_edges_tsv(const std::vector<std::string>& names, const std::vector<ReplicateAdjacency>& reps) {
    std::string s = "replicate_id\tsource\ttarget\n";
    for (const auto& r : reps)
        for (auto [i, j] : r.edges) s += std::to_string(r.replicate_id) + "\t" + names[i] + "\t" + names[j] + "\n";
    return s;
}

std::string theta_tsv(const Eigen::MatrixXd& theta) {
    const auto net = to_network(theta);
    std::string s = "i\tj\ttheta\tpcor\n";
    for (Eigen::Index i = 0; i < theta.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (net.adjacency(i, j))
                s += std::to_string(i) + "\t" + std::to_string(j) + "\t" + format_double(theta(i, j)) + "\t" +
                     format_double(net.pcor(i, j)) + "\n";
    return s;
}

json bn_consensus_json(const BnEnsembleStats& st) {
    return {{"kind", "pc"},
            {"variables", st.var_names},
            {"B", st.plan.B},
            {"n_valid", st.n_valid},
            {"failed_replicates", st.failed_replicates},
            {"alpha", st.options.alpha},
            {"max_cond", st.options.max_cond},
            {"tau", st.options.tau},
            {"plan", plan_json(st.plan)},
            {"graph", edge_list_json(st.var_names, st.consensus)}};
}

std::string bn_skeleton_tsv(const BnEnsembleStats& st) {
    std::string s = "source\ttarget\tskeleton_freq\n";
    for (std::size_t i = 0; i < st.p; ++i)
        for (std::size_t j = i + 1; j < st.p; ++j)
            if (st.skeleton_count[i * st.p + j] > 0)
                s += st.var_names[i] + "\t" + st.var_names[j] + "\t" + format_double(st.skeleton_freq(i, j)) + "\n";
    return s;
}

std::string bn_orient_tsv(const BnEnsembleStats& st) {
    std::string s = "from\tto\torient_freq\n";
    for (std::size_t a = 0; a < st.p; ++a)
        for (std::size_t b = 0; b < st.p; ++b)
            if (st.orient_count[a * st.p + b] > 0)
                s += st.var_names[a] + "\t" + st.var_names[b] + "\t" + format_double(st.orient_freq(a, b)) + "\n";
    return s;
}

std::string bn_mb_tsv(const BnEnsembleStats& st) {
    std::string s = "node\tmember\tmb_freq\n";
    for (std::size_t v = 0; v < st.p; ++v)
        for (std::size_t u = 0; u < st.p; ++u)
            if (st.mb_count[v * st.p + u] > 0)
                s += st.var_names[v] + "\t" + st.var_names[u] + "\t" + format_double(st.mb_freq(v, u)) + "\n";
    return s;
}

std::string gdvm_tsv(const std::vector<std::string>& names, const OrbitMatrix& counts) {
    std::string s = "node";
    for (const auto& n : unsigned_orbit_names()) s += "\t" + n;
    s += "\n";
    for (std::size_t v = 0; v < counts.rows; ++v) {
        s += names[v];
        for (std::size_t k = 0; k < counts.cols; ++k) s += "\t" + std::to_string(counts(v, k));
        s += "\n";
    }
    return s;
}

std::string gdvm_signed_tsv(const std::vector<std::string>& names, const OrbitMatrix& signed_counts,
                            const OrbitMatrix& unsigned_counts) {
    std::string s = "node";
    for (const auto& n : signed_orbit_names()) s += "\t" + n;
    for (std::size_t k = 4; k < kUnsignedOrbits; ++k) s += "\t" + unsigned_orbit_names()[k];
    s += "\n";
    for (std::size_t v = 0; v < signed_counts.rows; ++v) {
        s += names[v];
        for (std::size_t k = 0; k < kSignedOrbits; ++k) s += "\t" + std::to_string(signed_counts(v, k));
        for (std::size_t k = 4; k < kUnsignedOrbits; ++k) s += "\t" + std::to_string(unsigned_counts(v, k));
        s += "\n";
    }
    return s;
}

std::string centrality_tsv(const std::vector<std::string>& names, const CentralityReport& rep) {
    std::string s = "node\tdegree\tstrength\tbetweenness\n";
    for (std::size_t v = 0; v < names.size(); ++v)
        s += names[v] + "\t" + std::to_string(rep.degree[v]) + "\t" + format_double(rep.strength[v]) + "\t" +
             format_double(rep.betweenness[v]) + "\n";
    return s;
}

std::string communities_tsv(const std::vector<std::string>& names, const CommunityAssignment& ca) {
    std::string s = "node\tcommunity\n";
    for (std::size_t v = 0; v < names.size(); ++v) s += names[v] + "\t" + std::to_string(ca.community[v]) + "\n";
    return s;
}

std::string differential_tsv(const DifferentialReport& rep) {
    std::string s = "node\tdc\tpval\n";
    for (std::size_t v = 0; v < rep.var_names.size(); ++v)
        s += rep.var_names[v] + "\t" + format_double(rep.dc[v]) + "\t" +
             (rep.pval ? format_double((*rep.pval)[v]) : std::string("NA")) + "\n";
    return s;
}

std::string differential_edges_tsv(const DifferentialReport& rep) {
    std::string s = "source\ttarget\tdfreq\n";
    for (const auto& d : rep.pairs)
        s += rep.var_names[d.i] + "\t" + rep.var_names[d.j] + "\t" + format_double(d.dfreq) + "\n";
    return s;
}

SignedGraph LabeledGraph::signed_graph() const {
    std::vector<EdgeInput> in;
    in.reserve(edges.size());
    for (const auto& e : edges) in.push_back({e.i, e.j, e.sign});
    return SignedGraph(names.size(), in);
}

LabeledGraph read_graph(const std::filesystem::path& path) {
    const auto t = tsv::read(path);
    const int src = t.column("source");
    const int dst = t.column("target");
    const int sgn = t.column("sign");
    const int wgt = t.column("weight");
    if (src < 0 || dst < 0) throw DataError(path.string() + ": graph needs 'source' and 'target' columns");

    LabeledGraph g;
    std::unordered_map<std::string, std::size_t> index;
    auto node = [&](const std::string& name) {
        auto [it, inserted] = index.emplace(name, g.names.size());
        if (inserted) g.names.push_back(name);
        return it->second;
    };
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto where = path.string() + ": row " + std::to_string(r + 2);
        const auto a = node(row[static_cast<std::size_t>(src)]);
        const auto b = node(row[static_cast<std::size_t>(dst)]);
        if (a == b) throw DataError(where + ": self-loop");
        int sign = 1;
        if (sgn >= 0) {
            const auto& sv = row[static_cast<std::size_t>(sgn)];
            if (sv == "1" || sv == "+1" || sv == "+") sign = 1;
            else if (sv == "-1" || sv == "-") sign = -1;
            else throw DataError(where + ": sign must be +1 or -1, found '" + sv + "'");
        }
        double weight = sign;
        if (wgt >= 0) {
            try {
                std::size_t used = 0;
                const auto& wv = row[static_cast<std::size_t>(wgt)];
                weight = std::stod(wv, &used);
                if (used != wv.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw DataError(where + ": unparseable weight");
            }
        }
        const auto i = std::min(a, b), j = std::max(a, b);
        if (!seen.emplace(i, j).second) throw DataError(where + ": repeated edge");
        g.edges.push_back({i, j, weight, sign});
    }
    return g;
}

EnsembleSummary read_ensemble_summary(const std::filesystem::path& dir) {
    const auto cpath = dir / "consensus.json";
    std::ifstream in(cpath);
    if (!in) throw DataError("cannot open " + cpath.string());
    json meta;
    try {
        in >> meta;
    } catch (const json::exception& e) {
        throw DataError(cpath.string() + ": " + e.what());
    }

    EnsembleSummary s;
    s.var_names = meta.at("variables").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < s.var_names.size(); ++i) index.emplace(s.var_names[i], i);
    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) throw DataError(dir.string() + ": unknown variable '" + name + "'");
        return it->second;
    };

    const bool is_pc = meta.value("kind", "ggm") == "pc";
    const auto table = tsv::read(dir / (is_pc ? "bn_skeleton.tsv" : "edges.tsv"));
    const int fcol = table.column(is_pc ? "skeleton_freq" : "freq");
    const int src = table.column("source"), dst = table.column("target");
    if (fcol < 0 || src < 0 || dst < 0) throw DataError(dir.string() + ": malformed frequency table");
    for (const auto& row : table.rows) {
        const auto i = lookup(row[static_cast<std::size_t>(src)]);
        const auto j = lookup(row[static_cast<std::size_t>(dst)]);
        s.freqs.push_back({std::min(i, j), std::max(i, j), std::stod(row[static_cast<std::size_t>(fcol)])});
    }

    const auto rpath = dir / "replicate_edges.tsv";
    if (std::filesystem::exists(rpath)) {
        const std::size_t B = meta.at("B").get<std::size_t>();
        const auto failed = meta.at("failed_replicates").get<std::vector<std::size_t>>();
        s.replicates.resize(B);
        for (std::size_t r = 0; r < B; ++r) {
            s.replicates[r].replicate_id = r;
            s.replicates[r].valid = !std::binary_search(failed.begin(), failed.end(), r);
        }
        const auto rt = tsv::read(rpath);
        const int rid = rt.column("replicate_id"), rs = rt.column("source"), rd = rt.column("target");
        if (rid < 0 || rs < 0 || rd < 0) throw DataError(rpath.string() + ": malformed replicate table");
        for (const auto& row : rt.rows) {
            const auto r = static_cast<std::size_t>(std::stoull(row[static_cast<std::size_t>(rid)]));
            if (r >= B) throw DataError(rpath.string() + ": replicate id out of range");
            const auto i = lookup(row[static_cast<std::size_t>(rs)]);
            const auto j = lookup(row[static_cast<std::size_t>(rd)]);
            s.replicates[r].edges.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    return s;
}

}  // namespace netboot::io
