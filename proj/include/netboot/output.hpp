#pragma once

#include "netboot/ensemble.hpp"
#include "netboot/graphlets.hpp"
#include "netboot/netanalysis.hpp"
#include "netboot/pc.hpp"
#include "netboot/signed_graph.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

// File formats shared by the CLI and the tests. Writers return file content;
// callers decide where it goes (tsv::write_atomic for real outputs).
namespace netboot::io {

nlohmann::json plan_json(const ResamplePlan& plan);

nlohmann::json consensus_json(const ConsensusNetwork& cn);
std::string edges_tsv(const ConsensusNetwork& cn);
std::string graph_tsv(const std::vector<std::string>& names, const std::vector<SignedEdge>& graph);
std::string replicate_edges_tsv(const std::vector<std::string>& names, const std::vector<ReplicateAdjacency>& reps);
std::string theta_tsv(const Eigen::MatrixXd& theta);

nlohmann::json bn_consensus_json(const BnEnsembleStats& st);
std::string bn_skeleton_tsv(const BnEnsembleStats& st);
std::string bn_orient_tsv(const BnEnsembleStats& st);
std::string bn_mb_tsv(const BnEnsembleStats& st);

std::string gdvm_tsv(const std::vector<std::string>& names, const OrbitMatrix& counts);
// 15 signed columns followed by unsigned o4..o14.
std::string gdvm_signed_tsv(const std::vector<std::string>& names, const OrbitMatrix& signed_counts,
                            const OrbitMatrix& unsigned_counts);

std::string centrality_tsv(const std::vector<std::string>& names, const CentralityReport& rep);
std::string communities_tsv(const std::vector<std::string>& names, const CommunityAssignment& ca);
std::string differential_tsv(const DifferentialReport& rep);
std::string differential_edges_tsv(const DifferentialReport& rep);

struct LabeledGraph {
    std::vector<std::string> names;  // order of first appearance in the file
    std::vector<SignedEdge> edges;   // i < j
    SignedGraph signed_graph() const;
};

// Edge list with header columns `source`, `target`, optional `sign` (+1/-1,
// default +1) and optional `weight` (default: the sign). Throws DataError on
// malformed rows, self-loops and repeated pairs.
LabeledGraph read_graph(const std::filesystem::path& path);

// Loads the selection frequencies of an infer-ggm or infer-pc output directory,
// with replicate adjacencies when the run kept them.
EnsembleSummary read_ensemble_summary(const std::filesystem::path& dir);

}  // namespace netboot::io
