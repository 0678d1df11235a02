#pragma once

#include "netboot/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netboot {

enum class Strategy {
    bootstrap,
    subsample,
    stratified_bootstrap,
    stratified_subsample,
    cluster_bootstrap,
    fractional_cluster_bootstrap,
};

// CLI spelling, e.g. "stratified-bootstrap".
std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view name);

bool is_stratified(Strategy s);
bool is_cluster(Strategy s);

// The part of a Dataset that resampling depends on.
struct SampleMeta {
    std::size_t n = 0;
    std::optional<Labels> stratum;
    std::optional<Labels> cluster;

    static SampleMeta of(const Dataset& d) { return {d.n_samples(), d.stratum, d.cluster}; }
};

struct ResamplePlan {
    Strategy strategy = Strategy::bootstrap;
    std::size_t B = 0;
    double subsample_fraction = 0.8;
    double cluster_fraction = 0.8;
    std::uint64_t master_seed = 0;
};

struct ResampleIndex {
    std::size_t replicate_id = 0;
    std::vector<std::size_t> rows;
    std::uint64_t replicate_seed = 0;
};

ResamplePlan make_plan(Strategy strategy, std::size_t B, double subsample_fraction, double cluster_fraction,
                       std::uint64_t seed, const SampleMeta& meta);

// Throws UsageError if the plan cannot be applied to meta.
void check_plan(const ResamplePlan& plan, const SampleMeta& meta);

ResampleIndex draw(const ResamplePlan& plan, std::size_t replicate_id, const SampleMeta& meta);

// ceil(fraction * n), computed so that exact products such as 0.8 * 30 are not
// pushed up by representation error.
std::size_t fraction_count(double fraction, std::size_t n);

// Audit dump: one row per distinct (replicate, row) with its multiplicity.
std::string replicates_tsv(const std::vector<ResampleIndex>& draws);

}  // namespace netboot
