#include "netboot/resampling.hpp"

#include "netboot/error.hpp"
#include "netboot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace netboot {

namespace {

constexpr struct {
    Strategy s;
    std::string_view name;
} kStrategyNames[] = {
    {Strategy::bootstrap, "bootstrap"},
    {Strategy::subsample, "subsample"},
    {Strategy::stratified_bootstrap, "stratified-bootstrap"},
    {Strategy::stratified_subsample, "stratified-subsample"},
    {Strategy::cluster_bootstrap, "cluster-bootstrap"},
    {Strategy::fractional_cluster_bootstrap, "fractional-cluster-bootstrap"},
};

void with_replacement(Xoshiro256& rng, const std::vector<std::size_t>& pool, std::size_t count,
                      std::vector<std::size_t>& out) {
    for (std::size_t k = 0; k < count; ++k) out.push_back(pool[rng.uniform_index(pool.size())]);
}

// Partial Fisher-Yates; the chosen rows are appended in ascending order.
void without_replacement(Xoshiro256& rng, std::vector<std::size_t> pool, std::size_t count,
                         std::vector<std::size_t>& out) {
    for (std::size_t k = 0; k < count; ++k) {
        const auto j = k + rng.uniform_index(pool.size() - k);
        std::swap(pool[k], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    out.insert(out.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
}

}  // namespace

std::string_view strategy_name(Strategy s) {
    for (const auto& e : kStrategyNames)
        if (e.s == s) return e.name;
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    for (const auto& e : kStrategyNames)
        if (e.name == name) return e.s;
    throw UsageError("unknown resampling strategy '" + std::string(name) + "'");
}

bool is_stratified(Strategy s) {
    return s == Strategy::stratified_bootstrap || s == Strategy::stratified_subsample;
}

bool is_cluster(Strategy s) {
    return s == Strategy::cluster_bootstrap || s == Strategy::fractional_cluster_bootstrap;
}

std::size_t fraction_count(double fraction, std::size_t n) {
    const double x = fraction * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
    return std::clamp<std::size_t>(k, 1, n);
}

void check_plan(const ResamplePlan& plan, const SampleMeta& meta) {
    if (plan.B < 2) throw UsageError("replicate count B must be at least 2");
    auto in_unit = [](double f) { return f > 0.0 && f <= 1.0; };
    if (!in_unit(plan.subsample_fraction)) throw UsageError("subsample fraction must lie in (0, 1]");
    if (!in_unit(plan.cluster_fraction)) throw UsageError("cluster fraction must lie in (0, 1]");
    if (is_stratified(plan.strategy) && !meta.stratum) throw UsageError("stratum labels required for " + std::string(strategy_name(plan.strategy)));
    if (is_cluster(plan.strategy) && !meta.cluster) throw UsageError("cluster labels required for " + std::string(strategy_name(plan.strategy)));
    if (meta.n == 0) throw UsageError("empty dataset");
}

ResamplePlan make_plan(Strategy strategy, std::size_t B, double subsample_fraction, double cluster_fraction,
                       std::uint64_t seed, const SampleMeta& meta) {
    ResamplePlan plan{strategy, B, subsample_fraction, cluster_fraction, seed};
    check_plan(plan, meta);
    return plan;
}

ResampleIndex draw(const ResamplePlan& plan, std::size_t replicate_id, const SampleMeta& meta) {
    if (replicate_id >= plan.B) throw UsageError("replicate id out of range");
    ResampleIndex out;
    out.replicate_id = replicate_id;
    out.replicate_seed = replicate_seed(plan.master_seed, replicate_id);
    Xoshiro256 rng(out.replicate_seed);

    std::vector<std::size_t> all(meta.n);
    std::iota(all.begin(), all.end(), std::size_t{0});

    switch (plan.strategy) {
    case Strategy::bootstrap:
        out.rows.reserve(meta.n);
        with_replacement(rng, all, meta.n, out.rows);
        break;
    case Strategy::subsample:
        without_replacement(rng, std::move(all), fraction_count(plan.subsample_fraction, meta.n), out.rows);
        break;
    case Strategy::stratified_bootstrap:
        for (const auto& members : meta.stratum->members()) with_replacement(rng, members, members.size(), out.rows);
        break;
    case Strategy::stratified_subsample:
        for (const auto& members : meta.stratum->members())
            without_replacement(rng, members, fraction_count(plan.subsample_fraction, members.size()), out.rows);
        break;
    case Strategy::cluster_bootstrap:
    case Strategy::fractional_cluster_bootstrap: {
        const auto clusters = meta.cluster->members();
        const std::size_t K = clusters.size();
        const std::size_t draws = plan.strategy == Strategy::cluster_bootstrap
                                      ? K
                                      : fraction_count(plan.cluster_fraction, K);
        for (std::size_t k = 0; k < draws; ++k) {
            const auto& c = clusters[rng.uniform_index(K)];
            out.rows.insert(out.rows.end(), c.begin(), c.end());
        }
        break;
    }
    }
    return out;
}

std::string replicates_tsv(const std::vector<ResampleIndex>& draws) {
    std::string s = "replicate_id\trow_index\tmultiplicity\n";
    for (const auto& d : draws) {
        std::map<std::size_t, std::size_t> counts;
        for (auto r : d.rows) ++counts[r];
        for (auto [row, m] : counts)
            s += std::to_string(d.replicate_id) + "\t" + std::to_string(row) + "\t" + std::to_string(m) + "\n";
    }
    return s;
}

}  // namespace netboot
