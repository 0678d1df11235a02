#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace netboot {

// Two-sided add-one empirical p-value of "centered at zero":
//   2 * min((1 + #{x <= 0}), (1 + #{x >= 0})) / (n + 1), capped at 1.
// Exact zeros count on both sides.
double empirical_pvalue(std::span<const double> samples);

// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_adjust(std::span<const double> pvals);

// Inclusive linear-interpolation quantile: with sorted x_1..x_m, q maps to rank
// 1 + (m - 1) q. The input need not be sorted.
double quantile(std::span<const double> samples, double q);

inline constexpr std::size_t kMinCiSamples = 10;

// (quantile(alpha/2), quantile(1 - alpha/2)); nullopt with fewer than 10 samples.
std::optional<std::pair<double, double>> percentile_ci(std::span<const double> samples, double alpha);

}  // namespace netboot
