#include "netboot/stats.hpp"

#include "netboot/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netboot {

double empirical_pvalue(std::span<const double> samples) {
    if (samples.empty()) throw UsageError("empirical p-value needs at least one sample");
    std::size_t le = 0, ge = 0;
    for (double x : samples) {
        if (x <= 0.0) ++le;
        if (x >= 0.0) ++ge;
    }
    const double denom = static_cast<double>(samples.size() + 1);
    const double p = 2.0 * static_cast<double>(1 + std::min(le, ge)) / denom;
    return std::min(1.0, p);
}

std::vector<double> bh_adjust(std::span<const double> pvals) {
    const std::size_t m = pvals.size();
    std::vector<double> out(m);
    if (m == 0) return out;
    for (double p : pvals)
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p-values must lie in [0, 1]");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });

    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
        const std::size_t idx = order[r];
        const double scaled = pvals[idx] * static_cast<double>(m) / static_cast<double>(r + 1);
        running = std::min(running, scaled);
        out[idx] = running;
    }
    return out;
}

double quantile(std::span<const double> samples, double q) {
    if (samples.empty()) throw UsageError("quantile of an empty sample");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double h = static_cast<double>(x.size() - 1) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return x[lo];
    return x[lo] + frac * (x[hi] - x[lo]);
}

std::optional<std::pair<double, double>> percentile_ci(std::span<const double> samples, double alpha) {
    if (samples.size() < kMinCiSamples) return std::nullopt;
    return std::pair{quantile(samples, alpha / 2.0), quantile(samples, 1.0 - alpha / 2.0)};
}

}  // namespace netboot
