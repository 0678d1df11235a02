#include "netboot/signed_graph.hpp"

#include "netboot/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace netboot {

SignedGraph::SignedGraph(std::size_t p, std::span<const EdgeInput> edges) {
    if (p > std::numeric_limits<std::uint32_t>::max()) throw UsageError("graph too large");
    std::vector<std::size_t> deg(p, 0);
    for (const auto& e : edges) {
        if (e.u >= p || e.v >= p) throw UsageError("edge endpoint out of range");
        if (e.u == e.v) throw UsageError("self-loop at node " + std::to_string(e.u));
        if (e.sign != 1 && e.sign != -1) throw UsageError("edge sign must be +1 or -1");
        ++deg[e.u];
        ++deg[e.v];
    }
    offsets_.assign(p + 1, 0);
    for (std::size_t v = 0; v < p; ++v) offsets_[v + 1] = offsets_[v] + deg[v];

    std::vector<std::pair<std::uint32_t, std::int8_t>> arcs(offsets_[p]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges) {
        const auto s = static_cast<std::int8_t>(e.sign);
        arcs[fill[e.u]++] = {static_cast<std::uint32_t>(e.v), s};
        arcs[fill[e.v]++] = {static_cast<std::uint32_t>(e.u), s};
    }
    nbr_.resize(arcs.size());
    sgn_.resize(arcs.size());
    for (std::size_t v = 0; v < p; ++v) {
        auto first = arcs.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
        auto last = arcs.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
        std::sort(first, last);
        for (auto it = first; it != last; ++it) {
            if (it != first && it->first == (it - 1)->first)
                throw UsageError("repeated edge " + std::to_string(v) + "-" + std::to_string(it->first));
            const auto k = static_cast<std::size_t>(it - arcs.begin());
            nbr_[k] = it->first;
            sgn_[k] = it->second;
        }
    }
}

int SignedGraph::sign(std::size_t u, std::size_t v) const {
    const auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), static_cast<std::uint32_t>(v));
    if (it == nb.end() || *it != v) return 0;
    return signs(u)[static_cast<std::size_t>(it - nb.begin())];
}

std::vector<EdgeInput> SignedGraph::edges() const {
    std::vector<EdgeInput> out;
    out.reserve(edge_count());
    for (std::size_t u = 0; u < size(); ++u) {
        const auto nb = neighbors(u);
        const auto sg = signs(u);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (nb[k] > u) out.push_back({u, nb[k], sg[k]});
    }
    return out;
}

}  // namespace netboot
