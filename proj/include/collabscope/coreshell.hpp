#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collabscope/measures.hpp"
#include "collabscope/model.hpp"
#include "collabscope/stats.hpp"

namespace collabscope {

// Binary split of the graph into bridging "core" nodes (local transitivity
// C < 1) and single-group "shell" nodes (C = 1, including degree <= 1).
struct CoreShellLabeling {
    enum class Label : std::uint8_t { core, shell };
    static constexpr std::uint32_t survives = std::numeric_limits<std::uint32_t>::max();

    std::vector<Label> labels;  // by node index
    std::size_t n_core = 0;
    std::size_t n_shell = 0;
    // Peel round at which each node was removed; `survives` marks nodes of a
    // residual where no C = 1 node remains. Present only after peel().
    std::optional<std::vector<std::uint32_t>> coreness;
};

namespace detail {

// C == 1 test in exact integer arithmetic: degree <= 1, or all neighbor
// pairs tied.
inline bool is_shell_exact(std::uint64_t ties, std::size_t degree) {
    if (degree <= 1) return true;
    return 2 * ties == static_cast<std::uint64_t>(degree) *
                           static_cast<std::uint64_t>(degree - 1);
}

}  // namespace detail

inline CoreShellLabeling decompose(const CollabGraph& g) {
    if (g.node_count() == 0) throw std::invalid_argument("decompose: empty graph");
    CoreShellLabeling out;
    out.labels.resize(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const bool shell = detail::is_shell_exact(neighbor_tie_count(g, v), g.degree(v));
        out.labels[v] = shell ? CoreShellLabeling::Label::shell : CoreShellLabeling::Label::core;
        if (shell)
            ++out.n_shell;
        else
            ++out.n_core;
    }
    return out;
}

// Iterative peeling: each round simultaneously removes every node whose local
// transitivity on the current residual graph equals 1 (isolated and degree-1
// nodes included) and records the round as its coreness level. Simultaneous
// removal makes the result independent of node order. Stops when no node
// qualifies or the residual is empty; survivors get the `survives` sentinel.
inline CoreShellLabeling peel(const CollabGraph& g,
                              std::optional<std::size_t> max_rounds = std::nullopt) {
    CoreShellLabeling out = decompose(g);
    const std::size_t n = g.node_count();
    std::vector<char> alive(n, 1);
    std::vector<std::uint32_t> level(n, CoreShellLabeling::survives);

    auto residual_shell = [&](std::size_t v) {
        std::vector<std::size_t> nb;
        for (std::size_t u : g.neighbors(v))
            if (alive[u]) nb.push_back(u);
        if (nb.size() <= 1) return true;
        std::uint64_t ties = 0;
        for (std::size_t a = 0; a < nb.size(); ++a)
            for (std::size_t b = a + 1; b < nb.size(); ++b)
                if (g.has_edge(nb[a], nb[b])) ++ties;
        return detail::is_shell_exact(ties, nb.size());
    };

    std::size_t remaining = n;
    for (std::uint32_t round = 0; remaining > 0; ++round) {
        if (max_rounds && round >= *max_rounds) break;
        std::vector<std::size_t> to_remove;
        for (std::size_t v = 0; v < n; ++v)
            if (alive[v] && residual_shell(v)) to_remove.push_back(v);
        if (to_remove.empty()) break;
        for (std::size_t v : to_remove) {
            alive[v] = 0;
            level[v] = round;
        }
        remaining -= to_remove.size();
    }
    out.coreness = std::move(level);
    return out;
}

// Core-vs-shell comparison of a per-node attribute: one-tailed Mann-Whitney
// (alternative: core values larger), the two-sample KS test, and both group
// medians.
struct ComparisonResult {
    std::vector<double> core_values;
    std::vector<double> shell_values;
    stats::TestResult mwu;
    stats::TestResult ks;
    double core_median = 0.0;
    double shell_median = 0.0;
};

inline ComparisonResult group_compare(const CoreShellLabeling& labeling,
                                      std::span<const double> attribute,
                                      const stats::MwuOptions& mwu_options = {}) {
    if (attribute.size() != labeling.labels.size())
        throw std::invalid_argument("group_compare: attribute must cover all nodes");
    ComparisonResult r;
    for (std::size_t v = 0; v < attribute.size(); ++v) {
        if (labeling.labels[v] == CoreShellLabeling::Label::core)
            r.core_values.push_back(attribute[v]);
        else
            r.shell_values.push_back(attribute[v]);
    }
    if (r.core_values.empty()) throw std::invalid_argument("group_compare: core group is empty");
    if (r.shell_values.empty()) throw std::invalid_argument("group_compare: shell group is empty");
    r.mwu = stats::mann_whitney_u(r.core_values, r.shell_values, stats::Alternative::greater,
                                  mwu_options);
    r.ks = stats::ks_two_sample(r.core_values, r.shell_values);
    r.core_median = stats::median(r.core_values);
    r.shell_median = stats::median(r.shell_values);
    return r;
}

}  // namespace collabscope
