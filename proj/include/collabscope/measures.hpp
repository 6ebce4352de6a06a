#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collabscope/model.hpp"

namespace collabscope {

// Normalization rule for the within-team entropy denominator.
// `max` divides by log(max{|p|, N_d}) as the measure is defined; `min` divides
// by log(min{|p|, N_d}), the tight upper bound on the entropy itself, and is
// provided as a configuration alternative.
enum class EntropyNorm { max, min };

// Normalized Shannon entropy of an author's discipline mix, in [0,1].
// Convention 0*log(0) = 0. Requires at least two disciplines in the index,
// otherwise the normalization is undefined.
inline double individual_entropy(const DisciplineVector& x, const DisciplineIndex& index) {
    if (index.size() < 2)
        throw std::invalid_argument("individual_entropy: discipline index must have N_d >= 2");
    if (x.size() != index.size())
        throw std::invalid_argument("individual_entropy: vector/index size mismatch");
    double s = 0.0;
    for (double v : x.entries())
        if (v > 0.0) s -= v * std::log(v);
    const double h = s / std::log(static_cast<double>(index.size()));
    return std::clamp(h, 0.0, 1.0);
}

// Cosine similarity of two fraction vectors. Entries are non-negative, so the
// result lies in [0,1]; 1 means identical research profiles.
inline double cosine_similarity(const DisciplineVector& a, const DisciplineVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_similarity: vector size mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        dot += a[d] * b[d];
        na += a[d] * a[d];
        nb += b[d] * b[d];
    }
    return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

struct PairRecord {
    std::size_t i = 0;
    std::size_t j = 0;
    double similarity = 0.0;
    bool is_edge = false;
    bool same_primary = false;
};

enum class PairMode { edges_only, all_pairs };

// Streams every unordered pair (all_pairs) or every edge (edges_only) through
// `fn` in a fixed deterministic order, without materializing an n^2 table.
// `primary_pos` holds each node's primary-discipline position in the index.
template <typename F>
void for_each_pair(const CollabGraph& g, std::span<const DisciplineVector> vectors,
                   std::span<const std::size_t> primary_pos, PairMode mode, F&& fn) {
    const std::size_t n = g.node_count();
    if (vectors.size() != n || primary_pos.size() != n)
        throw std::invalid_argument("for_each_pair: vectors/primaries must cover all nodes");

    std::vector<double> inv_norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : vectors[i].entries()) s += v * v;
        inv_norm[i] = 1.0 / std::sqrt(s);
    }
    auto cosine = [&](std::size_t i, std::size_t j) {
        double dot = 0.0;
        const auto& a = vectors[i].entries();
        const auto& b = vectors[j].entries();
        for (std::size_t d = 0; d < a.size(); ++d) dot += a[d] * b[d];
        return std::clamp(dot * inv_norm[i] * inv_norm[j], 0.0, 1.0);
    };

    if (mode == PairMode::edges_only) {
        for (const auto& [i, j] : g.edges())
            fn(PairRecord{i, j, cosine(i, j), true, primary_pos[i] == primary_pos[j]});
        return;
    }
    std::vector<char> is_nb(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t v : g.neighbors(i))
            if (v > i) is_nb[v] = 1;
        for (std::size_t j = i + 1; j < n; ++j)
            fn(PairRecord{i, j, cosine(i, j), is_nb[j] != 0, primary_pos[i] == primary_pos[j]});
        for (std::size_t v : g.neighbors(i))
            if (v > i) is_nb[v] = 0;
    }
}

// Aggregated dyadic-similarity view of the graph: pair counts, same-primary
// counts, and the similarity samples for each pair class. In all_pairs mode
// edge and non-edge counts partition C(n,2) exactly.
struct EdgeSimilarityTable {
    PairMode mode = PairMode::all_pairs;
    std::size_t n_nodes = 0;
    std::uint64_t edge_pairs = 0;
    std::uint64_t non_edge_pairs = 0;
    std::uint64_t same_primary_edges = 0;
    std::uint64_t same_primary_non_edges = 0;
    std::vector<double> edge_similarities;
    std::vector<double> non_edge_similarities;
};

inline EdgeSimilarityTable pairwise_table(const CollabGraph& g,
                                          std::span<const DisciplineVector> vectors,
                                          std::span<const std::size_t> primary_pos,
                                          PairMode mode) {
    EdgeSimilarityTable t;
    t.mode = mode;
    t.n_nodes = g.node_count();
    t.edge_similarities.reserve(g.edge_count());
    for_each_pair(g, vectors, primary_pos, mode, [&](const PairRecord& p) {
        if (p.is_edge) {
            ++t.edge_pairs;
            t.same_primary_edges += p.same_primary ? 1 : 0;
            t.edge_similarities.push_back(p.similarity);
        } else {
            ++t.non_edge_pairs;
            t.same_primary_non_edges += p.same_primary ? 1 : 0;
            t.non_edge_similarities.push_back(p.similarity);
        }
    });
    return t;
}

// Map-keyed convenience overload; rejects any node without a vector/primary.
inline EdgeSimilarityTable pairwise_table(const CollabGraph& g,
                                          const std::map<std::string, DisciplineVector>& vectors,
                                          const std::map<std::string, std::string>& primaries,
                                          PairMode mode, const DisciplineIndex& index) {
    std::vector<DisciplineVector> vecs;
    std::vector<std::size_t> prim;
    vecs.reserve(g.node_count());
    prim.reserve(g.node_count());
    for (const auto& id : g.node_ids()) {
        auto vit = vectors.find(id);
        if (vit == vectors.end())
            throw std::invalid_argument("pairwise_table: missing vector for node '" + id + "'");
        auto pit = primaries.find(id);
        if (pit == primaries.end())
            throw std::invalid_argument("pairwise_table: missing primary for node '" + id + "'");
        auto pos = index.position(pit->second);
        if (!pos)
            throw std::invalid_argument("pairwise_table: primary '" + pit->second +
                                        "' of node '" + id + "' not in index");
        vecs.push_back(vit->second);
        prim.push_back(*pos);
    }
    return pairwise_table(g, vecs, prim, mode);
}

// Within-team entropy over members' primary-discipline positions.
// Assumes at least two members; the Team-level wrapper handles solo teams.
inline double team_entropy_kernel(std::span<const std::size_t> member_primary_pos,
                                  std::size_t n_d, EntropyNorm norm) {
    const std::size_t p = member_primary_pos.size();
    std::vector<std::uint32_t> tally(n_d, 0);
    for (std::size_t pos : member_primary_pos) {
        if (pos >= n_d) throw std::invalid_argument("team_entropy: primary position out of range");
        ++tally[pos];
    }
    double h = 0.0;
    for (std::uint32_t c : tally) {
        if (c == 0) continue;
        const double f = static_cast<double>(c) / static_cast<double>(p);
        h -= f * std::log(f);
    }
    const std::size_t bound = norm == EntropyNorm::max ? std::max(p, n_d) : std::min(p, n_d);
    const double denom = std::log(static_cast<double>(bound));
    if (denom == 0.0) return 0.0;  // single category possible only; entropy is exactly 0
    return std::clamp(h / denom, 0.0, 1.0);
}

// Mean pairwise cosine similarity over the given member vectors (>= 2).
inline double mean_pairwise_cosine_kernel(std::span<const std::size_t> members,
                                          std::span<const DisciplineVector> vectors) {
    const std::size_t m = members.size();
    double acc = 0.0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            acc += cosine_similarity(vectors[members[a]], vectors[members[b]]);
    return acc / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

// Team-level entropy of primary disciplines. Solo teams are not part of the
// team analysis and yield nullopt rather than an error.
inline std::optional<double> team_entropy(const Team& team,
                                          const std::map<std::string, std::string>& primaries,
                                          const DisciplineIndex& index,
                                          EntropyNorm norm = EntropyNorm::max) {
    if (team.size() < 2) return std::nullopt;
    std::vector<std::size_t> pos;
    pos.reserve(team.size());
    for (const auto& m : team.members) {
        auto it = primaries.find(m);
        if (it == primaries.end())
            throw std::invalid_argument("team_entropy: missing primary for member '" + m + "'");
        auto p = index.position(it->second);
        if (!p)
            throw std::invalid_argument("team_entropy: primary '" + it->second +
                                        "' not in index");
        pos.push_back(*p);
    }
    return team_entropy_kernel(pos, index.size(), norm);
}

// Mean within-team cosine similarity; nullopt for solo teams.
inline std::optional<double> team_mean_cosine(
    const Team& team, const std::map<std::string, DisciplineVector>& vectors) {
    if (team.size() < 2) return std::nullopt;
    double acc = 0.0;
    const std::size_t m = team.size();
    for (std::size_t a = 0; a < m; ++a) {
        auto ita = vectors.find(team.members[a]);
        if (ita == vectors.end())
            throw std::invalid_argument("team_mean_cosine: missing vector for member '" +
                                        team.members[a] + "'");
        for (std::size_t b = a + 1; b < m; ++b) {
            auto itb = vectors.find(team.members[b]);
            if (itb == vectors.end())
                throw std::invalid_argument("team_mean_cosine: missing vector for member '" +
                                            team.members[b] + "'");
            acc += cosine_similarity(ita->second, itb->second);
        }
    }
    return acc / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

// Number of edges among the neighbors of `v`, counted exactly in integers.
inline std::uint64_t neighbor_tie_count(const CollabGraph& g, std::size_t v) {
    const auto& nb = g.neighbors(v);
    std::uint64_t ties = 0;
    for (std::size_t u : nb) {
        // Count common neighbors w of u and v with w > u; each tie once.
        const auto& nu = g.neighbors(u);
        auto it1 = std::upper_bound(nu.begin(), nu.end(), u);
        auto it2 = std::upper_bound(nb.begin(), nb.end(), u);
        while (it1 != nu.end() && it2 != nb.end()) {
            if (*it1 < *it2)
                ++it1;
            else if (*it2 < *it1)
                ++it2;
            else {
                ++ties;
                ++it1;
                ++it2;
            }
        }
    }
    return ties;
}

// Local transitivity C of a node: the fraction of realized ties among its
// neighbors. Nodes of degree <= 1 take C = 1 (they cannot bridge groups and
// classify as shell).
inline double local_transitivity(const CollabGraph& g, std::size_t v) {
    if (v >= g.node_count())
        throw std::invalid_argument("local_transitivity: node index out of range");
    const std::size_t k = g.degree(v);
    if (k <= 1) return 1.0;
    const double possible = static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
    return static_cast<double>(neighbor_tie_count(g, v)) / possible;
}

inline double local_transitivity(const CollabGraph& g, const std::string& id) {
    auto i = g.index_of(id);
    if (!i) throw std::invalid_argument("local_transitivity: unknown node '" + id + "'");
    return local_transitivity(g, *i);
}

}  // namespace collabscope
