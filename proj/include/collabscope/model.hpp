#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace collabscope {

// Fixed, ordered universe of discipline labels. All fraction vectors are
// aligned to this ordering and every entropy normalization uses its size.
class DisciplineIndex {
public:
    DisciplineIndex() = default;

    explicit DisciplineIndex(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty())
            throw std::invalid_argument("DisciplineIndex: at least one label required");
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!pos_.emplace(labels_[i], i).second)
                throw std::invalid_argument("DisciplineIndex: duplicate label '" + labels_[i] +
                                            "'");
        }
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t d) const { return labels_.at(d); }

    std::optional<std::size_t> position(const std::string& label) const {
        auto it = pos_.find(label);
        if (it == pos_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> pos_;
};

struct AuthorRecord {
    std::string author_id;
    std::map<std::string, std::uint64_t> counts;  // discipline label -> publication count
    std::uint64_t h_index = 0;
    int first_year = 0;
    int last_year = 0;

    // Number of disciplines with a positive publication count.
    std::size_t field_count() const {
        std::size_t n = 0;
        for (const auto& [label, c] : counts)
            if (c > 0) ++n;
        return n;
    }

    int pub_years() const { return last_year - first_year; }

    void validate() const {
        if (author_id.empty()) throw std::invalid_argument("AuthorRecord: empty author_id");
        if (field_count() == 0)
            throw std::invalid_argument("AuthorRecord '" + author_id +
                                        "': at least one positive publication count required");
        if (first_year > last_year)
            throw std::invalid_argument("AuthorRecord '" + author_id +
                                        "': first_year exceeds last_year");
    }
};

// Publication-fraction vector aligned to a DisciplineIndex. Entries are in
// [0,1], sum to 1 (1e-9 tolerance), and at least one entry is positive.
class DisciplineVector {
public:
    explicit DisciplineVector(std::vector<double> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw std::invalid_argument("DisciplineVector: empty");
        double sum = 0.0;
        bool any_positive = false;
        for (double v : entries_) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("DisciplineVector: entry outside [0,1]");
            if (v > 0.0) any_positive = true;
            sum += v;
        }
        if (!any_positive) throw std::invalid_argument("DisciplineVector: all entries zero");
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("DisciplineVector: entries do not sum to 1");
    }

    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t d) const { return entries_[d]; }
    const std::vector<double>& entries() const { return entries_; }

    std::size_t nonzero_count() const {
        std::size_t n = 0;
        for (double v : entries_)
            if (v > 0.0) ++n;
        return n;
    }

private:
    std::vector<double> entries_;
};

struct Team {
    std::string paper_id;
    std::vector<std::string> members;  // distinct author ids

    std::size_t size() const { return members.size(); }
};

// Simple undirected coauthorship graph. Nodes are authors in record order;
// the edge set is exactly the union of all within-team pairs with repeated
// coauthorships collapsed. Immutable once built.
class CollabGraph {
public:
    CollabGraph() = default;  // empty graph; populated via build_graph

    std::size_t node_count() const { return node_ids_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::string& node_id(std::size_t i) const { return node_ids_.at(i); }

    std::optional<std::size_t> index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_.at(i); }
    std::size_t degree(std::size_t i) const { return adj_.at(i).size(); }

    bool has_edge(std::size_t i, std::size_t j) const {
        const auto& nb = adj_.at(i);
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    // Unordered pairs (i, j) with i < j, sorted lexicographically.
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

    const std::vector<Team>& teams() const { return teams_; }

    // Member node indices per team, sorted, aligned with teams().
    const std::vector<std::vector<std::size_t>>& team_members() const { return team_members_; }

    friend CollabGraph build_graph(std::span<const AuthorRecord> records,
                                   std::span<const Team> teams);

private:
    std::vector<std::string> node_ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<Team> teams_;
    std::vector<std::vector<std::size_t>> team_members_;
};

// Projects team co-membership onto a simple graph. Every team member must
// resolve to a record; duplicate records and duplicate members are rejected.
inline CollabGraph build_graph(std::span<const AuthorRecord> records,
                               std::span<const Team> teams) {
    CollabGraph g;
    g.node_ids_.reserve(records.size());
    for (const auto& r : records) {
        if (!g.index_.emplace(r.author_id, g.node_ids_.size()).second)
            throw std::invalid_argument("build_graph: duplicate author_id '" + r.author_id + "'");
        g.node_ids_.push_back(r.author_id);
    }

    std::set<std::pair<std::size_t, std::size_t>> edge_set;
    g.teams_.reserve(teams.size());
    g.team_members_.reserve(teams.size());
    for (const auto& t : teams) {
        if (t.members.empty())
            throw std::invalid_argument("build_graph: team '" + t.paper_id + "' has no members");
        std::vector<std::size_t> idx;
        idx.reserve(t.members.size());
        for (const auto& m : t.members) {
            auto it = g.index_.find(m);
            if (it == g.index_.end())
                throw std::invalid_argument("build_graph: unknown author id '" + m +
                                            "' in team '" + t.paper_id + "'");
            idx.push_back(it->second);
        }
        std::sort(idx.begin(), idx.end());
        if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
            throw std::invalid_argument("build_graph: duplicate member in team '" + t.paper_id +
                                        "'");
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b)
                edge_set.emplace(idx[a], idx[b]);
        g.teams_.push_back(t);
        g.team_members_.push_back(std::move(idx));
    }

    g.adj_.assign(g.node_ids_.size(), {});
    g.edges_.assign(edge_set.begin(), edge_set.end());
    for (const auto& [i, j] : g.edges_) {
        g.adj_[i].push_back(j);
        g.adj_[j].push_back(i);
    }
    for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
    return g;
}

// Publication counts -> fraction vector over the index.
inline DisciplineVector normalize(const AuthorRecord& record, const DisciplineIndex& index) {
    double total = 0.0;
    for (const auto& [label, c] : record.counts) {
        if (!index.position(label))
            throw std::invalid_argument("normalize: label '" + label + "' of author '" +
                                        record.author_id + "' missing from discipline index");
        total += static_cast<double>(c);
    }
    if (total <= 0.0)
        throw std::invalid_argument("normalize: author '" + record.author_id +
                                    "' has no positive publication counts");
    std::vector<double> entries(index.size(), 0.0);
    for (const auto& [label, c] : record.counts)
        entries[*index.position(label)] = static_cast<double>(c) / total;
    return DisciplineVector(std::move(entries));
}

// Label of the maximal entry; ties break to the lexicographically smallest
// label so repeated runs agree.
inline std::string primary_discipline(const DisciplineVector& vec, const DisciplineIndex& index) {
    if (vec.size() != index.size())
        throw std::invalid_argument("primary_discipline: vector/index size mismatch");
    std::size_t best = 0;
    for (std::size_t d = 1; d < vec.size(); ++d) {
        if (vec[d] > vec[best] || (vec[d] == vec[best] && index.label(d) < index.label(best)))
            best = d;
    }
    return index.label(best);
}

}  // namespace collabscope
