#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "collabscope/model.hpp"
#include "collabscope/rng.hpp"

namespace collabscope {

// Parameters of the synthetic-dataset generator. Authors get Dirichlet-style
// discipline mixes concentrated around a "home" discipline; teams are
// assembled by similarity-biased selection. homophily = 0 draws every member
// uniformly at random (matching the null model exactly); homophily = 1 keeps
// teams inside one home discipline, whose members have near-duplicate
// vectors.
struct SynthConfig {
    std::size_t n_authors = 100;
    std::size_t n_disciplines = 27;
    double homophily = 0.0;
    std::vector<std::pair<std::size_t, double>> team_size_weights = {
        {2, 0.35}, {3, 0.35}, {4, 0.20}, {5, 0.10}};
    std::size_t n_teams = 50;
    std::uint64_t seed = 1;
};

struct SynthData {
    std::vector<AuthorRecord> records;
    std::vector<Team> teams;
    DisciplineIndex index;
};

namespace detail {

inline std::string padded_id(const char* prefix, std::size_t i, std::size_t width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, static_cast<int>(width), i);
    return buf;
}

inline std::size_t weighted_choice(Rng& rng, const std::vector<double>& cumulative) {
    const double u = rng.uniform01() * cumulative.back();
    return static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
}

}  // namespace detail

inline SynthData synthesize(const SynthConfig& cfg) {
    if (cfg.n_authors < 2) throw std::invalid_argument("synthesize: need at least 2 authors");
    if (cfg.n_disciplines < 2)
        throw std::invalid_argument("synthesize: need at least 2 disciplines");
    if (cfg.n_teams == 0) throw std::invalid_argument("synthesize: n_teams must be positive");
    if (!(cfg.homophily >= 0.0 && cfg.homophily <= 1.0))
        throw std::invalid_argument("synthesize: homophily must lie in [0,1]");
    if (cfg.team_size_weights.empty())
        throw std::invalid_argument("synthesize: empty team size distribution");
    for (const auto& [s, w] : cfg.team_size_weights) {
        if (s < 1 || w < 0.0)
            throw std::invalid_argument("synthesize: invalid team size distribution");
        if (s > cfg.n_authors)
            throw std::invalid_argument("synthesize: team size " + std::to_string(s) +
                                        " infeasible for population " +
                                        std::to_string(cfg.n_authors));
    }

    Rng rng(substream_seed(cfg.seed, "synth"));
    SynthData out;

    const std::size_t id_width = std::to_string(cfg.n_authors).size();
    std::vector<std::string> labels(cfg.n_disciplines);
    const std::size_t label_width = std::to_string(cfg.n_disciplines).size();
    for (std::size_t d = 0; d < cfg.n_disciplines; ++d)
        labels[d] = detail::padded_id("D", d + 1, label_width);
    out.index = DisciplineIndex(labels);

    // Concentration grows with homophily so that homophilous populations
    // also get sharper, more separable research profiles.
    const double alpha_home = 2.0 + 18.0 * cfg.homophily;
    const double alpha_other = 0.3;

    std::vector<std::size_t> home(cfg.n_authors);
    std::vector<std::vector<std::size_t>> by_home(cfg.n_disciplines);
    std::vector<double> weights(cfg.n_disciplines);
    out.records.reserve(cfg.n_authors);
    for (std::size_t i = 0; i < cfg.n_authors; ++i) {
        AuthorRecord r;
        r.author_id = detail::padded_id("a", i + 1, id_width);
        home[i] = static_cast<std::size_t>(rng.uniform_index(cfg.n_disciplines));
        by_home[home[i]].push_back(i);

        double total_w = 0.0;
        for (std::size_t d = 0; d < cfg.n_disciplines; ++d) {
            weights[d] = rng.gamma(d == home[i] ? alpha_home : alpha_other);
            total_w += weights[d];
        }
        const std::uint64_t total_pubs = 10 + rng.uniform_index(91);
        for (std::size_t d = 0; d < cfg.n_disciplines; ++d) {
            const auto c = static_cast<std::uint64_t>(
                std::llround(weights[d] / total_w * static_cast<double>(total_pubs)));
            if (c > 0) r.counts[labels[d]] = c;
        }
        if (r.counts.empty()) r.counts[labels[home[i]]] = total_pubs;

        r.h_index = 1 + rng.uniform_index(4) + static_cast<std::uint64_t>(rng.gamma(2.0) * 3.0);
        r.first_year = static_cast<int>(1985 + rng.uniform_index(30));
        r.last_year = r.first_year + static_cast<int>(rng.uniform_index(30));
        out.records.push_back(std::move(r));
    }

    std::vector<double> size_cum;
    for (const auto& [s, w] : cfg.team_size_weights)
        size_cum.push_back((size_cum.empty() ? 0.0 : size_cum.back()) + w);
    if (size_cum.back() <= 0.0)
        throw std::invalid_argument("synthesize: team size weights sum to zero");

    std::vector<std::uint32_t> perm(cfg.n_authors);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::uint32_t> draw;
    const std::size_t team_width = std::to_string(cfg.n_teams).size();
    std::vector<char> in_team(cfg.n_authors, 0);
    out.teams.reserve(cfg.n_teams);
    for (std::size_t t = 0; t < cfg.n_teams; ++t) {
        const std::size_t s = cfg.team_size_weights[detail::weighted_choice(rng, size_cum)].first;
        std::vector<std::size_t> members;
        if (cfg.homophily == 0.0) {
            // Exactly the null model's draw: uniform without replacement.
            sample_distinct(rng, perm, s, draw);
            members.assign(draw.begin(), draw.end());
        } else {
            const auto seed_member = static_cast<std::size_t>(rng.uniform_index(cfg.n_authors));
            members.push_back(seed_member);
            in_team[seed_member] = 1;
            const auto& cluster = by_home[home[seed_member]];
            while (members.size() < s) {
                std::size_t cand;
                if (rng.uniform01() < cfg.homophily) {
                    std::size_t free_in_cluster = 0;
                    for (std::size_t c : cluster)
                        if (!in_team[c]) ++free_in_cluster;
                    if (free_in_cluster > 0) {
                        std::uint64_t pick = rng.uniform_index(free_in_cluster);
                        cand = cluster[0];
                        for (std::size_t c : cluster)
                            if (!in_team[c] && pick-- == 0) {
                                cand = c;
                                break;
                            }
                    } else {
                        do {
                            cand = static_cast<std::size_t>(rng.uniform_index(cfg.n_authors));
                        } while (in_team[cand]);
                    }
                } else {
                    do {
                        cand = static_cast<std::size_t>(rng.uniform_index(cfg.n_authors));
                    } while (in_team[cand]);
                }
                members.push_back(cand);
                in_team[cand] = 1;
            }
            for (std::size_t m : members) in_team[m] = 0;
        }
        Team team;
        team.paper_id = detail::padded_id("p", t + 1, team_width);
        for (std::size_t m : members) team.members.push_back(out.records[m].author_id);
        out.teams.push_back(std::move(team));
    }
    return out;
}

}  // namespace collabscope
