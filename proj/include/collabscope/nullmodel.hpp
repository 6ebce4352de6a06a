#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collabscope/measures.hpp"
#include "collabscope/model.hpp"
#include "collabscope/rng.hpp"

namespace collabscope {

struct SizeEnsemble {
    std::vector<double> entropy_samples;
    std::vector<double> cosine_samples;
    double entropy_mean = 0.0;
    double entropy_sd = 0.0;  // population standard deviation over the samples
    double cosine_mean = 0.0;
    double cosine_sd = 0.0;
};

// Monte-Carlo ensemble of random teams, one sample set per unique observed
// team size. Reproducible bit-exactly from (seed, n_sims, input order): each
// size runs on its own named RNG substream, so the per-size results do not
// depend on which sizes are present or on execution scheduling.
struct NullEnsemble {
    std::map<std::size_t, SizeEnsemble> by_size;
    std::uint64_t seed = 0;
    std::size_t n_sims = 0;
    EntropyNorm norm = EntropyNorm::max;
};

namespace detail {

inline void summarize(std::span<const double> xs, double& mean, double& sd) {
    mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(xs.size()));
}

inline SizeEnsemble simulate_size(std::size_t team_size, std::span<const DisciplineVector> vectors,
                                  std::span<const std::size_t> primary_pos, std::size_t n_d,
                                  std::size_t n_sims, std::uint64_t seed, EntropyNorm norm) {
    Rng rng(substream_seed(seed, "nullmodel", team_size));
    std::vector<std::uint32_t> perm(vectors.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::uint32_t> draw;
    std::vector<std::size_t> members(team_size), prim(team_size);

    SizeEnsemble e;
    e.entropy_samples.reserve(n_sims);
    e.cosine_samples.reserve(n_sims);
    for (std::size_t sim = 0; sim < n_sims; ++sim) {
        sample_distinct(rng, perm, team_size, draw);
        for (std::size_t k = 0; k < team_size; ++k) {
            members[k] = draw[k];
            prim[k] = primary_pos[draw[k]];
        }
        e.entropy_samples.push_back(team_entropy_kernel(prim, n_d, norm));
        e.cosine_samples.push_back(mean_pairwise_cosine_kernel(members, vectors));
    }
    summarize(e.entropy_samples, e.entropy_mean, e.entropy_sd);
    summarize(e.cosine_samples, e.cosine_mean, e.cosine_sd);
    return e;
}

}  // namespace detail

// Builds the random-team ensemble for every unique size (>= 2) occurring in
// `observed_team_sizes`. Teams are drawn uniformly without replacement from
// the whole author population; sizes simulate independently in parallel.
inline NullEnsemble build_ensemble(std::span<const DisciplineVector> vectors,
                                   std::span<const std::size_t> primary_pos, std::size_t n_d,
                                   std::span<const std::size_t> observed_team_sizes,
                                   std::size_t n_sims, std::uint64_t seed,
                                   EntropyNorm norm = EntropyNorm::max) {
    if (vectors.size() != primary_pos.size())
        throw std::invalid_argument("build_ensemble: vectors/primaries size mismatch");
    if (vectors.size() < 2)
        throw std::invalid_argument("build_ensemble: need at least 2 authors");
    if (n_sims < 2) throw std::invalid_argument("build_ensemble: n_sims must be at least 2");

    std::vector<std::size_t> sizes(observed_team_sizes.begin(), observed_team_sizes.end());
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    sizes.erase(std::remove_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s < 2; }),
                sizes.end());
    for (std::size_t s : sizes)
        if (s > vectors.size())
            throw std::invalid_argument("build_ensemble: team size " + std::to_string(s) +
                                        " exceeds author count " +
                                        std::to_string(vectors.size()));

    NullEnsemble ens;
    ens.seed = seed;
    ens.n_sims = n_sims;
    ens.norm = norm;

    std::vector<std::future<SizeEnsemble>> futures;
    futures.reserve(sizes.size());
    for (std::size_t s : sizes)
        futures.push_back(std::async(std::launch::async, [&, s] {
            return detail::simulate_size(s, vectors, primary_pos, n_d, n_sims, seed, norm);
        }));
    for (std::size_t k = 0; k < sizes.size(); ++k) ens.by_size.emplace(sizes[k], futures[k].get());
    return ens;
}

struct TeamMeasures {
    std::string paper_id;
    std::size_t size = 0;
    double entropy = 0.0;
    double mean_cosine = 0.0;
};

struct TeamZScores {
    std::string paper_id;
    std::size_t size = 0;
    // Undefined (ensemble sd = 0) z-scores stay unset rather than +/-inf.
    std::optional<double> z_entropy;
    std::optional<double> z_cosine;
};

// Observed team measures standardized against the null ensemble of the same
// team size.
inline std::vector<TeamZScores> z_scores(std::span<const TeamMeasures> observed,
                                         const NullEnsemble& ensemble) {
    std::vector<TeamZScores> out;
    out.reserve(observed.size());
    for (const auto& t : observed) {
        auto it = ensemble.by_size.find(t.size);
        if (it == ensemble.by_size.end())
            throw std::invalid_argument("z_scores: no ensemble for team size " +
                                        std::to_string(t.size));
        const SizeEnsemble& e = it->second;
        TeamZScores z;
        z.paper_id = t.paper_id;
        z.size = t.size;
        if (e.entropy_sd > 0.0) z.z_entropy = (t.entropy - e.entropy_mean) / e.entropy_sd;
        if (e.cosine_sd > 0.0) z.z_cosine = (t.mean_cosine - e.cosine_mean) / e.cosine_sd;
        out.push_back(std::move(z));
    }
    return out;
}

}  // namespace collabscope
