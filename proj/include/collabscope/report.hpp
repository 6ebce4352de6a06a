#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "collabscope/coreshell.hpp"
#include "collabscope/ingest.hpp"
#include "collabscope/measures.hpp"
#include "collabscope/model.hpp"
#include "collabscope/nullmodel.hpp"
#include "collabscope/stats.hpp"

namespace collabscope {

struct EmitFlags {
    bool csv = true;
    bool json = true;
    bool plotspec = false;
};

// Full provenance of one analysis run; echoed verbatim into every report.
struct RunConfig {
    std::string authors_path;
    std::string teams_path;
    std::string index_path;  // empty: derive the index from the data
    std::optional<TableFormat> authors_format;  // unset: infer from extension
    std::size_t n_sims = 1000;
    std::uint64_t seed = 1;
    EntropyNorm entropy_norm = EntropyNorm::max;
    ExclusionConfig exclusions;
    std::string out_dir = ".";
    EmitFlags emit;
    bool pairs_edges_only = false;  // pairs.csv scope; analysis always covers all pairs
    bool peel = false;              // also compute iterative coreness levels
    std::size_t kde_grid_size = 512;
    stats::MwuOptions mwu;  // tie/exact-path settings; the method string records the path taken
};

// Error carrying the pipeline stage that failed, for CLI diagnostics.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

namespace detail {

template <typename F>
auto with_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

struct AuthorRow {
    std::string author_id;
    std::string primary;
    std::size_t n_fields = 0;
    double entropy = 0.0;
    bool entropy_excluded = false;  // single publication field
    std::uint64_t h_index = 0;
    int pub_years = 0;
    std::size_t degree = 0;
    double transitivity = 1.0;
    std::string label;  // core | shell
    std::optional<std::uint32_t> coreness;  // peel level; unset = not peeled or survivor
    bool peel_survivor = false;
};

struct EntropyGroup {
    std::size_t n_fields = 0;
    std::size_t count = 0;
    double mean_entropy = 0.0;
    std::optional<stats::DensityCurve> density;
};

struct DyadicSection {
    std::uint64_t edge_pairs = 0;
    std::uint64_t non_edge_pairs = 0;
    std::uint64_t same_primary_edges = 0;
    std::uint64_t same_primary_non_edges = 0;
    double same_primary_edge_fraction = 0.0;
    double same_primary_non_edge_fraction = 0.0;
    std::optional<stats::TestResult> proportion_z;  // two-tailed
    std::optional<stats::TestResult> mwu;           // one-tailed: edges more similar
    std::optional<stats::TestResult> ks;
    std::optional<stats::DensityCurve> edge_density;
    std::optional<stats::DensityCurve> non_edge_density;
    std::string note;  // set when a pair class is empty or degenerate
};

struct TeamRow {
    std::string paper_id;
    std::size_t size = 0;
    bool solo = false;
    std::optional<double> entropy;
    std::optional<double> mean_cosine;
    std::optional<double> z_entropy;
    std::optional<double> z_cosine;
};

struct SizeSummaryRow {
    std::size_t size = 0;
    double entropy_mean = 0.0, entropy_sd = 0.0;
    double cosine_mean = 0.0, cosine_sd = 0.0;
};

struct TeamSection {
    std::vector<TeamRow> rows;
    std::vector<SizeSummaryRow> ensemble_summary;
    std::size_t n_sims = 0;
    std::uint64_t ensemble_seed = 0;
    std::size_t undefined_z_entropy = 0;  // teams whose ensemble sd was 0
    std::size_t undefined_z_cosine = 0;
    std::optional<stats::DensityCurve> z_entropy_density;
    std::optional<stats::DensityCurve> z_cosine_density;
    std::string note;
};

struct AttributeComparison {
    std::string attribute;
    double core_median = 0.0;
    double shell_median = 0.0;
    stats::TestResult mwu;  // one-tailed, core greater
    stats::TestResult ks;
    std::optional<stats::DensityCurve> core_density;
    std::optional<stats::DensityCurve> shell_density;
};

struct CoreShellSection {
    std::size_t n_core = 0;
    std::size_t n_shell = 0;
    bool peeled = false;
    std::optional<AttributeComparison> h_index;
    std::optional<AttributeComparison> pub_years;
    std::string note;  // set when a group is empty and comparisons are skipped
};

struct DatasetSummary {
    std::size_t n_authors = 0;
    std::size_t n_edges = 0;
    std::size_t n_teams = 0;
    std::size_t n_solo_teams = 0;
    std::size_t n_analyzed_teams = 0;
    std::size_t n_disciplines = 0;
    std::size_t n_primary_disciplines = 0;
    std::size_t n_single_field = 0;
};

struct AnalysisReport {
    RunConfig config;
    DatasetSummary summary;
    std::vector<ExclusionEntry> exclusions;
    std::vector<AuthorRow> authors;
    std::vector<EntropyGroup> entropy_groups;
    DyadicSection dyadic;
    TeamSection teams;
    CoreShellSection coreshell;
};

// Everything a run produces: the report plus the inputs the CSV emitters
// stream from (per-pair rows are never materialized).
struct PipelineResult {
    Dataset dataset;
    CollabGraph graph;
    std::vector<DisciplineVector> vectors;
    std::vector<std::size_t> primary_pos;
    AnalysisReport report;
};

namespace detail {

inline std::optional<stats::DensityCurve> try_kde(std::span<const double> sample,
                                                  std::size_t grid_size) {
    if (sample.size() < 2) return std::nullopt;
    try {
        return stats::kde(sample, std::nullopt, grid_size);
    } catch (const std::exception&) {
        return std::nullopt;  // zero spread
    }
}

inline double vector_mean(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

}  // namespace detail

// Runs the full measurement pipeline over an assembled dataset (exclusion
// rules already applied).
inline PipelineResult analyze(Dataset ds, const RunConfig& cfg) {
    if (cfg.n_sims < 2)
        throw PipelineError("config", "n_sims must be at least 2");

    PipelineResult out;
    out.dataset = std::move(ds);
    const Dataset& data = out.dataset;
    AnalysisReport& rep = out.report;
    rep.config = cfg;
    rep.exclusions = data.exclusions;

    detail::with_stage("model", [&] {
        out.graph = build_graph(data.records, data.teams);
        out.vectors.reserve(data.records.size());
        out.primary_pos.reserve(data.records.size());
        for (const auto& r : data.records) {
            out.vectors.push_back(normalize(r, data.index));
            const auto label = primary_discipline(out.vectors.back(), data.index);
            out.primary_pos.push_back(*data.index.position(label));
        }
    });
    const CollabGraph& g = out.graph;
    const std::size_t n = g.node_count();

    detail::with_stage("measures", [&] {
        rep.authors.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const AuthorRecord& r = data.records[i];
            AuthorRow row;
            row.author_id = r.author_id;
            row.primary = data.index.label(out.primary_pos[i]);
            row.n_fields = r.field_count();
            row.entropy = individual_entropy(out.vectors[i], data.index);
            row.entropy_excluded = row.n_fields == 1;
            row.h_index = r.h_index;
            row.pub_years = r.pub_years();
            row.degree = g.degree(i);
            row.transitivity = local_transitivity(g, i);
            rep.authors.push_back(std::move(row));
        }

        std::map<std::size_t, std::vector<double>> groups;
        for (const auto& row : rep.authors)
            if (!row.entropy_excluded) groups[row.n_fields].push_back(row.entropy);
        for (const auto& [n_fields, values] : groups) {
            EntropyGroup grp;
            grp.n_fields = n_fields;
            grp.count = values.size();
            grp.mean_entropy = detail::vector_mean(values);
            grp.density = detail::try_kde(values, cfg.kde_grid_size);
            rep.entropy_groups.push_back(std::move(grp));
        }
    });

    detail::with_stage("dyadic", [&] {
        const auto table = pairwise_table(g, out.vectors, out.primary_pos, PairMode::all_pairs);
        DyadicSection& dy = rep.dyadic;
        dy.edge_pairs = table.edge_pairs;
        dy.non_edge_pairs = table.non_edge_pairs;
        dy.same_primary_edges = table.same_primary_edges;
        dy.same_primary_non_edges = table.same_primary_non_edges;
        if (table.edge_pairs > 0)
            dy.same_primary_edge_fraction =
                static_cast<double>(table.same_primary_edges) /
                static_cast<double>(table.edge_pairs);
        if (table.non_edge_pairs > 0)
            dy.same_primary_non_edge_fraction =
                static_cast<double>(table.same_primary_non_edges) /
                static_cast<double>(table.non_edge_pairs);
        if (table.edge_pairs == 0 || table.non_edge_pairs == 0) {
            dy.note = "edge/non-edge comparison skipped: a pair class is empty";
        } else {
            dy.proportion_z =
                stats::two_proportion_z(table.same_primary_edges, table.edge_pairs,
                                        table.same_primary_non_edges, table.non_edge_pairs,
                                        stats::Tails::two);
            dy.mwu = stats::mann_whitney_u(table.edge_similarities,
                                           table.non_edge_similarities,
                                           stats::Alternative::greater, cfg.mwu);
            dy.ks = stats::ks_two_sample(table.edge_similarities, table.non_edge_similarities);
        }
        dy.edge_density = detail::try_kde(table.edge_similarities, cfg.kde_grid_size);
        dy.non_edge_density = detail::try_kde(table.non_edge_similarities, cfg.kde_grid_size);
    });

    detail::with_stage("nullmodel", [&] {
        TeamSection& ts = rep.teams;
        ts.n_sims = cfg.n_sims;
        ts.ensemble_seed = cfg.seed;

        std::vector<std::size_t> analyzed_sizes;
        std::vector<TeamMeasures> observed;
        const auto& members = g.team_members();
        for (std::size_t t = 0; t < data.teams.size(); ++t) {
            TeamRow row;
            row.paper_id = data.teams[t].paper_id;
            row.size = members[t].size();
            row.solo = row.size < 2;
            if (!row.solo) {
                std::vector<std::size_t> prim;
                prim.reserve(row.size);
                for (std::size_t m : members[t]) prim.push_back(out.primary_pos[m]);
                row.entropy = team_entropy_kernel(prim, data.index.size(), cfg.entropy_norm);
                row.mean_cosine = mean_pairwise_cosine_kernel(members[t], out.vectors);
                analyzed_sizes.push_back(row.size);
                observed.push_back({row.paper_id, row.size, *row.entropy, *row.mean_cosine});
            }
            ts.rows.push_back(std::move(row));
        }
        if (observed.empty()) {
            ts.note = "no teams of size >= 2; null model skipped";
            return;
        }

        const NullEnsemble ens =
            build_ensemble(out.vectors, out.primary_pos, data.index.size(), analyzed_sizes,
                           cfg.n_sims, cfg.seed, cfg.entropy_norm);
        for (const auto& [size, e] : ens.by_size)
            ts.ensemble_summary.push_back(
                {size, e.entropy_mean, e.entropy_sd, e.cosine_mean, e.cosine_sd});

        const auto zs = z_scores(observed, ens);
        std::map<std::string, const TeamZScores*> by_paper;
        for (const auto& z : zs) by_paper.emplace(z.paper_id, &z);
        std::vector<double> zh, zc;
        for (auto& row : ts.rows) {
            if (row.solo) continue;
            const TeamZScores& z = *by_paper.at(row.paper_id);
            row.z_entropy = z.z_entropy;
            row.z_cosine = z.z_cosine;
            if (z.z_entropy)
                zh.push_back(*z.z_entropy);
            else
                ++ts.undefined_z_entropy;
            if (z.z_cosine)
                zc.push_back(*z.z_cosine);
            else
                ++ts.undefined_z_cosine;
        }
        ts.z_entropy_density = detail::try_kde(zh, cfg.kde_grid_size);
        ts.z_cosine_density = detail::try_kde(zc, cfg.kde_grid_size);
    });

    detail::with_stage("coreshell", [&] {
        const CoreShellLabeling labeling = cfg.peel ? peel(g) : decompose(g);
        CoreShellSection& cs = rep.coreshell;
        cs.n_core = labeling.n_core;
        cs.n_shell = labeling.n_shell;
        cs.peeled = cfg.peel;
        for (std::size_t i = 0; i < n; ++i) {
            rep.authors[i].label =
                labeling.labels[i] == CoreShellLabeling::Label::core ? "core" : "shell";
            if (labeling.coreness) {
                if ((*labeling.coreness)[i] == CoreShellLabeling::survives)
                    rep.authors[i].peel_survivor = true;
                else
                    rep.authors[i].coreness = (*labeling.coreness)[i];
            }
        }
        if (cs.n_core == 0 || cs.n_shell == 0) {
            cs.note = "core/shell comparison skipped: a group is empty";
            return;
        }
        auto compare = [&](const std::string& name, auto&& value_of) {
            std::vector<double> attr(n);
            for (std::size_t i = 0; i < n; ++i) attr[i] = value_of(data.records[i]);
            const ComparisonResult c = group_compare(labeling, attr, cfg.mwu);
            AttributeComparison out_cmp;
            out_cmp.attribute = name;
            out_cmp.core_median = c.core_median;
            out_cmp.shell_median = c.shell_median;
            out_cmp.mwu = c.mwu;
            out_cmp.ks = c.ks;
            out_cmp.core_density = detail::try_kde(c.core_values, cfg.kde_grid_size);
            out_cmp.shell_density = detail::try_kde(c.shell_values, cfg.kde_grid_size);
            return out_cmp;
        };
        cs.h_index = compare("h_index", [](const AuthorRecord& r) {
            return static_cast<double>(r.h_index);
        });
        cs.pub_years = compare("pub_years", [](const AuthorRecord& r) {
            return static_cast<double>(r.pub_years());
        });
    });

    DatasetSummary& sm = rep.summary;
    sm.n_authors = n;
    sm.n_edges = g.edge_count();
    sm.n_teams = data.teams.size();
    for (const auto& t : data.teams)
        if (t.size() < 2) ++sm.n_solo_teams;
    sm.n_analyzed_teams = sm.n_teams - sm.n_solo_teams;
    sm.n_disciplines = data.index.size();
    {
        std::set<std::size_t> prim(out.primary_pos.begin(), out.primary_pos.end());
        sm.n_primary_disciplines = prim.size();
    }
    sm.n_single_field = data.single_field_authors.size();
    return out;
}

// Loads the configured input files, applies exclusion rules, and analyzes.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    Dataset ds = detail::with_stage("ingest", [&] {
        const TableFormat fmt =
            cfg.authors_format ? *cfg.authors_format : sniff_format(cfg.authors_path);
        auto records = load_authors(cfg.authors_path, fmt);
        auto teams = load_teams(cfg.teams_path);
        std::optional<DisciplineIndex> index;
        if (!cfg.index_path.empty()) index = load_discipline_index(cfg.index_path);
        return apply_exclusions(
            assemble_dataset(std::move(records), std::move(teams), std::move(index)),
            cfg.exclusions);
    });
    return analyze(std::move(ds), cfg);
}

// --- JSON serialization -----------------------------------------------------

inline nlohmann::json to_json(const stats::DensityCurve& c) {
    return {{"grid", c.grid}, {"density", c.density}, {"bandwidth", c.bandwidth}, {"n", c.n}};
}

inline nlohmann::json to_json(const stats::TestResult& t) {
    nlohmann::json j{{"statistic", t.degenerate ? nlohmann::json() : nlohmann::json(t.statistic)},
                     {"p_value", t.p_value},
                     {"tails", t.tails == stats::Tails::one ? "one" : "two"},
                     {"n1", t.n1},
                     {"n2", t.n2},
                     {"method", t.method},
                     {"exact", t.exact},
                     {"degenerate", t.degenerate}};
    if (t.median1) j["median1"] = *t.median1;
    if (t.median2) j["median2"] = *t.median2;
    return j;
}

template <typename T>
nlohmann::json opt_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_arithmetic_v<T>)
        return *v;
    else
        return to_json(*v);
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    return {{"authors_path", cfg.authors_path},
            {"teams_path", cfg.teams_path},
            {"index_path", cfg.index_path},
            {"authors_format", cfg.authors_format
                                   ? (*cfg.authors_format == TableFormat::json ? "json" : "csv")
                                   : "auto"},
            {"n_sims", cfg.n_sims},
            {"seed", cfg.seed},
            {"entropy_norm", cfg.entropy_norm == EntropyNorm::max ? "max" : "min"},
            {"drop_single_field", cfg.exclusions.drop_single_field},
            {"out_dir", cfg.out_dir},
            {"emit",
             {{"csv", cfg.emit.csv}, {"json", cfg.emit.json}, {"plotspec", cfg.emit.plotspec}}},
            {"pairs_edges_only", cfg.pairs_edges_only},
            {"peel", cfg.peel},
            {"kde_grid_size", cfg.kde_grid_size},
            {"mwu_exact_max_total", cfg.mwu.exact_max_total},
            {"mwu_continuity_correction", cfg.mwu.continuity_correction}};
}

inline nlohmann::json report_to_json(const AnalysisReport& rep) {
    nlohmann::json j;
    j["config"] = config_to_json(rep.config);
    j["dataset"] = {{"n_authors", rep.summary.n_authors},
                    {"n_edges", rep.summary.n_edges},
                    {"n_teams", rep.summary.n_teams},
                    {"n_solo_teams", rep.summary.n_solo_teams},
                    {"n_analyzed_teams", rep.summary.n_analyzed_teams},
                    {"n_disciplines", rep.summary.n_disciplines},
                    {"n_primary_disciplines", rep.summary.n_primary_disciplines},
                    {"n_single_field", rep.summary.n_single_field}};

    nlohmann::json ex = nlohmann::json::array();
    for (const auto& e : rep.exclusions)
        ex.push_back({{"entity_id", e.entity_id}, {"reason", e.reason}, {"scope", e.scope}});
    j["exclusions"] = std::move(ex);

    nlohmann::json authors = nlohmann::json::array();
    for (const auto& a : rep.authors) {
        nlohmann::json row{{"author_id", a.author_id},
                           {"primary", a.primary},
                           {"n_fields", a.n_fields},
                           {"entropy", a.entropy},
                           {"entropy_excluded", a.entropy_excluded},
                           {"h_index", a.h_index},
                           {"pub_years", a.pub_years},
                           {"degree", a.degree},
                           {"local_transitivity", a.transitivity},
                           {"label", a.label}};
        if (a.coreness)
            row["coreness"] = *a.coreness;
        else if (a.peel_survivor)
            row["coreness"] = "survivor";
        authors.push_back(std::move(row));
    }
    j["authors"] = std::move(authors);

    nlohmann::json groups = nlohmann::json::array();
    for (const auto& grp : rep.entropy_groups)
        groups.push_back({{"n_fields", grp.n_fields},
                          {"count", grp.count},
                          {"mean_entropy", grp.mean_entropy},
                          {"density", opt_json(grp.density)}});
    j["entropy_groups"] = std::move(groups);

    const DyadicSection& dy = rep.dyadic;
    j["dyadic"] = {{"edge_pairs", dy.edge_pairs},
                   {"non_edge_pairs", dy.non_edge_pairs},
                   {"same_primary_edges", dy.same_primary_edges},
                   {"same_primary_non_edges", dy.same_primary_non_edges},
                   {"same_primary_edge_fraction", dy.same_primary_edge_fraction},
                   {"same_primary_non_edge_fraction", dy.same_primary_non_edge_fraction},
                   {"proportion_z", opt_json(dy.proportion_z)},
                   {"mann_whitney", opt_json(dy.mwu)},
                   {"kolmogorov_smirnov", opt_json(dy.ks)},
                   {"edge_density", opt_json(dy.edge_density)},
                   {"non_edge_density", opt_json(dy.non_edge_density)},
                   {"note", dy.note}};

    const TeamSection& ts = rep.teams;
    nlohmann::json team_rows = nlohmann::json::array();
    for (const auto& r : ts.rows)
        team_rows.push_back({{"paper_id", r.paper_id},
                             {"size", r.size},
                             {"solo", r.solo},
                             {"entropy", opt_json(r.entropy)},
                             {"mean_cosine", opt_json(r.mean_cosine)},
                             {"z_entropy", opt_json(r.z_entropy)},
                             {"z_cosine", opt_json(r.z_cosine)}});
    nlohmann::json sizes = nlohmann::json::array();
    for (const auto& s : ts.ensemble_summary)
        sizes.push_back({{"size", s.size},
                         {"entropy_mean", s.entropy_mean},
                         {"entropy_sd", s.entropy_sd},
                         {"cosine_mean", s.cosine_mean},
                         {"cosine_sd", s.cosine_sd}});
    j["teams"] = {{"rows", std::move(team_rows)},
                  {"ensemble_summary", std::move(sizes)},
                  {"n_sims", ts.n_sims},
                  {"seed", ts.ensemble_seed},
                  {"undefined_z_entropy", ts.undefined_z_entropy},
                  {"undefined_z_cosine", ts.undefined_z_cosine},
                  {"z_entropy_density", opt_json(ts.z_entropy_density)},
                  {"z_cosine_density", opt_json(ts.z_cosine_density)},
                  {"note", ts.note}};

    auto cmp_json = [](const std::optional<AttributeComparison>& c) -> nlohmann::json {
        if (!c) return nullptr;
        return {{"attribute", c->attribute},
                {"core_median", c->core_median},
                {"shell_median", c->shell_median},
                {"mann_whitney", to_json(c->mwu)},
                {"kolmogorov_smirnov", to_json(c->ks)},
                {"core_density", opt_json(c->core_density)},
                {"shell_density", opt_json(c->shell_density)}};
    };
    j["coreshell"] = {{"n_core", rep.coreshell.n_core},
                      {"n_shell", rep.coreshell.n_shell},
                      {"peeled", rep.coreshell.peeled},
                      {"h_index", cmp_json(rep.coreshell.h_index)},
                      {"pub_years", cmp_json(rep.coreshell.pub_years)},
                      {"note", rep.coreshell.note}};
    return j;
}

// --- Plot specs --------------------------------------------------------------

// Declarative, self-contained figure description (data inline) renderable by
// common chart tools. Figures: fig1 entropy densities per field count with
// mean lines; fig2 edge vs non-edge cosine densities; fig4 team z-score
// densities; fig6 core vs shell attribute densities, two panels.
inline nlohmann::json make_plotspec(const nlohmann::json& report, const std::string& figure) {
    auto series_from = [](const nlohmann::json& density, const std::string& name,
                          std::optional<double> mean_line = std::nullopt) {
        nlohmann::json s{{"name", name}, {"x", density["grid"]}, {"y", density["density"]}};
        if (mean_line) s["mean_line"] = *mean_line;
        return s;
    };
    auto missing = [&](const std::string& what) {
        return std::runtime_error("plotspec " + figure + ": report lacks " + what);
    };

    nlohmann::json spec{{"figure", figure}, {"panels", nlohmann::json::array()}};
    if (figure == "fig1") {
        spec["title"] = "Individual entropy by number of publication fields";
        nlohmann::json series = nlohmann::json::array();
        for (const auto& grp : report.at("entropy_groups")) {
            if (grp["density"].is_null()) continue;
            series.push_back(series_from(grp["density"],
                                         "n_d=" + std::to_string(grp["n_fields"].get<int>()),
                                         grp["mean_entropy"].get<double>()));
        }
        if (series.empty()) throw missing("entropy group densities");
        spec["panels"].push_back({{"x_label", "individual entropy"},
                                  {"y_label", "probability density"},
                                  {"series", std::move(series)}});
    } else if (figure == "fig2") {
        spec["title"] = "Cosine similarity of collaborating vs non-collaborating pairs";
        const auto& dy = report.at("dyadic");
        if (dy["edge_density"].is_null() || dy["non_edge_density"].is_null())
            throw missing("dyadic density curves");
        spec["panels"].push_back(
            {{"x_label", "cosine similarity"},
             {"y_label", "probability density"},
             {"series",
              {series_from(dy["edge_density"], "edges"),
               series_from(dy["non_edge_density"], "non-edges")}}});
    } else if (figure == "fig4") {
        spec["title"] = "Team-level z-scores against the random-team ensemble";
        const auto& ts = report.at("teams");
        if (ts["z_entropy_density"].is_null() || ts["z_cosine_density"].is_null())
            throw missing("team z-score density curves");
        spec["panels"].push_back(
            {{"x_label", "z-score"},
             {"y_label", "probability density"},
             {"series",
              {series_from(ts["z_entropy_density"], "z (team entropy)"),
               series_from(ts["z_cosine_density"], "z (team mean cosine)")}}});
    } else if (figure == "fig6") {
        spec["title"] = "h-index and publication experience, core vs shell";
        const auto& cs = report.at("coreshell");
        for (const char* attr : {"h_index", "pub_years"}) {
            const auto& cmp = cs.at(attr);
            if (cmp.is_null() || cmp["core_density"].is_null() ||
                cmp["shell_density"].is_null())
                throw missing(std::string(attr) + " comparison densities");
            spec["panels"].push_back(
                {{"x_label", attr},
                 {"y_label", "probability density"},
                 {"series",
                  {series_from(cmp["core_density"], "core"),
                   series_from(cmp["shell_density"], "shell")}}});
        }
    } else {
        throw std::runtime_error("plotspec: unknown figure '" + figure +
                                 "' (expected fig1|fig2|fig4|fig6)");
    }
    return spec;
}

// --- File emission -----------------------------------------------------------

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

inline void write_density_csv(const std::filesystem::path& path, const stats::DensityCurve& c) {
    std::string buf = "x,density\n";
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        buf += fmt_double(c.grid[i]) + "," + fmt_double(c.density[i]) + "\n";
    write_text(path, buf);
}

}  // namespace detail

// Writes report.json, the CSV tables, the attributed edge list, and the plot
// specs into cfg.out_dir, per the emit flags. Every byte is a deterministic
// function of (inputs, config, seed).
inline void write_outputs(const PipelineResult& result, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const AnalysisReport& rep = result.report;
    const nlohmann::json report_json = report_to_json(rep);

    if (cfg.emit.json) detail::write_text(dir / "report.json", report_json.dump(2) + "\n");

    if (cfg.emit.csv) {
        {
            std::string buf =
                "author_id,primary,n_fields,entropy,single_field_excluded,h_index,pub_years,"
                "degree,local_transitivity\n";
            for (const auto& a : rep.authors)
                buf += a.author_id + "," + a.primary + "," + std::to_string(a.n_fields) + "," +
                       detail::fmt_double(a.entropy) + "," + (a.entropy_excluded ? "1" : "0") +
                       "," + std::to_string(a.h_index) + "," + std::to_string(a.pub_years) + "," +
                       std::to_string(a.degree) + "," + detail::fmt_double(a.transitivity) + "\n";
            detail::write_text(dir / "authors_measures.csv", buf);
        }
        {
            std::ofstream out(dir / "pairs.csv", std::ios::binary);
            if (!out) throw std::runtime_error("cannot write pairs.csv");
            out << "source,target,cosine,is_edge,same_primary\n";
            const PairMode mode =
                cfg.pairs_edges_only ? PairMode::edges_only : PairMode::all_pairs;
            for_each_pair(result.graph, result.vectors, result.primary_pos, mode,
                          [&](const PairRecord& p) {
                              out << result.graph.node_id(p.i) << ','
                                  << result.graph.node_id(p.j) << ','
                                  << detail::fmt_double(p.similarity) << ','
                                  << (p.is_edge ? '1' : '0') << ','
                                  << (p.same_primary ? '1' : '0') << '\n';
                          });
        }
        {
            std::string buf = "paper_id,size,solo,team_entropy,team_mean_cosine,z_entropy,z_cosine\n";
            auto cell = [](const std::optional<double>& v) {
                return v ? detail::fmt_double(*v) : std::string();
            };
            for (const auto& r : rep.teams.rows)
                buf += r.paper_id + "," + std::to_string(r.size) + "," + (r.solo ? "1" : "0") +
                       "," + cell(r.entropy) + "," + cell(r.mean_cosine) + "," +
                       cell(r.z_entropy) + "," + cell(r.z_cosine) + "\n";
            detail::write_text(dir / "teams_measures.csv", buf);
        }
        {
            std::string buf = "author_id,label,coreness_level\n";
            for (const auto& a : rep.authors) {
                std::string level;
                if (a.coreness)
                    level = std::to_string(*a.coreness);
                else if (a.peel_survivor)
                    level = "inf";
                buf += a.author_id + "," + a.label + "," + level + "\n";
            }
            detail::write_text(dir / "coreshell.csv", buf);
        }
        {
            std::string buf = "# source target cosine\n";
            for_each_pair(result.graph, result.vectors, result.primary_pos,
                          PairMode::edges_only, [&](const PairRecord& p) {
                              buf += result.graph.node_id(p.i) + " " +
                                     result.graph.node_id(p.j) + " " +
                                     detail::fmt_double(p.similarity) + "\n";
                          });
            detail::write_text(dir / "graph_attributed.edgelist", buf);
        }
        for (const auto& grp : rep.entropy_groups)
            if (grp.density)
                detail::write_density_csv(
                    dir / ("density_entropy_nd" + std::to_string(grp.n_fields) + ".csv"),
                    *grp.density);
        if (rep.dyadic.edge_density)
            detail::write_density_csv(dir / "density_cosine_edges.csv", *rep.dyadic.edge_density);
        if (rep.dyadic.non_edge_density)
            detail::write_density_csv(dir / "density_cosine_nonedges.csv",
                                      *rep.dyadic.non_edge_density);
        if (rep.teams.z_entropy_density)
            detail::write_density_csv(dir / "density_z_entropy.csv", *rep.teams.z_entropy_density);
        if (rep.teams.z_cosine_density)
            detail::write_density_csv(dir / "density_z_cosine.csv", *rep.teams.z_cosine_density);
        auto emit_cmp = [&](const std::optional<AttributeComparison>& c, const std::string& tag) {
            if (!c) return;
            if (c->core_density)
                detail::write_density_csv(dir / ("density_" + tag + "_core.csv"),
                                          *c->core_density);
            if (c->shell_density)
                detail::write_density_csv(dir / ("density_" + tag + "_shell.csv"),
                                          *c->shell_density);
        };
        emit_cmp(rep.coreshell.h_index, "hindex");
        emit_cmp(rep.coreshell.pub_years, "pubyears");
    }

    if (cfg.emit.plotspec) {
        for (const char* fig : {"fig1", "fig2", "fig4", "fig6"}) {
            try {
                const nlohmann::json spec = make_plotspec(report_json, fig);
                detail::write_text(dir / ("plotspec_" + std::string(fig) + ".json"),
                                   spec.dump(2) + "\n");
            } catch (const std::exception&) {
                // Section absent for this dataset; figure skipped.
            }
        }
    }
}

// Full run: load, analyze, emit. Throws PipelineError on any failure.
inline PipelineResult cmd_run(const RunConfig& cfg) {
    PipelineResult result = run_pipeline(cfg);
    detail::with_stage("emit", [&] { write_outputs(result, cfg); });
    return result;
}

}  // namespace collabscope
