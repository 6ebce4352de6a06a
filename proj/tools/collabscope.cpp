// collabscope: coauthorship-network interdisciplinarity analysis CLI.
//
//   collabscope run      full pipeline over author/team dump files
//   collabscope synth    synthetic dataset generator (fixtures, demos)
//   collabscope plotspec figure spec from an existing report.json

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "collabscope/ingest.hpp"
#include "collabscope/report.hpp"
#include "collabscope/synth.hpp"

namespace {

constexpr int kExitInputError = 2;

std::vector<std::pair<std::size_t, double>> parse_size_dist(const std::string& text) {
    // "2:0.35,3:0.35,4:0.2,5:0.1" -> {(size, weight)...}
    std::vector<std::pair<std::size_t, double>> dist;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--team-size-dist",
                                       "expected SIZE:WEIGHT pairs, e.g. 2:0.5,3:0.5");
        dist.emplace_back(std::stoul(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    return dist;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coauthorship-network interdisciplinarity analysis"};
    app.require_subcommand(1);

    // --- run ---
    collabscope::RunConfig cfg;
    std::string entropy_norm = "max";
    std::string authors_format = "auto";
    std::vector<std::string> emit = {"csv", "json"};
    auto* run = app.add_subcommand("run", "run the full analysis pipeline");
    run->add_option("--authors", cfg.authors_path, "authors file (.csv or .json)")->required();
    run->add_option("--teams", cfg.teams_path, "teams file (.csv or .json)")->required();
    run->add_option("--index", cfg.index_path, "discipline index file (newline-delimited labels)");
    run->add_option("--authors-format", authors_format, "authors file format")
        ->check(CLI::IsMember({"auto", "csv", "json"}));
    run->add_option("--nsims", cfg.n_sims, "null-model simulations per team size")
        ->default_val(1000);
    run->add_option("--seed", cfg.seed, "master RNG seed")->default_val(1);
    run->add_option("--entropy-norm", entropy_norm, "team entropy normalization rule")
        ->check(CLI::IsMember({"max", "min"}))
        ->default_val("max");
    run->add_option("--out", cfg.out_dir, "output directory")->default_val(".");
    run->add_option("--emit", emit, "outputs to write (csv, json, plotspec)")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "plotspec"}));
    run->add_flag("--pairs-edges-only", cfg.pairs_edges_only,
                  "restrict pairs.csv to edges (analysis still covers all pairs)");
    run->add_flag("--peel", cfg.peel, "compute iterative coreness levels as well");
    run->add_flag("--drop-single-field", cfg.exclusions.drop_single_field,
                  "remove single-field authors from the dataset entirely");
    run->add_option("--kde-grid", cfg.kde_grid_size, "density curve grid size")->default_val(512);
    run->add_option("--mwu-exact-max", cfg.mwu.exact_max_total,
                    "largest n1+n2 taking the exact Mann-Whitney path (untied samples)")
        ->default_val(12);
    bool no_cc = false;
    run->add_flag("--no-continuity-correction", no_cc,
                  "disable the continuity correction in the Mann-Whitney normal approximation");

    // --- synth ---
    collabscope::SynthConfig syn;
    std::string synth_out = ".";
    std::string synth_format = "csv";
    std::string size_dist_text;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--n-authors", syn.n_authors, "number of authors")->default_val(100);
    synth->add_option("--disciplines", syn.n_disciplines, "number of disciplines")
        ->default_val(27);
    synth->add_option("--homophily", syn.homophily,
                      "0 = uniformly random teams, 1 = single-discipline teams")
        ->check(CLI::Range(0.0, 1.0))
        ->default_val(0.0);
    synth->add_option("--n-teams", syn.n_teams, "number of teams")->default_val(50);
    synth->add_option("--team-size-dist", size_dist_text,
                      "team size distribution as SIZE:WEIGHT,... (default 2:0.35,3:0.35,4:0.2,5:0.1)");
    synth->add_option("--seed", syn.seed, "master RNG seed")->default_val(1);
    synth->add_option("--out", synth_out, "output directory")->default_val(".");
    synth->add_option("--format", synth_format, "output file format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_val("csv");

    // --- plotspec ---
    std::string report_path, figure, plot_out;
    auto* plot = app.add_subcommand("plotspec", "emit a figure spec from a report");
    plot->add_option("--report", report_path, "path to report.json")->required();
    plot->add_option("--figure", figure, "figure id")
        ->check(CLI::IsMember({"fig1", "fig2", "fig4", "fig6"}))
        ->required();
    plot->add_option("--out", plot_out, "output file (default: plotspec_<figure>.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (authors_format != "auto")
                cfg.authors_format = authors_format == "json" ? collabscope::TableFormat::json
                                                              : collabscope::TableFormat::csv;
            cfg.entropy_norm = entropy_norm == "min" ? collabscope::EntropyNorm::min
                                                     : collabscope::EntropyNorm::max;
            cfg.emit = {};
            for (const auto& e : emit) {
                if (e == "csv") cfg.emit.csv = true;
                if (e == "json") cfg.emit.json = true;
                if (e == "plotspec") cfg.emit.plotspec = true;
            }
            cfg.mwu.continuity_correction = !no_cc;
            const auto result = collabscope::cmd_run(cfg);
            const auto& s = result.report.summary;
            std::cout << "analyzed " << s.n_authors << " authors, " << s.n_edges << " edges, "
                      << s.n_teams << " teams (" << s.n_disciplines << " disciplines); core "
                      << result.report.coreshell.n_core << " / shell "
                      << result.report.coreshell.n_shell << "\n"
                      << "outputs written to " << cfg.out_dir << "\n";
        } else if (*synth) {
            if (!size_dist_text.empty()) syn.team_size_weights = parse_size_dist(size_dist_text);
            const auto data = collabscope::synthesize(syn);
            namespace fs = std::filesystem;
            fs::create_directories(synth_out);
            const fs::path dir(synth_out);
            if (synth_format == "json") {
                collabscope::save_authors_json(dir / "authors.json", data.records);
                collabscope::save_teams_json(dir / "teams.json", data.teams);
            } else {
                collabscope::save_authors_csv(dir / "authors.csv", data.records);
                collabscope::save_teams_csv(dir / "teams.csv", data.teams);
            }
            collabscope::save_discipline_index(dir / "index.txt", data.index);
            std::cout << "wrote " << data.records.size() << " authors, " << data.teams.size()
                      << " teams to " << synth_out << "\n";
        } else if (*plot) {
            std::ifstream in(report_path);
            if (!in) throw std::runtime_error("cannot open report '" + report_path + "'");
            nlohmann::json report = nlohmann::json::parse(in);
            const nlohmann::json spec = collabscope::make_plotspec(report, figure);
            const std::string out_path =
                plot_out.empty() ? "plotspec_" + figure + ".json" : plot_out;
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
            out << spec.dump(2) << "\n";
            std::cout << "wrote " << out_path << "\n";
        }
    } catch (const collabscope::PipelineError& e) {
        std::cerr << "collabscope: error " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "collabscope: error: " << e.what() << "\n";
        return kExitInputError;
    }
    return 0;
}
