#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "collabscope/model.hpp"

namespace collabscope {

enum class TableFormat { csv, json };

struct ExclusionEntry {
    std::string entity_id;
    std::string reason;
    std::string scope;  // which analyses the exclusion affects
};

struct ExclusionConfig {
    // Single-field authors are only flagged out of the individual-entropy
    // statistics by default; set this to remove them from the dataset
    // entirely (sensitivity analysis).
    bool drop_single_field = false;
};

// Parsed input bundle. After assembly no team member dangles, the discipline
// index covers every count label, and `exclusions` records everything that
// was dropped or flagged on the way (serialized with reports).
struct Dataset {
    std::vector<AuthorRecord> records;
    std::vector<Team> teams;
    DisciplineIndex index;
    std::vector<ExclusionEntry> exclusions;
    std::vector<std::string> single_field_authors;  // sorted; flagged, still in the graph
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits one CSV line; double quotes delimit fields that contain commas.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::uint64_t parse_count(const std::string& s, const std::string& where) {
    const std::string t = trim(s);
    if (t.empty()) throw std::runtime_error(where + ": empty count");
    if (t[0] == '-') throw std::runtime_error(where + ": negative count '" + t + "'");
    std::uint64_t v = 0;
    for (char c : t) {
        if (c < '0' || c > '9')
            throw std::runtime_error(where + ": invalid count '" + t + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

inline long parse_int(const std::string& s, const std::string& where) {
    const std::string t = trim(s);
    try {
        std::size_t pos = 0;
        const long v = std::stol(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": invalid integer '" + t + "'");
    }
}

// "LABEL:INT;LABEL:INT;..." -> counts map.
inline std::map<std::string, std::uint64_t> parse_counts_field(const std::string& field,
                                                               const std::string& where) {
    std::map<std::string, std::uint64_t> counts;
    if (trim(field).empty()) throw std::runtime_error(where + ": empty counts field");
    std::stringstream ss(field);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (trim(item).empty()) continue;
        const auto colon = item.rfind(':');
        if (colon == std::string::npos)
            throw std::runtime_error(where + ": counts entry '" + item + "' lacks ':'");
        const std::string label = trim(item.substr(0, colon));
        if (label.empty()) throw std::runtime_error(where + ": empty discipline label");
        const std::uint64_t v = parse_count(item.substr(colon + 1), where);
        if (!counts.emplace(label, v).second)
            throw std::runtime_error(where + ": duplicate discipline label '" + label + "'");
    }
    if (counts.empty()) throw std::runtime_error(where + ": empty counts field");
    return counts;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void check_record(const AuthorRecord& r, const std::string& where) {
    try {
        r.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
}

}  // namespace detail

inline TableFormat sniff_format(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".json") return TableFormat::json;
    return TableFormat::csv;
}

// Authors CSV: header `author_id,counts,h_index,first_year,last_year`,
// counts encoded `LABEL:INT;LABEL:INT;...`. Errors carry the line number.
inline std::vector<AuthorRecord> load_authors_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open authors file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("authors file '" + path.string() + "' is empty");
    const auto header = detail::split_csv_line(line);
    const std::vector<std::string> expected = {"author_id", "counts", "h_index", "first_year",
                                               "last_year"};
    if (std::vector<std::string>(header.begin(), header.end()) != expected)
        throw std::runtime_error("authors file '" + path.string() +
                                 "': unexpected header; expected "
                                 "author_id,counts,h_index,first_year,last_year");
    std::vector<AuthorRecord> records;
    std::set<std::string> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5)
            throw std::runtime_error(where + ": expected 5 fields, got " +
                                     std::to_string(fields.size()));
        AuthorRecord r;
        r.author_id = detail::trim(fields[0]);
        if (r.author_id.empty()) throw std::runtime_error(where + ": empty author_id");
        if (!seen.insert(r.author_id).second)
            throw std::runtime_error(where + ": duplicate author_id '" + r.author_id + "'");
        r.counts = detail::parse_counts_field(fields[1], where);
        r.h_index = detail::parse_count(fields[2], where);
        r.first_year = static_cast<int>(detail::parse_int(fields[3], where));
        r.last_year = static_cast<int>(detail::parse_int(fields[4], where));
        detail::check_record(r, where);
        records.push_back(std::move(r));
    }
    return records;
}

// Authors JSON: array of objects with keys author_id, counts (label -> int),
// h_index, first_year, last_year. Unknown extra keys are ignored.
inline std::vector<AuthorRecord> load_authors_json(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("authors file '" + path.string() + "': " + e.what());
    }
    if (!doc.is_array())
        throw std::runtime_error("authors file '" + path.string() + "': expected a JSON array");
    std::vector<AuthorRecord> records;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string where = path.filename().string() + "[" + std::to_string(i) + "]";
        const auto& obj = doc[i];
        if (!obj.is_object()) throw std::runtime_error(where + ": expected an object");
        try {
            AuthorRecord r;
            r.author_id = obj.at("author_id").get<std::string>();
            if (!seen.insert(r.author_id).second)
                throw std::runtime_error("duplicate author_id '" + r.author_id + "'");
            const auto& counts = obj.at("counts");
            if (!counts.is_object()) throw std::runtime_error("counts must be an object");
            for (const auto& [label, v] : counts.items()) {
                if (!v.is_number_integer() || v.get<long long>() < 0)
                    throw std::runtime_error("count of '" + label +
                                             "' must be a non-negative integer");
                r.counts[label] = v.get<std::uint64_t>();
            }
            r.h_index = obj.at("h_index").get<std::uint64_t>();
            r.first_year = obj.at("first_year").get<int>();
            r.last_year = obj.at("last_year").get<int>();
            r.validate();
            records.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }
    return records;
}

inline std::vector<AuthorRecord> load_authors(const std::filesystem::path& path,
                                              TableFormat format) {
    return format == TableFormat::json ? load_authors_json(path) : load_authors_csv(path);
}

struct LoadedTeams {
    std::vector<Team> teams;
    std::vector<ExclusionEntry> log;  // duplicate-member collapses, solo flags
};

namespace detail {

inline void add_team(LoadedTeams& out, std::set<std::string>& seen_papers,
                     const std::string& paper_id, const std::vector<std::string>& raw_members,
                     const std::string& where) {
    if (paper_id.empty()) throw std::runtime_error(where + ": empty paper_id");
    if (!seen_papers.insert(paper_id).second)
        throw std::runtime_error(where + ": duplicate paper_id '" + paper_id + "'");
    Team t;
    t.paper_id = paper_id;
    std::set<std::string> seen;
    for (const auto& m : raw_members) {
        const std::string id = trim(m);
        if (id.empty()) continue;
        if (seen.insert(id).second) {
            t.members.push_back(id);
        } else {
            out.log.push_back({paper_id, "duplicate member '" + id + "' collapsed", "teams"});
        }
    }
    if (t.members.empty())
        throw std::runtime_error(where + ": team '" + paper_id + "' has no members");
    if (t.members.size() == 1)
        out.log.push_back({paper_id, "solo team; excluded from dyadic/team analyses", "teams"});
    out.teams.push_back(std::move(t));
}

}  // namespace detail

// Teams file: JSON array of {paper_id, members: [...]} or CSV lines
// `paper_id,member;member;...` (header optional). Duplicate members within a
// paper are collapsed and logged; solo teams are retained and flagged.
inline LoadedTeams load_teams(const std::filesystem::path& path) {
    LoadedTeams out;
    std::set<std::string> seen_papers;
    if (sniff_format(path) == TableFormat::json) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(detail::read_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error("teams file '" + path.string() + "': " + e.what());
        }
        if (!doc.is_array())
            throw std::runtime_error("teams file '" + path.string() + "': expected a JSON array");
        for (std::size_t i = 0; i < doc.size(); ++i) {
            const std::string where = path.filename().string() + "[" + std::to_string(i) + "]";
            try {
                const auto& obj = doc[i];
                const auto paper_id = obj.at("paper_id").get<std::string>();
                std::vector<std::string> members;
                for (const auto& m : obj.at("members")) members.push_back(m.get<std::string>());
                detail::add_team(out, seen_papers, paper_id, members, where);
            } catch (const nlohmann::json::exception& e) {
                throw std::runtime_error(where + ": " + e.what());
            }
        }
        return out;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open teams file '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        if (lineno == 1 && detail::trim(line) == "paper_id,members") continue;  // header
        const std::string where = path.filename().string() + ":" + std::to_string(lineno);
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(where + ": expected `paper_id,member;member;...`");
        std::vector<std::string> members;
        std::stringstream ss(fields[1]);
        std::string m;
        while (std::getline(ss, m, ';')) members.push_back(m);
        detail::add_team(out, seen_papers, detail::trim(fields[0]), members, where);
    }
    return out;
}

// Optional explicit index: newline-delimited labels fixing order and N_d.
inline DisciplineIndex load_discipline_index(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open index file '" + path.string() + "'");
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        const std::string label = detail::trim(line);
        if (!label.empty()) labels.push_back(label);
    }
    if (labels.empty())
        throw std::runtime_error("index file '" + path.string() + "' has no labels");
    return DisciplineIndex(std::move(labels));
}

// Discipline index from the union of labels seen in the records, sorted
// lexicographically, so N_d is fixed and shared across all authors.
inline DisciplineIndex index_from_records(std::span<const AuthorRecord> records) {
    std::set<std::string> labels;
    for (const auto& r : records)
        for (const auto& [label, c] : r.counts) labels.insert(label);
    if (labels.empty()) throw std::runtime_error("no discipline labels found in records");
    return DisciplineIndex(std::vector<std::string>(labels.begin(), labels.end()));
}

// Joins records and teams into a Dataset: members without a record are
// filtered out (logged) so nothing dangles, teams emptied by the filter are
// dropped, and every count label is checked against the index.
inline Dataset assemble_dataset(std::vector<AuthorRecord> records, LoadedTeams loaded,
                                std::optional<DisciplineIndex> index = std::nullopt) {
    Dataset ds;
    ds.records = std::move(records);
    ds.exclusions = std::move(loaded.log);
    ds.index = index ? std::move(*index) : index_from_records(ds.records);

    std::set<std::string> known;
    for (const auto& r : ds.records) {
        if (!known.insert(r.author_id).second)
            throw std::runtime_error("assemble_dataset: duplicate author_id '" + r.author_id +
                                     "'");
        for (const auto& [label, c] : r.counts)
            if (!ds.index.position(label))
                throw std::runtime_error("assemble_dataset: label '" + label + "' of author '" +
                                         r.author_id + "' missing from discipline index");
    }

    for (auto& t : loaded.teams) {
        Team kept;
        kept.paper_id = t.paper_id;
        for (auto& m : t.members) {
            if (known.count(m)) {
                kept.members.push_back(std::move(m));
            } else {
                ds.exclusions.push_back(
                    {t.paper_id, "member '" + m + "' has no author record; dropped", "teams"});
            }
        }
        if (kept.members.empty()) {
            ds.exclusions.push_back({t.paper_id, "no resolvable members; team dropped", "teams"});
            continue;
        }
        ds.teams.push_back(std::move(kept));
    }
    return ds;
}

// Flags single-field authors out of the individual-entropy statistics (their
// entropy is trivially zero). They stay in the graph and in dyadic/team
// analyses unless cfg.drop_single_field also removes them outright.
inline Dataset apply_exclusions(Dataset ds, const ExclusionConfig& cfg) {
    std::vector<std::string> flagged;
    for (const auto& r : ds.records)
        if (r.field_count() == 1) flagged.push_back(r.author_id);
    std::sort(flagged.begin(), flagged.end());
    for (const auto& id : flagged)
        ds.exclusions.push_back({id, "single publication field", cfg.drop_single_field
                                                                     ? "dataset"
                                                                     : "individual_entropy"});
    if (!cfg.drop_single_field) {
        ds.single_field_authors = std::move(flagged);
        return ds;
    }

    const std::set<std::string> drop(flagged.begin(), flagged.end());
    std::erase_if(ds.records, [&](const AuthorRecord& r) { return drop.count(r.author_id) > 0; });
    std::vector<Team> kept_teams;
    for (auto& t : ds.teams) {
        std::erase_if(t.members, [&](const std::string& m) { return drop.count(m) > 0; });
        if (t.members.empty()) {
            ds.exclusions.push_back({t.paper_id, "no members left after removal; team dropped",
                                     "teams"});
            continue;
        }
        kept_teams.push_back(std::move(t));
    }
    ds.teams = std::move(kept_teams);
    ds.single_field_authors.clear();
    return ds;
}

inline nlohmann::json authors_to_json(std::span<const AuthorRecord> records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [label, c] : r.counts) counts[label] = c;
        arr.push_back({{"author_id", r.author_id},
                       {"counts", std::move(counts)},
                       {"h_index", r.h_index},
                       {"first_year", r.first_year},
                       {"last_year", r.last_year}});
    }
    return arr;
}

inline nlohmann::json teams_to_json(std::span<const Team> teams) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : teams)
        arr.push_back({{"paper_id", t.paper_id}, {"members", t.members}});
    return arr;
}

inline void save_authors_json(const std::filesystem::path& path,
                              std::span<const AuthorRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << authors_to_json(records).dump(2) << "\n";
}

inline void save_authors_csv(const std::filesystem::path& path,
                             std::span<const AuthorRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "author_id,counts,h_index,first_year,last_year\n";
    for (const auto& r : records) {
        out << r.author_id << ",";
        bool first = true;
        for (const auto& [label, c] : r.counts) {
            if (!first) out << ";";
            out << label << ":" << c;
            first = false;
        }
        out << "," << r.h_index << "," << r.first_year << "," << r.last_year << "\n";
    }
}

inline void save_teams_json(const std::filesystem::path& path, std::span<const Team> teams) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << teams_to_json(teams).dump(2) << "\n";
}

inline void save_teams_csv(const std::filesystem::path& path, std::span<const Team> teams) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "paper_id,members\n";
    for (const auto& t : teams) {
        out << t.paper_id << ",";
        for (std::size_t i = 0; i < t.members.size(); ++i) {
            if (i) out << ";";
            out << t.members[i];
        }
        out << "\n";
    }
}

inline void save_discipline_index(const std::filesystem::path& path,
                                  const DisciplineIndex& index) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (const auto& label : index.labels()) out << label << "\n";
}

}  // namespace collabscope
