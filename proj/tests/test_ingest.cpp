#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "collabscope/ingest.hpp"
#include "collabscope/model.hpp"

using namespace collabscope;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        dir_ = fs::temp_directory_path() /
               ("collabscope_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter_++));
        fs::create_directories(dir_);
    }
    ~TempDir() { fs::remove_all(dir_); }
    fs::path file(const std::string& name, const std::string& content) const {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
    const fs::path& path() const { return dir_; }

private:
    static inline int counter_ = 0;
    fs::path dir_;
};

constexpr const char* kAuthorsHeader = "author_id,counts,h_index,first_year,last_year\n";

}  // namespace

TEST(LoadAuthorsCsv, ParsesDocumentedRow) {
    TempDir tmp;
    const auto p = tmp.file("authors.csv",
                            std::string(kAuthorsHeader) +
                                "a1,CS:50;Math:30;Soc:20,12,2005,2019\n");
    const auto records = load_authors(p, TableFormat::csv);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].author_id, "a1");
    EXPECT_EQ(records[0].counts.at("CS"), 50u);
    EXPECT_EQ(records[0].counts.at("Math"), 30u);
    EXPECT_EQ(records[0].counts.at("Soc"), 20u);
    EXPECT_EQ(records[0].h_index, 12u);
    EXPECT_EQ(records[0].first_year, 2005);
    EXPECT_EQ(records[0].last_year, 2019);
}

TEST(LoadAuthorsCsv, EmptyCountsRejectedWithLineNumber) {
    TempDir tmp;
    const auto p =
        tmp.file("authors.csv", std::string(kAuthorsHeader) + "a1,CS:5,1,2000,2001\n a2,,3,2000,2001\n");
    try {
        load_authors(p, TableFormat::csv);
        FAIL() << "expected rejection";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }
}

TEST(LoadAuthorsCsv, NegativeCountRejected) {
    TempDir tmp;
    const auto p = tmp.file("authors.csv",
                            std::string(kAuthorsHeader) + "a1,CS:-3,1,2000,2001\n");
    EXPECT_THROW(load_authors(p, TableFormat::csv), std::runtime_error);
}

TEST(LoadAuthorsCsv, DuplicateAuthorRejected) {
    TempDir tmp;
    const auto p = tmp.file("authors.csv", std::string(kAuthorsHeader) +
                                               "a1,CS:5,1,2000,2001\na1,CS:6,1,2000,2001\n");
    EXPECT_THROW(load_authors(p, TableFormat::csv), std::runtime_error);
}

TEST(LoadAuthorsCsv, BadHeaderRejected) {
    TempDir tmp;
    const auto p = tmp.file("authors.csv", "id,counts\n");
    EXPECT_THROW(load_authors(p, TableFormat::csv), std::runtime_error);
}

TEST(LoadAuthorsCsv, MalformedRowCarriesLineNumber) {
    TempDir tmp;
    const auto p = tmp.file("authors.csv",
                            std::string(kAuthorsHeader) + "a1,CS:5,1,2000\n");
    try {
        load_authors(p, TableFormat::csv);
        FAIL() << "expected rejection";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
    }
}

TEST(LoadAuthorsJson, ParsesAndIgnoresUnknownKeys) {
    TempDir tmp;
    const auto p = tmp.file("authors.json", R"([
      {"author_id": "a1", "counts": {"CS": 50, "Math": 30}, "h_index": 12,
       "first_year": 2005, "last_year": 2019, "orcid": "0000-0001", "notes": [1,2]}
    ])");
    const auto records = load_authors(p, TableFormat::json);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].counts.at("Math"), 30u);
}

TEST(LoadAuthorsJson, NegativeCountRejected) {
    TempDir tmp;
    const auto p = tmp.file("authors.json",
                            R"([{"author_id":"a1","counts":{"CS":-2},"h_index":0,"first_year":2000,"last_year":2001}])");
    EXPECT_THROW(load_authors(p, TableFormat::json), std::runtime_error);
}

TEST(LoadAuthorsJson, MissingFileNamesPath) {
    try {
        load_authors("no/such/file.json", TableFormat::json);
        FAIL() << "expected rejection";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("no/such/file.json"), std::string::npos);
    }
}

TEST(LoadTeams, CsvBasicsAndDedup) {
    TempDir tmp;
    const auto p = tmp.file("teams.csv",
                            "p1,a1;a2;a3\n"
                            "p2,a1;a1;a2\n"
                            "p3,a9\n");
    const auto loaded = load_teams(p);
    ASSERT_EQ(loaded.teams.size(), 3u);
    EXPECT_EQ(loaded.teams[0].members, (std::vector<std::string>{"a1", "a2", "a3"}));
    EXPECT_EQ(loaded.teams[1].members, (std::vector<std::string>{"a1", "a2"}));
    EXPECT_EQ(loaded.teams[2].members, (std::vector<std::string>{"a9"}));
    // one dedup entry for p2, one solo flag for p3
    ASSERT_EQ(loaded.log.size(), 2u);
    EXPECT_EQ(loaded.log[0].entity_id, "p2");
    EXPECT_EQ(loaded.log[1].entity_id, "p3");
}

TEST(LoadTeams, EmptyMemberListRejectedWithPaperId) {
    TempDir tmp;
    const auto p = tmp.file("teams.csv", "p4, ; ;\n");
    try {
        load_teams(p);
        FAIL() << "expected rejection";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("p4"), std::string::npos);
    }
}

TEST(LoadTeams, DuplicatePaperIdRejected) {
    TempDir tmp;
    const auto p = tmp.file("teams.csv", "p1,a1;a2\np1,a3;a4\n");
    EXPECT_THROW(load_teams(p), std::runtime_error);
}

TEST(LoadTeams, JsonForm) {
    TempDir tmp;
    const auto p = tmp.file("teams.json",
                            R"([{"paper_id":"p1","members":["a1","a2"]},
                                {"paper_id":"p2","members":["a3"]}])");
    const auto loaded = load_teams(p);
    ASSERT_EQ(loaded.teams.size(), 2u);
    EXPECT_EQ(loaded.teams[0].members.size(), 2u);
}

TEST(LoadDisciplineIndex, FixesOrderAndSize) {
    TempDir tmp;
    const auto p = tmp.file("index.txt", "CS\nMath\nSoc\n\n");
    const auto index = load_discipline_index(p);
    EXPECT_EQ(index.size(), 3u);
    EXPECT_EQ(index.label(0), "CS");
    EXPECT_EQ(*index.position("Soc"), 2u);
}

TEST(AssembleDataset, FiltersDanglingMembersWithLog) {
    std::vector<AuthorRecord> records;
    AuthorRecord a;
    a.author_id = "a1";
    a.counts = {{"CS", 3}};
    records.push_back(a);
    LoadedTeams teams;
    teams.teams.push_back(Team{"p1", {"a1", "ghost"}});
    teams.teams.push_back(Team{"p2", {"ghost"}});
    const auto ds = assemble_dataset(records, teams);
    ASSERT_EQ(ds.teams.size(), 1u);
    EXPECT_EQ(ds.teams[0].members, std::vector<std::string>{"a1"});
    // one entry for the dropped member, one for the dropped team
    EXPECT_EQ(ds.exclusions.size(), 3u);
    EXPECT_NO_THROW(build_graph(ds.records, ds.teams));
}

TEST(AssembleDataset, IndexFromRecordsIsSortedUnion) {
    std::vector<AuthorRecord> records(2);
    records[0].author_id = "a1";
    records[0].counts = {{"Math", 1}, {"CS", 2}};
    records[1].author_id = "a2";
    records[1].counts = {{"Art", 1}};
    const auto ds = assemble_dataset(records, LoadedTeams{});
    EXPECT_EQ(ds.index.labels(), (std::vector<std::string>{"Art", "CS", "Math"}));
}

TEST(AssembleDataset, ExplicitIndexMustCoverLabels) {
    std::vector<AuthorRecord> records(1);
    records[0].author_id = "a1";
    records[0].counts = {{"Phys", 1}};
    try {
        assemble_dataset(records, LoadedTeams{}, DisciplineIndex({"CS"}));
        FAIL() << "expected rejection";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("Phys"), std::string::npos);
    }
}

TEST(ApplyExclusions, FlagsWithoutChangingTopology) {
    std::vector<AuthorRecord> records;
    for (int i = 0; i < 100; ++i) {
        AuthorRecord r;
        r.author_id = "a" + std::to_string(i);
        if (i < 3)
            r.counts = {{"CS", 10}};  // single-field
        else
            r.counts = {{"CS", 10}, {"Edu", 1}};
        records.push_back(r);
    }
    LoadedTeams teams;
    teams.teams.push_back(Team{"p1", {"a0", "a5"}});
    auto ds = apply_exclusions(assemble_dataset(records, teams), ExclusionConfig{});
    EXPECT_EQ(ds.single_field_authors.size(), 3u);
    std::size_t flagged = 0;
    for (const auto& e : ds.exclusions)
        if (e.scope == "individual_entropy") ++flagged;
    EXPECT_EQ(flagged, 3u);
    const auto g = build_graph(ds.records, ds.teams);
    EXPECT_EQ(g.node_count(), 100u);  // still everyone
    EXPECT_EQ(g.edge_count(), 1u);
}

TEST(ApplyExclusions, DropModeRemovesAuthorsAndPrunesTeams) {
    std::vector<AuthorRecord> records(3);
    records[0].author_id = "solo_field";
    records[0].counts = {{"CS", 5}};
    records[1].author_id = "b";
    records[1].counts = {{"CS", 5}, {"Math", 5}};
    records[2].author_id = "c";
    records[2].counts = {{"CS", 5}, {"Soc", 5}};
    LoadedTeams teams;
    teams.teams.push_back(Team{"p1", {"solo_field", "b"}});
    teams.teams.push_back(Team{"p2", {"solo_field"}});
    ExclusionConfig cfg;
    cfg.drop_single_field = true;
    const auto ds = apply_exclusions(assemble_dataset(records, teams), cfg);
    EXPECT_EQ(ds.records.size(), 2u);
    ASSERT_EQ(ds.teams.size(), 1u);
    EXPECT_EQ(ds.teams[0].members, std::vector<std::string>{"b"});
}

// JSON round trip: parse(serialize(parse(file))) sees the same values.
TEST(RoundTrip, AuthorsAndTeamsJson) {
    TempDir tmp;
    const std::string authors_text = R"([
      {"author_id":"a1","counts":{"CS":50,"Math":30},"h_index":12,"first_year":2005,"last_year":2019},
      {"author_id":"a2","counts":{"Soc":7},"h_index":3,"first_year":2011,"last_year":2012}
    ])";
    const auto ap = tmp.file("authors.json", authors_text);
    const auto records = load_authors(ap, TableFormat::json);
    const auto ap2 = tmp.path() / "authors_rt.json";
    save_authors_json(ap2, records);
    const auto records2 = load_authors(ap2, TableFormat::json);
    EXPECT_EQ(nlohmann::json::parse(authors_text), authors_to_json(records2));

    const std::string teams_text =
        R"([{"paper_id":"p1","members":["a1","a2"]},{"paper_id":"p2","members":["a2"]}])";
    const auto tp = tmp.file("teams.json", teams_text);
    const auto loaded = load_teams(tp);
    const auto tp2 = tmp.path() / "teams_rt.json";
    save_teams_json(tp2, loaded.teams);
    const auto loaded2 = load_teams(tp2);
    EXPECT_EQ(nlohmann::json::parse(teams_text), teams_to_json(loaded2.teams));
}

TEST(RoundTrip, AuthorsCsv) {
    TempDir tmp;
    std::vector<AuthorRecord> records(1);
    records[0].author_id = "a1";
    records[0].counts = {{"CS", 2}, {"Math", 1}};
    records[0].h_index = 4;
    records[0].first_year = 2001;
    records[0].last_year = 2003;
    const auto p = tmp.path() / "authors.csv";
    save_authors_csv(p, records);
    const auto back = load_authors(p, TableFormat::csv);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].counts, records[0].counts);
    EXPECT_EQ(back[0].h_index, 4u);
}
