#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "linkalign/benchgen.hpp"
#include "linkalign/sqlref.hpp"

using namespace linkalign;

namespace {

const std::vector<TableMeta>& pets_tables(const DatabaseCatalog& catalog) {
    return catalog.tables("pets_1");
}

Example pets_example(const std::string& id = "g0") {
    Example ex;
    ex.example_id = id;
    ex.question = "List the first name of every student that has a pet";
    ex.gold_sql = "SELECT f_name FROM student WHERE stuid IN (SELECT stuid FROM has_pet)";
    ex.gold_db = "pets_1";
    return ex;
}

GenPair draft_pair(const std::string& id, std::string question) {
    GenPair pair;
    pair.original = pets_example(id);
    pair.modified_question = std::move(question);
    pair.status = PairStatus::draft;
    return pair;
}

}  // namespace

TEST_CASE("extract_subset keeps only identifiers that exist in the database") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    mock.script("benchgen/subset",
                "tables: student, spaceship\ncolumns: student.f_name, student.warp_core");
    SchemaSubset subset = extract_subset(pets_tables(catalog), mock);
    REQUIRE(subset.items.size() == 2);
    CHECK(subset.items[0] == SchemaItem::table("pets_1", "student"));
    CHECK(subset.items[1] == SchemaItem::column("pets_1", "student", "f_name"));
    REQUIRE(subset.warnings.size() == 2);
    CHECK(subset.warnings[0].find("spaceship") != std::string::npos);
    CHECK(subset.warnings[1].find("warp_core") != std::string::npos);
}

TEST_CASE("extract_subset flags a subset that covers the whole database") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    mock.script("benchgen/subset",
                "tables: student, has_pet, pets\n"
                "columns: student.stuid, student.f_name, student.age, has_pet.stuid, "
                "has_pet.pet_id, pets.pet_id, pets.pet_type");
    SchemaSubset subset = extract_subset(pets_tables(catalog), mock);
    bool flagged = std::any_of(subset.warnings.begin(), subset.warnings.end(),
                               [](const std::string& w) {
                                   return w.find("whole database") != std::string::npos;
                               });
    CHECK(flagged);
}

TEST_CASE("extract_subset with nothing recoverable is an error") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    mock.script("benchgen/subset", "tables: spaceship\ncolumns: warp.core");
    CHECK_THROWS_AS(extract_subset(pets_tables(catalog), mock), ValidationError);
}

TEST_CASE("expand_schema appends proposed tables and columns") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    mock.script("benchgen/subset", "tables: student\ncolumns: student.f_name");
    SchemaSubset subset = extract_subset(pets_tables(catalog), mock);

    mock.script("benchgen/expand",
                "table: vaccinations | columns: vac_id (int), pet_id (int)\n"
                "table: clinics | columns: clinic_id (int), city (text)\n"
                "column: student.gpa (real)\n");
    ExpandOutcome outcome = expand_schema(pets_tables(catalog), subset, mock);
    REQUIRE(outcome.tables.size() == 5);
    CHECK(outcome.warnings.empty());

    // Originals stay in place, item for item.
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(outcome.tables[i].table_name == pets_tables(catalog)[i].table_name);
    }
    CHECK(outcome.tables[3].table_name == "vaccinations");
    CHECK(outcome.tables[3].columns.size() == 2);
    CHECK(outcome.tables[3].columns[1].data_type == "int");
    CHECK(outcome.tables[4].table_name == "clinics");
    const TableMeta& student = outcome.tables[0];
    REQUIRE(student.find_column("gpa"));
    CHECK(student.find_column("gpa")->data_type == "real");
}

TEST_CASE("expansion never changes gold SQL references") {
    auto catalog = fixtures::pets_catalog();
    Example ex = pets_example();
    auto before = extract_refs(ex.gold_sql, ex.gold_db, catalog);

    MockChatBackend mock;
    mock.script("benchgen/subset", "tables: student\ncolumns: student.f_name");
    SchemaSubset subset = extract_subset(pets_tables(catalog), mock);
    mock.script("benchgen/expand",
                "table: vaccinations | columns: vac_id (int)\ncolumn: pets.weight (real)\n");
    ExpandOutcome outcome = expand_schema(pets_tables(catalog), subset, mock);

    DatabaseCatalog expanded;
    expanded.add_database("pets_1", outcome.tables);
    expanded.validate();
    CHECK(extract_refs(ex.gold_sql, ex.gold_db, expanded) == before);
}

TEST_CASE("expand_schema drops colliding additions with warnings") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    mock.script("benchgen/subset", "tables: student\ncolumns: student.f_name");
    SchemaSubset subset = extract_subset(pets_tables(catalog), mock);
    mock.script("benchgen/expand",
                "table: student | columns: clone (int)\n"
                "column: student.f_name (text)\n"
                "column: ghosts.spook (text)\n");
    ExpandOutcome outcome = expand_schema(pets_tables(catalog), subset, mock);
    CHECK(outcome.tables.size() == 3);  // nothing added
    REQUIRE(outcome.warnings.size() == 3);
    CHECK(outcome.warnings[0].find("student") != std::string::npos);
    CHECK(outcome.warnings[1].find("f_name") != std::string::npos);
    CHECK(outcome.warnings[2].find("ghosts") != std::string::npos);
}

TEST_CASE("expand_schema rejects subset items outside the database") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    SchemaSubset bogus;
    bogus.items.push_back(SchemaItem::table("pets_1", "spaceship"));
    CHECK_THROWS_AS(expand_schema(pets_tables(catalog), bogus, mock), ValidationError);
}

TEST_CASE("modify_query rejects drafts that leak a db-unique identifier") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    // "stuid" is a column only pets_1 owns.
    mock.script("benchgen/modify", "What is the stuid of the oldest owner?");
    GenPair pair = modify_query(pets_example(), {"pets_1_syn"}, catalog, mock);
    CHECK(pair.status == PairStatus::rejected);
    CHECK(pair.notes.find("stuid") != std::string::npos);
    CHECK(pair.notes.find("pets_1") != std::string::npos);
}

TEST_CASE("modify_query accepts identifier-free drafts") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    mock.script("benchgen/modify", "Show the given name of every animal owner");
    GenPair pair = modify_query(pets_example(), {"pets_1_syn"}, catalog, mock);
    CHECK(pair.status == PairStatus::draft);
    CHECK(pair.modified_question == "Show the given name of every animal owner");
    CHECK(pair.original.example_id == "g0");
}

TEST_CASE("modify_query edge cases") {
    auto catalog = fixtures::pets_catalog();
    MockChatBackend mock;
    SUBCASE("empty output is rejected") {
        mock.script("benchgen/modify", "   \n");
        GenPair pair = modify_query(pets_example(), {"pets_1_syn"}, catalog, mock);
        CHECK(pair.status == PairStatus::rejected);
        CHECK(pair.notes.find("empty") != std::string::npos);
    }
    SUBCASE("no synonym databases is a precondition violation") {
        CHECK_THROWS_AS(modify_query(pets_example(), {}, catalog, mock), ValidationError);
    }
}

TEST_CASE("filter_pairs drops the length extremes") {
    auto pairs_of = [&](std::size_t n) {
        std::vector<GenPair> pairs;
        for (std::size_t i = 0; i < n; ++i) {
            pairs.push_back(draft_pair("p" + std::to_string(i),
                                       std::string(10 + i, 'q')));
        }
        return pairs;
    };

    SUBCASE("100 pairs keep 85") {
        FilterOutcome outcome = filter_pairs(pairs_of(100));
        CHECK_FALSE(outcome.skipped);
        CHECK(outcome.retained.size() == 85);
        // shortest 5 and longest 10 are gone
        for (const auto& pair : outcome.retained) {
            std::size_t len = pair.modified_question.size();
            CHECK(len >= 15);
            CHECK(len < 100);
        }
    }
    SUBCASE("20 pairs keep 17") {
        FilterOutcome outcome = filter_pairs(pairs_of(20));
        CHECK_FALSE(outcome.skipped);
        CHECK(outcome.retained.size() == 17);
    }
    SUBCASE("below 20 pairs the filter is skipped") {
        FilterOutcome outcome = filter_pairs(pairs_of(10));
        CHECK(outcome.skipped);
        CHECK(outcome.retained.size() == 10);
    }
    SUBCASE("retained pairs keep their original order") {
        FilterOutcome outcome = filter_pairs(pairs_of(40));
        REQUIRE(outcome.retained.size() == 40 - 4 - 2);
        for (std::size_t i = 1; i < outcome.retained.size(); ++i) {
            CHECK(outcome.retained[i - 1].modified_question.size() <
                  outcome.retained[i].modified_question.size());  // built monotone
        }
    }
}

TEST_CASE("verify_pair verdicts") {
    SUBCASE("aligned on the first pass") {
        MockChatBackend mock;
        mock.script("benchgen/verify/1", "the question and SQL are aligned");
        GenPair pair = verify_pair(draft_pair("a", "who owns a pet"), mock);
        CHECK(pair.status == PairStatus::verified);
        CHECK(mock.call_count() == 1);
    }
    SUBCASE("mismatch then a successful correction") {
        MockChatBackend mock;
        mock.script("benchgen/verify/1", "mismatch: the question asks for ages");
        mock.script("benchgen/correct", "who owns a pet, by first name");
        mock.script("benchgen/verify/2", "aligned");
        GenPair pair = verify_pair(draft_pair("a", "who owns a pet"), mock);
        CHECK(pair.status == PairStatus::verified);
        CHECK(pair.modified_question == "who owns a pet, by first name");
        CHECK(pair.notes == "corrected once");
    }
    SUBCASE("mismatch twice is a rejection") {
        MockChatBackend mock;
        mock.script("benchgen/verify/1", "mismatch");
        mock.script("benchgen/correct", "still off");
        mock.script("benchgen/verify/2", "mismatch again");
        GenPair pair = verify_pair(draft_pair("a", "who owns a pet"), mock);
        CHECK(pair.status == PairStatus::rejected);
        CHECK(pair.notes.find("mismatch") != std::string::npos);
    }
    SUBCASE("a response claiming both reads as mismatch") {
        MockChatBackend mock;
        mock.script("benchgen/verify/1", "not aligned, a mismatch");
        mock.script("benchgen/correct", "");
        GenPair pair = verify_pair(draft_pair("a", "q"), mock);
        CHECK(pair.status == PairStatus::rejected);
        CHECK(pair.notes.find("empty") != std::string::npos);
    }
    SUBCASE("only drafts can be verified") {
        MockChatBackend mock;
        GenPair rejected = draft_pair("a", "q");
        rejected.status = PairStatus::rejected;
        CHECK_THROWS_AS(verify_pair(rejected, mock), ValidationError);
    }
}

TEST_CASE("render_catalog_file round-trips through the schema loader") {
    auto catalog = fixtures::pets_catalog();
    std::string rendered = render_catalog_file({pets_tables(catalog)});
    DatabaseCatalog reloaded = parse_spider_tables(rendered);

    REQUIRE(reloaded.has_db("pets_1"));
    const auto& tables = reloaded.tables("pets_1");
    REQUIRE(tables.size() == 3);
    CHECK(reloaded.resolves(SchemaItem::column("pets_1", "student", "f_name")));
    const ColumnMeta* stuid = reloaded.find_column(SchemaItem::column("pets_1", "student", "stuid"));
    REQUIRE(stuid);
    CHECK(stuid->is_primary_key);
    const ColumnMeta* fk = reloaded.find_column(SchemaItem::column("pets_1", "has_pet", "pet_id"));
    REQUIRE(fk);
    REQUIRE(fk->foreign_refs.size() == 1);
    CHECK(fk->foreign_refs[0].table_name == "pets");
    CHECK(fk->foreign_refs[0].column_name == "pet_id");
}

TEST_CASE("render_question_file emits one record per pair") {
    GenPair verified = draft_pair("a", "q1");
    verified.status = PairStatus::verified;
    GenPair rejected = draft_pair("b", "q2");
    rejected.status = PairStatus::rejected;
    rejected.notes = "mismatch after one correction";

    std::string rendered = render_question_file({verified, rejected});
    CHECK(rendered.find("\"example_id\": \"a\"") != std::string::npos);
    CHECK(rendered.find("\"status\": \"verified\"") != std::string::npos);
    CHECK(rendered.find("\"status\": \"rejected\"") != std::string::npos);
    CHECK(rendered.find("mismatch after one correction") != std::string::npos);
    CHECK(rendered.find("\"db_id\": \"pets_1\"") != std::string::npos);
}
