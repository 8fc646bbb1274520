#pragma once

// Shared catalog/backends builders for the test suites.

#include <string>
#include <vector>

#include "linkalign/catalog.hpp"

namespace fixtures {

inline linkalign::ColumnMeta col(const std::string& db, const std::string& table,
                                 const std::string& name, const std::string& type = "text",
                                 const std::string& desc = "",
                                 std::vector<std::string> examples = {}) {
    linkalign::ColumnMeta c;
    c.db_id = db;
    c.table_name = table;
    c.column_name = name;
    c.data_type = type;
    if (!desc.empty()) c.description = desc;
    c.value_examples = std::move(examples);
    return c;
}

inline linkalign::TableMeta table(const std::string& db, const std::string& name,
                                  std::vector<linkalign::ColumnMeta> cols) {
    linkalign::TableMeta t;
    t.db_id = db;
    t.table_name = name;
    t.columns = std::move(cols);
    return t;
}

// Three-table pet-ownership database plus an unrelated people database.
inline linkalign::DatabaseCatalog pets_catalog() {
    linkalign::DatabaseCatalog catalog;
    std::string db = "pets_1";
    auto pets = col(db, "pets", "pet_id", "number");
    auto has_pet_pet = col(db, "has_pet", "pet_id", "number");
    has_pet_pet.foreign_refs.push_back({db, "pets", "pet_id"});
    auto has_pet_stu = col(db, "has_pet", "stuid", "number");
    has_pet_stu.foreign_refs.push_back({db, "student", "stuid"});
    auto stuid = col(db, "student", "stuid", "number");
    stuid.is_primary_key = true;
    catalog.add_database(db, {
        table(db, "student", {stuid, col(db, "student", "f_name"),
                              col(db, "student", "age", "number")}),
        table(db, "has_pet", {has_pet_stu, has_pet_pet}),
        table(db, "pets", {col(db, "pets", "pet_id", "number"),
                           col(db, "pets", "pet_type")}),
    });
    std::string db2 = "people_db";
    catalog.add_database(db2, {
        table(db2, "people", {col(db2, "people", "person_id", "number"),
                              col(db2, "people", "first_name")}),
    });
    catalog.validate();
    return catalog;
}

inline linkalign::DatabaseCatalog concert_catalog() {
    linkalign::DatabaseCatalog catalog;
    std::string db = "concert_singer";
    catalog.add_database(db, {
        table(db, "singer",
              {col(db, "singer", "singer_id", "number"),
               col(db, "singer", "name", "text", "singer name", {"Joe"}),
               col(db, "singer", "age", "number"),
               col(db, "singer", "country")}),
        table(db, "concert",
              {col(db, "concert", "concert_id", "number"),
               col(db, "concert", "concert_name"),
               col(db, "concert", "year", "number")}),
    });
    catalog.validate();
    return catalog;
}

// n_dbs databases with disjoint identifier vocabularies: database "dbI" holds
// tables "tI_J" with columns "cI_J_K". Token-level disjointness keeps the
// hash-embedder retrieval oracle predictable.
inline linkalign::DatabaseCatalog synthetic_catalog(int n_dbs, int tables_per_db,
                                                    int cols_per_table) {
    linkalign::DatabaseCatalog catalog;
    for (int i = 0; i < n_dbs; ++i) {
        std::string db = "db" + std::to_string(i);
        std::vector<linkalign::TableMeta> tables;
        for (int j = 0; j < tables_per_db; ++j) {
            std::string tname = "t" + std::to_string(i) + "_" + std::to_string(j);
            std::vector<linkalign::ColumnMeta> cols;
            for (int k = 0; k < cols_per_table; ++k) {
                cols.push_back(col(db, tname,
                                   "c" + std::to_string(i) + "_" + std::to_string(j) + "_" +
                                       std::to_string(k)));
            }
            tables.push_back(table(db, tname, std::move(cols)));
        }
        catalog.add_database(db, std::move(tables));
    }
    catalog.validate();
    return catalog;
}

inline std::string pets_tables_json() {
    return R"([
      {
        "db_id": "pets_1",
        "table_names_original": ["Student", "Has_Pet", "Pets"],
        "table_names": ["student", "has pet", "pets"],
        "column_names_original": [
          [-1, "*"],
          [0, "StuID"], [0, "F_name"], [0, "Age"],
          [1, "StuID"], [1, "Pet_ID"],
          [2, "Pet_ID"], [2, "Pet_Type"]
        ],
        "column_types": ["text", "number", "text", "number", "number", "number", "number", "text"],
        "primary_keys": [1, 6],
        "foreign_keys": [[4, 1], [5, 6]]
      }
    ])";
}

}  // namespace fixtures
