#pragma once

#include <set>
#include <string>

#include "linkalign/catalog.hpp"

namespace linkalign {

enum class StarPolicy { expand, table_only };

struct SqlRefOptions {
    StarPolicy star_policy = StarPolicy::expand;
};

// Extract the gold schema-item set (tables and columns) referenced by a
// Spider-style SQL query against one database of the catalog.
//
// Grammar subset: SELECT/DISTINCT, FROM, JOIN..ON, WHERE, GROUP BY, HAVING,
// ORDER BY, LIMIT, nested subqueries (scalar, IN, EXISTS, derived tables),
// UNION/INTERSECT/EXCEPT, aggregates and plain functions, arithmetic and
// boolean expressions, BETWEEN/IN/LIKE/NOT, IS [NOT] NULL. No CTEs, window
// functions or DDL.
//
// Binding rules: aliases resolve within their scope, then enclosing scopes
// (correlated subqueries); unqualified columns bind to the unique in-scope
// table owning them (ambiguity is an error); a bare `*` in a select list
// expands per star_policy; `*` as an aggregate argument (count(*)) touches
// no column.
std::set<SchemaItem> extract_refs(const std::string& sql, const std::string& db_id,
                                  const DatabaseCatalog& catalog,
                                  const SqlRefOptions& opts = {});

}  // namespace linkalign
