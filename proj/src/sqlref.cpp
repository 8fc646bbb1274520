#include "linkalign/sqlref.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace linkalign {

namespace {

// ---------------------------------------------------------------- tokenizer

enum class TokKind { ident, number, string_lit, symbol, end };

struct Token {
    TokKind kind = TokKind::end;
    std::string text;  // identifiers lowercased, quotes stripped
};

class Tokenizer {
public:
    explicit Tokenizer(const std::string& sql) { tokenize(sql); }

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : end_;
    }
    Token next() {
        Token t = peek();
        if (pos_ < tokens_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return pos_ >= tokens_.size(); }

private:
    void tokenize(const std::string& sql) {
        std::size_t i = 0;
        while (i < sql.size()) {
            char c = sql[i];
            unsigned char uc = static_cast<unsigned char>(c);
            if (std::isspace(uc)) {
                ++i;
            } else if (std::isalpha(uc) || c == '_') {
                std::size_t start = i;
                while (i < sql.size() && (std::isalnum(static_cast<unsigned char>(sql[i])) ||
                                          sql[i] == '_')) {
                    ++i;
                }
                tokens_.push_back({TokKind::ident, to_lower(sql.substr(start, i - start))});
            } else if (std::isdigit(uc) ||
                       (c == '.' && i + 1 < sql.size() &&
                        std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
                std::size_t start = i;
                while (i < sql.size() && (std::isdigit(static_cast<unsigned char>(sql[i])) ||
                                          sql[i] == '.')) {
                    ++i;
                }
                tokens_.push_back({TokKind::number, sql.substr(start, i - start)});
            } else if (c == '\'') {
                std::size_t start = ++i;
                while (i < sql.size() && sql[i] != '\'') ++i;
                if (i >= sql.size()) throw ParseError("sql: unterminated string literal");
                tokens_.push_back({TokKind::string_lit, sql.substr(start, i - start)});
                ++i;
            } else if (c == '"' || c == '`') {
                char quote = c;
                std::size_t start = ++i;
                while (i < sql.size() && sql[i] != quote) ++i;
                if (i >= sql.size()) throw ParseError("sql: unterminated quoted identifier");
                tokens_.push_back({TokKind::ident, to_lower(sql.substr(start, i - start))});
                ++i;
            } else if (c == '!' || c == '<' || c == '>' || c == '=') {
                std::size_t start = i++;
                if (i < sql.size() && (sql[i] == '=' || (c == '<' && sql[i] == '>'))) ++i;
                tokens_.push_back({TokKind::symbol, sql.substr(start, i - start)});
            } else if (c == ';') {
                ++i;  // trailing statement separator
            } else {
                tokens_.push_back({TokKind::symbol, std::string(1, c)});
                ++i;
            }
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    Token end_;
};

bool is_keyword(const Token& t, const char* kw) {
    return t.kind == TokKind::ident && t.text == kw;
}
bool is_symbol(const Token& t, const char* s) {
    return t.kind == TokKind::symbol && t.text == s;
}

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {
        "select", "distinct", "from", "join", "inner", "left", "right", "full",
        "outer", "cross", "on", "where", "group", "by", "having", "order",
        "limit", "offset", "union", "intersect", "except", "all", "and", "or",
        "not", "in", "like", "between", "is", "null", "as", "asc", "desc",
        "exists"};
    return words;
}

const std::set<std::string>& unsupported_words() {
    static const std::set<std::string> words = {"with", "over", "window", "case",
                                                "create", "insert", "update", "delete"};
    return words;
}

// --------------------------------------------------------------------- AST

struct Query;

enum class ExprKind {
    column,    // qualifier ('' if none) + name
    star,      // qualifier ('' if bare *)
    literal,
    func,      // name + args
    binary,    // children[0] op children[1]
    unary,     // NOT / - / EXISTS
    subquery,  // scalar or IN/EXISTS subquery
    in_list,   // children[0] IN (children[1..])
    between,   // children[0] BETWEEN children[1] AND children[2]
};

struct Expr {
    ExprKind kind = ExprKind::literal;
    std::string name;       // column name / function name / operator
    std::string qualifier;  // for column / star
    std::vector<Expr> children;
    std::shared_ptr<Query> sub;  // for subquery
    bool in_aggregate_arg = false;
};

struct TableSource {
    bool derived = false;
    std::string table;  // real table name (normalized)
    std::string alias;  // normalized; empty if none
    std::shared_ptr<Query> sub;
};

struct SelectStmt {
    std::vector<Expr> select_items;
    std::vector<TableSource> from;
    std::vector<Expr> on_exprs;
    std::vector<Expr> other_exprs;  // WHERE / GROUP BY / HAVING / ORDER BY
};

struct Query {
    std::vector<SelectStmt> branches;  // set-operation operands
};

// ------------------------------------------------------------------ parser

class Parser {
public:
    explicit Parser(const std::string& sql) : toks_(sql) {}

    Query parse() {
        Query q = parse_query();
        if (!toks_.at_end()) {
            throw ParseError("sql: unexpected trailing token \"" + toks_.peek().text + "\"");
        }
        return q;
    }

private:
    Tokenizer toks_;

    [[noreturn]] void fail(const std::string& what) { throw ParseError("sql: " + what); }

    void check_supported(const Token& t) {
        if (t.kind == TokKind::ident && unsupported_words().count(t.text)) {
            fail("unsupported construct: " + t.text);
        }
    }

    Query parse_query() {
        Query q;
        q.branches.push_back(parse_select());
        while (is_keyword(toks_.peek(), "union") || is_keyword(toks_.peek(), "intersect") ||
               is_keyword(toks_.peek(), "except")) {
            toks_.next();
            if (is_keyword(toks_.peek(), "all")) toks_.next();
            q.branches.push_back(parse_select());
        }
        return q;
    }

    SelectStmt parse_select() {
        check_supported(toks_.peek());
        if (!is_keyword(toks_.peek(), "select")) {
            fail("expected SELECT, got \"" + toks_.peek().text + "\"");
        }
        toks_.next();
        if (is_keyword(toks_.peek(), "distinct")) toks_.next();

        SelectStmt stmt;
        stmt.select_items.push_back(parse_expr());
        while (is_symbol(toks_.peek(), ",")) {
            toks_.next();
            stmt.select_items.push_back(parse_expr());
        }

        if (is_keyword(toks_.peek(), "from")) {
            toks_.next();
            parse_from(stmt);
        }
        if (is_keyword(toks_.peek(), "where")) {
            toks_.next();
            stmt.other_exprs.push_back(parse_expr());
        }
        if (is_keyword(toks_.peek(), "group")) {
            toks_.next();
            if (!is_keyword(toks_.peek(), "by")) fail("expected BY after GROUP");
            toks_.next();
            stmt.other_exprs.push_back(parse_expr());
            while (is_symbol(toks_.peek(), ",")) {
                toks_.next();
                stmt.other_exprs.push_back(parse_expr());
            }
        }
        if (is_keyword(toks_.peek(), "having")) {
            toks_.next();
            stmt.other_exprs.push_back(parse_expr());
        }
        if (is_keyword(toks_.peek(), "order")) {
            toks_.next();
            if (!is_keyword(toks_.peek(), "by")) fail("expected BY after ORDER");
            toks_.next();
            stmt.other_exprs.push_back(parse_expr());
            if (is_keyword(toks_.peek(), "asc") || is_keyword(toks_.peek(), "desc")) {
                toks_.next();
            }
            while (is_symbol(toks_.peek(), ",")) {
                toks_.next();
                stmt.other_exprs.push_back(parse_expr());
                if (is_keyword(toks_.peek(), "asc") || is_keyword(toks_.peek(), "desc")) {
                    toks_.next();
                }
            }
        }
        if (is_keyword(toks_.peek(), "limit")) {
            toks_.next();
            if (toks_.peek().kind != TokKind::number) fail("expected number after LIMIT");
            toks_.next();
            if (is_keyword(toks_.peek(), "offset")) {
                toks_.next();
                if (toks_.peek().kind != TokKind::number) fail("expected number after OFFSET");
                toks_.next();
            }
        }
        return stmt;
    }

    void parse_from(SelectStmt& stmt) {
        stmt.from.push_back(parse_table_source());
        while (true) {
            const Token& t = toks_.peek();
            if (is_symbol(t, ",")) {
                toks_.next();
                stmt.from.push_back(parse_table_source());
            } else if (is_keyword(t, "join") || is_keyword(t, "inner") ||
                       is_keyword(t, "left") || is_keyword(t, "right") ||
                       is_keyword(t, "full") || is_keyword(t, "cross")) {
                while (toks_.peek().kind == TokKind::ident &&
                       toks_.peek().text != "join") {
                    if (!is_keyword(toks_.peek(), "inner") && !is_keyword(toks_.peek(), "left") &&
                        !is_keyword(toks_.peek(), "right") && !is_keyword(toks_.peek(), "full") &&
                        !is_keyword(toks_.peek(), "outer") && !is_keyword(toks_.peek(), "cross")) {
                        fail("expected JOIN, got \"" + toks_.peek().text + "\"");
                    }
                    toks_.next();
                }
                if (!is_keyword(toks_.peek(), "join")) fail("expected JOIN");
                toks_.next();
                stmt.from.push_back(parse_table_source());
                if (is_keyword(toks_.peek(), "on")) {
                    toks_.next();
                    stmt.on_exprs.push_back(parse_expr());
                }
            } else {
                break;
            }
        }
    }

    TableSource parse_table_source() {
        TableSource ts;
        if (is_symbol(toks_.peek(), "(")) {
            toks_.next();
            ts.derived = true;
            ts.sub = std::make_shared<Query>(parse_query());
            if (!is_symbol(toks_.peek(), ")")) fail("expected ) after derived table");
            toks_.next();
        } else {
            check_supported(toks_.peek());
            if (toks_.peek().kind != TokKind::ident || reserved_words().count(toks_.peek().text)) {
                fail("expected table name, got \"" + toks_.peek().text + "\"");
            }
            ts.table = toks_.next().text;
        }
        if (is_keyword(toks_.peek(), "as")) {
            toks_.next();
            if (toks_.peek().kind != TokKind::ident) fail("expected alias after AS");
            ts.alias = toks_.next().text;
        } else if (toks_.peek().kind == TokKind::ident &&
                   !reserved_words().count(toks_.peek().text) &&
                   !unsupported_words().count(toks_.peek().text)) {
            ts.alias = toks_.next().text;  // bare alias
        }
        return ts;
    }

    // Precedence: OR < AND < NOT < comparison < additive < multiplicative < unary.
    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        Expr left = parse_and();
        while (is_keyword(toks_.peek(), "or")) {
            toks_.next();
            Expr node{ExprKind::binary, "or"};
            node.children = {std::move(left), parse_and()};
            left = std::move(node);
        }
        return left;
    }

    Expr parse_and() {
        Expr left = parse_not();
        while (is_keyword(toks_.peek(), "and")) {
            toks_.next();
            Expr node{ExprKind::binary, "and"};
            node.children = {std::move(left), parse_not()};
            left = std::move(node);
        }
        return left;
    }

    Expr parse_not() {
        if (is_keyword(toks_.peek(), "not")) {
            toks_.next();
            Expr node{ExprKind::unary, "not"};
            node.children.push_back(parse_not());
            return node;
        }
        return parse_comparison();
    }

    Expr parse_comparison() {
        Expr left = parse_additive();
        while (true) {
            const Token& t = toks_.peek();
            bool negated = false;
            std::size_t look = 0;
            if (is_keyword(t, "not")) {
                negated = true;
                look = 1;
            }
            const Token& op = toks_.peek(look);
            if (is_keyword(op, "between")) {
                for (std::size_t i = 0; i <= look; ++i) toks_.next();
                Expr node{ExprKind::between, "between"};
                node.children.push_back(std::move(left));
                node.children.push_back(parse_additive());
                if (!is_keyword(toks_.peek(), "and")) fail("expected AND in BETWEEN");
                toks_.next();
                node.children.push_back(parse_additive());
                left = std::move(node);
            } else if (is_keyword(op, "in")) {
                for (std::size_t i = 0; i <= look; ++i) toks_.next();
                if (!is_symbol(toks_.peek(), "(")) fail("expected ( after IN");
                toks_.next();
                Expr node{ExprKind::in_list, "in"};
                node.children.push_back(std::move(left));
                if (is_keyword(toks_.peek(), "select")) {
                    Expr sub{ExprKind::subquery, "subquery"};
                    sub.sub = std::make_shared<Query>(parse_query());
                    node.children.push_back(std::move(sub));
                } else {
                    node.children.push_back(parse_expr());
                    while (is_symbol(toks_.peek(), ",")) {
                        toks_.next();
                        node.children.push_back(parse_expr());
                    }
                }
                if (!is_symbol(toks_.peek(), ")")) fail("expected ) after IN list");
                toks_.next();
                left = std::move(node);
            } else if (is_keyword(op, "like")) {
                for (std::size_t i = 0; i <= look; ++i) toks_.next();
                Expr node{ExprKind::binary, "like"};
                node.children = {std::move(left), parse_additive()};
                left = std::move(node);
            } else if (!negated && is_keyword(t, "is")) {
                toks_.next();
                if (is_keyword(toks_.peek(), "not")) toks_.next();
                if (!is_keyword(toks_.peek(), "null")) fail("expected NULL after IS");
                toks_.next();
                Expr node{ExprKind::unary, "is_null"};
                node.children.push_back(std::move(left));
                left = std::move(node);
            } else if (!negated && t.kind == TokKind::symbol &&
                       (t.text == "=" || t.text == "==" || t.text == "!=" || t.text == "<>" ||
                        t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=")) {
                std::string sym = toks_.next().text;
                Expr node{ExprKind::binary, sym};
                node.children = {std::move(left), parse_additive()};
                left = std::move(node);
            } else {
                if (negated) fail("unexpected NOT");
                break;
            }
        }
        return left;
    }

    Expr parse_additive() {
        Expr left = parse_multiplicative();
        while (is_symbol(toks_.peek(), "+") || is_symbol(toks_.peek(), "-")) {
            std::string op = toks_.next().text;
            Expr node{ExprKind::binary, op};
            node.children = {std::move(left), parse_multiplicative()};
            left = std::move(node);
        }
        return left;
    }

    Expr parse_multiplicative() {
        Expr left = parse_unary();
        while (is_symbol(toks_.peek(), "*") || is_symbol(toks_.peek(), "/") ||
               is_symbol(toks_.peek(), "%")) {
            std::string op = toks_.next().text;
            Expr node{ExprKind::binary, op};
            node.children = {std::move(left), parse_unary()};
            left = std::move(node);
        }
        return left;
    }

    Expr parse_unary() {
        if (is_symbol(toks_.peek(), "-") || is_symbol(toks_.peek(), "+")) {
            std::string op = toks_.next().text;
            Expr node{ExprKind::unary, op};
            node.children.push_back(parse_unary());
            return node;
        }
        if (is_keyword(toks_.peek(), "exists")) {
            toks_.next();
            if (!is_symbol(toks_.peek(), "(")) fail("expected ( after EXISTS");
            toks_.next();
            Expr node{ExprKind::subquery, "exists"};
            node.sub = std::make_shared<Query>(parse_query());
            if (!is_symbol(toks_.peek(), ")")) fail("expected ) after EXISTS subquery");
            toks_.next();
            return node;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = toks_.peek();
        check_supported(t);
        if (is_symbol(t, "(")) {
            toks_.next();
            Expr inner;
            if (is_keyword(toks_.peek(), "select")) {
                inner.kind = ExprKind::subquery;
                inner.name = "subquery";
                inner.sub = std::make_shared<Query>(parse_query());
            } else {
                inner = parse_expr();
            }
            if (!is_symbol(toks_.peek(), ")")) fail("expected )");
            toks_.next();
            return inner;
        }
        if (is_symbol(t, "*")) {
            toks_.next();
            return Expr{ExprKind::star, "*"};
        }
        if (t.kind == TokKind::number || t.kind == TokKind::string_lit) {
            toks_.next();
            return Expr{ExprKind::literal, t.text};
        }
        if (is_keyword(t, "null")) {
            toks_.next();
            return Expr{ExprKind::literal, "null"};
        }
        if (t.kind == TokKind::ident) {
            if (reserved_words().count(t.text)) {
                fail("unexpected keyword \"" + t.text + "\" in expression");
            }
            std::string first = toks_.next().text;
            if (is_symbol(toks_.peek(), "(")) {
                // Function call.
                toks_.next();
                Expr node{ExprKind::func, first};
                if (is_keyword(toks_.peek(), "distinct")) toks_.next();
                if (!is_symbol(toks_.peek(), ")")) {
                    node.children.push_back(parse_expr());
                    while (is_symbol(toks_.peek(), ",")) {
                        toks_.next();
                        node.children.push_back(parse_expr());
                    }
                }
                if (!is_symbol(toks_.peek(), ")")) fail("expected ) after function arguments");
                toks_.next();
                return node;
            }
            if (is_symbol(toks_.peek(), ".")) {
                toks_.next();
                if (is_symbol(toks_.peek(), "*")) {
                    toks_.next();
                    Expr node{ExprKind::star, "*"};
                    node.qualifier = first;
                    return node;
                }
                if (toks_.peek().kind != TokKind::ident) fail("expected column after \".\"");
                Expr node{ExprKind::column, toks_.next().text};
                node.qualifier = first;
                return node;
            }
            Expr node{ExprKind::column, first};
            return node;
        }
        fail("unexpected token \"" + t.text + "\"");
    }
};

// -------------------------------------------------------------- resolution

struct Binding {
    std::string alias;  // lookup key
    bool derived = false;
    std::string table;                                 // real table
    std::map<std::string, SchemaItem> exports;         // derived: output name -> item
};

struct Scope {
    const Scope* parent = nullptr;
    std::vector<Binding> bindings;

    const Binding* find_alias(const std::string& name) const {
        for (const auto& b : bindings) {
            if (b.alias == name) return &b;
        }
        return parent ? parent->find_alias(name) : nullptr;
    }
};

class Resolver {
public:
    Resolver(const std::string& db_id, const DatabaseCatalog& catalog,
             const SqlRefOptions& opts)
        : db_(normalize_identifier(db_id)), catalog_(catalog), opts_(opts) {
        if (!catalog_.has_db(db_)) throw ValidationError("sql: unknown db_id: " + db_);
    }

    std::set<SchemaItem> resolve(const Query& query) {
        resolve_query(query, nullptr, nullptr);
        return std::move(refs_);
    }

private:
    std::string db_;
    const DatabaseCatalog& catalog_;
    SqlRefOptions opts_;
    std::set<SchemaItem> refs_;

    void add_table(const std::string& table) {
        refs_.insert(SchemaItem::table(db_, table));
    }
    void add_column(const std::string& table, const std::string& column) {
        refs_.insert(SchemaItem::column(db_, table, column));
        add_table(table);
    }

    // exports_out (if given) receives the first branch's simple-column
    // select-list exports, for derived-table name resolution.
    void resolve_query(const Query& query, const Scope* parent,
                       std::map<std::string, SchemaItem>* exports_out) {
        for (std::size_t i = 0; i < query.branches.size(); ++i) {
            resolve_select(query.branches[i], parent,
                           i == 0 ? exports_out : nullptr);
        }
    }

    void resolve_select(const SelectStmt& stmt, const Scope* parent,
                        std::map<std::string, SchemaItem>* exports_out) {
        Scope scope;
        scope.parent = parent;
        for (const auto& ts : stmt.from) {
            Binding binding;
            binding.derived = ts.derived;
            if (ts.derived) {
                resolve_query(*ts.sub, parent, &binding.exports);
                binding.alias = ts.alias;  // may be empty; then unreachable by name
            } else {
                if (!catalog_.find_table(db_, ts.table)) {
                    throw ValidationError("sql: unknown table \"" + ts.table + "\" in db " + db_);
                }
                binding.table = ts.table;
                binding.alias = ts.alias.empty() ? ts.table : ts.alias;
                add_table(ts.table);
            }
            if (!binding.alias.empty() &&
                std::any_of(scope.bindings.begin(), scope.bindings.end(),
                            [&](const Binding& b) { return b.alias == binding.alias; })) {
                throw ValidationError("sql: duplicate alias \"" + binding.alias + "\"");
            }
            scope.bindings.push_back(std::move(binding));
        }

        for (const auto& e : stmt.select_items) resolve_expr(e, scope, exports_out, true);
        for (const auto& e : stmt.on_exprs) resolve_expr(e, scope, nullptr, false);
        for (const auto& e : stmt.other_exprs) resolve_expr(e, scope, nullptr, false);
    }

    void resolve_expr(const Expr& expr, const Scope& scope,
                      std::map<std::string, SchemaItem>* exports_out, bool top_level) {
        switch (expr.kind) {
            case ExprKind::column: {
                std::optional<SchemaItem> item = resolve_column(expr, scope);
                if (item && exports_out && top_level) {
                    exports_out->emplace(expr.name, *item);
                }
                break;
            }
            case ExprKind::star:
                resolve_star(expr, scope);
                break;
            case ExprKind::func:
                // count(*) and friends touch no particular column.
                for (const auto& child : expr.children) {
                    if (child.kind == ExprKind::star) continue;
                    resolve_expr(child, scope, nullptr, false);
                }
                break;
            case ExprKind::subquery:
                resolve_query(*expr.sub, &scope, nullptr);
                break;
            case ExprKind::literal:
                break;
            default:
                for (const auto& child : expr.children) {
                    resolve_expr(child, scope, nullptr, false);
                }
                if (expr.sub) resolve_query(*expr.sub, &scope, nullptr);
                break;
        }
    }

    std::optional<SchemaItem> resolve_column(const Expr& expr, const Scope& scope) {
        if (!expr.qualifier.empty()) {
            const Binding* binding = scope.find_alias(expr.qualifier);
            if (!binding) {
                throw ValidationError("sql: unknown table or alias \"" + expr.qualifier + "\"");
            }
            if (binding->derived) {
                auto it = binding->exports.find(expr.name);
                if (it == binding->exports.end()) {
                    throw ValidationError("sql: column \"" + expr.name +
                                          "\" is not exported by derived table \"" +
                                          expr.qualifier + "\"");
                }
                return std::nullopt;  // underlying item already counted inside
            }
            const TableMeta* table = catalog_.find_table(db_, binding->table);
            if (!table->find_column(expr.name)) {
                throw ValidationError("sql: unknown column \"" + expr.qualifier + "." +
                                      expr.name + "\"");
            }
            add_column(binding->table, expr.name);
            return SchemaItem::column(db_, binding->table, expr.name);
        }

        // Unqualified: bind to the unique owning table, searching the current
        // scope first, then enclosing scopes (correlated reference).
        for (const Scope* s = &scope; s; s = s->parent) {
            std::vector<const Binding*> owners;
            for (const auto& binding : s->bindings) {
                if (binding.derived) {
                    if (binding.exports.count(expr.name)) owners.push_back(&binding);
                } else {
                    const TableMeta* table = catalog_.find_table(db_, binding.table);
                    if (table->find_column(expr.name)) owners.push_back(&binding);
                }
            }
            if (owners.size() > 1) {
                throw ValidationError("sql: ambiguous column \"" + expr.name + "\"");
            }
            if (owners.size() == 1) {
                if (owners.front()->derived) return std::nullopt;
                add_column(owners.front()->table, expr.name);
                return SchemaItem::column(db_, owners.front()->table, expr.name);
            }
        }
        throw ValidationError("sql: unknown column \"" + expr.name + "\"");
    }

    void resolve_star(const Expr& expr, const Scope& scope) {
        std::vector<const Binding*> targets;
        if (expr.qualifier.empty()) {
            for (const auto& binding : scope.bindings) targets.push_back(&binding);
            if (targets.empty()) {
                throw ValidationError("sql: \"*\" with no FROM tables in scope");
            }
        } else {
            const Binding* binding = scope.find_alias(expr.qualifier);
            if (!binding) {
                throw ValidationError("sql: unknown table or alias \"" + expr.qualifier + "\"");
            }
            targets.push_back(binding);
        }
        for (const auto* binding : targets) {
            if (binding->derived) continue;  // inner items already counted
            if (opts_.star_policy == StarPolicy::table_only) {
                add_table(binding->table);
                continue;
            }
            const TableMeta* table = catalog_.find_table(db_, binding->table);
            for (const auto& col : table->columns) {
                add_column(binding->table, col.column_name);
            }
        }
    }
};

}  // namespace

std::set<SchemaItem> extract_refs(const std::string& sql, const std::string& db_id,
                                  const DatabaseCatalog& catalog, const SqlRefOptions& opts) {
    Parser parser(sql);
    Query query = parser.parse();
    Resolver resolver(db_id, catalog, opts);
    return resolver.resolve(query);
}

}  // namespace linkalign
