#include "linkalign/extractor.hpp"

#include <algorithm>
#include <sstream>

#include "linkalign/prompts.hpp"

namespace linkalign {

namespace {

// Pull identifier-shaped tokens (possibly dotted) out of a fragment,
// shedding bullets, brackets, backticks and quotes.
std::vector<std::string> identifier_tokens(const std::string& fragment) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        std::string t = normalize_identifier(cur);
        while (!t.empty() && t.front() == '.') t.erase(t.begin());
        while (!t.empty() && t.back() == '.') t.pop_back();
        if (!t.empty() && t != "none" && t != "n_a") out.push_back(t);
        cur.clear();
    };
    for (char c : fragment) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            cur.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

enum class Section { none, tables, columns, relationships };

struct SectionLabel {
    const char* label;
    Section section;
};

constexpr SectionLabel kLabels[] = {
    {"relationships:", Section::relationships},
    {"relationship:", Section::relationships},
    {"tables:", Section::tables},
    {"table:", Section::tables},
    {"columns:", Section::columns},
    {"column:", Section::columns},
    {"fields:", Section::columns},
};

void add_identifier(ExtractionProposal& p, Section section, const std::string& token) {
    bool dotted = token.find('.') != std::string::npos;
    if (section == Section::columns || (section == Section::tables && dotted)) {
        if (dotted) {
            if (std::find(p.columns.begin(), p.columns.end(), token) == p.columns.end()) {
                p.columns.push_back(token);
            }
            std::string table = token.substr(0, token.find('.'));
            if (std::find(p.tables.begin(), p.tables.end(), table) == p.tables.end()) {
                p.tables.push_back(table);
            }
        } else if (std::find(p.columns.begin(), p.columns.end(), token) == p.columns.end()) {
            p.columns.push_back(token);  // unqualified; owner resolved later
        }
    } else if (section == Section::tables) {
        if (std::find(p.tables.begin(), p.tables.end(), token) == p.tables.end()) {
            p.tables.push_back(token);
        }
    }
}

void parse_segment(ExtractionProposal& proposal, Section section,
                   const std::string& content) {
    if (section == Section::none) return;
    if (section == Section::relationships) {
        // Consecutive dotted tokens pair up: "a.b = c.d" and "(a.b, c.d)"
        // both yield the pair (a.b, c.d).
        std::vector<std::string> dotted;
        for (const auto& token : identifier_tokens(content)) {
            if (token.find('.') != std::string::npos) dotted.push_back(token);
        }
        for (std::size_t i = 0; i + 1 < dotted.size(); i += 2) {
            proposal.relationships.emplace_back(dotted[i], dotted[i + 1]);
        }
    } else {
        for (const auto& token : identifier_tokens(content)) {
            add_identifier(proposal, section, token);
        }
    }
}

}  // namespace

ExtractionProposal parse_proposal(const std::string& text) {
    ExtractionProposal proposal;
    Section section = Section::none;

    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string lower = to_lower(line);

        // A line may carry several labeled segments ("tables: a; columns: a.x").
        std::vector<std::pair<std::size_t, const SectionLabel*>> marks;
        for (const auto& entry : kLabels) {
            std::size_t from = 0;
            while (true) {
                auto pos = lower.find(entry.label, from);
                if (pos == std::string::npos) break;
                bool shadowed = false;  // "table:" inside an already-found "tables:" etc.
                for (const auto& [mpos, mentry] : marks) {
                    if (pos >= mpos && pos < mpos + std::string(mentry->label).size()) {
                        shadowed = true;
                    }
                }
                if (!shadowed) marks.emplace_back(pos, &entry);
                from = pos + 1;
            }
        }
        std::sort(marks.begin(), marks.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::vector<std::pair<Section, std::string>> segments;
        if (marks.empty()) {
            segments.emplace_back(section, line);
        } else {
            if (marks.front().first > 0) {
                segments.emplace_back(section, line.substr(0, marks.front().first));
            }
            for (std::size_t i = 0; i < marks.size(); ++i) {
                std::size_t start = marks[i].first + std::string(marks[i].second->label).size();
                std::size_t end = i + 1 < marks.size() ? marks[i + 1].first : line.size();
                segments.emplace_back(marks[i].second->section,
                                      line.substr(start, end - start));
            }
            section = marks.back().second->section;
        }

        for (const auto& [seg_section, content] : segments) {
            parse_segment(proposal, seg_section, content);
        }
    }

    if (proposal.tables.empty() && proposal.columns.empty() &&
        proposal.relationships.empty()) {
        proposal.parse_warning = true;
    }
    return proposal;
}

std::string render_proposal(const ExtractionProposal& proposal) {
    auto join = [](const std::vector<std::string>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ", ";
            s += items[i];
        }
        return s;
    };
    std::ostringstream out;
    out << "tables: " << join(proposal.tables) << "\n";
    out << "columns: " << join(proposal.columns) << "\n";
    out << "relationships: ";
    for (std::size_t i = 0; i < proposal.relationships.size(); ++i) {
        if (i) out << ", ";
        out << proposal.relationships[i].first << " = " << proposal.relationships[i].second;
    }
    out << "\n";
    return out.str();
}

LinkedSchema resolve_proposal(const ExtractionProposal& proposal,
                              const DatabaseCatalog& catalog, const std::string& db_id) {
    LinkedSchema result;
    result.db_id = normalize_identifier(db_id);
    if (proposal.parse_warning) {
        result.warnings.push_back("proposal contained no recognizable identifiers");
    }

    auto add_column = [&](const std::string& table, const std::string& column,
                          const std::string& origin) {
        SchemaItem item = SchemaItem::column(result.db_id, table, column);
        if (!catalog.resolves(item)) {
            result.warnings.push_back("dropped unknown " + origin + ": " + item.qualified());
            return;
        }
        result.items.insert(item);
        result.items.insert(SchemaItem::table(result.db_id, table));  // closure rule
    };

    auto add_dotted = [&](const std::string& token, const std::string& origin) {
        auto dot = token.find('.');
        std::string table = token.substr(0, dot);
        std::string column = token.substr(dot + 1);
        // Tolerate a redundant db prefix: "db.table.column".
        if (auto dot2 = column.find('.'); dot2 != std::string::npos &&
                                          table == result.db_id) {
            table = column.substr(0, dot2);
            column = column.substr(dot2 + 1);
        }
        add_column(table, column, origin);
    };

    for (const auto& table : proposal.tables) {
        SchemaItem item = SchemaItem::table(result.db_id, table);
        if (catalog.resolves(item)) {
            result.items.insert(item);
        } else {
            result.warnings.push_back("dropped unknown table: " + item.qualified());
        }
    }

    for (const auto& column : proposal.columns) {
        if (column.find('.') != std::string::npos) {
            add_dotted(column, "column");
            continue;
        }
        // Unqualified column: bind to the unique owning table in this db.
        std::vector<std::string> owners;
        for (const auto& table : catalog.tables(result.db_id)) {
            if (table.find_column(column)) owners.push_back(table.table_name);
        }
        if (owners.size() == 1) {
            add_column(owners.front(), column, "column");
        } else {
            result.warnings.push_back("dropped unresolvable column: " + column +
                                      (owners.empty() ? " (no owner)" : " (ambiguous)"));
        }
    }

    for (const auto& [left, right] : proposal.relationships) {
        add_dotted(left, "relationship endpoint");
        add_dotted(right, "relationship endpoint");
    }

    return result;
}

LinkedSchema extract_pipeline(const std::string& question, const std::string& db_schema_prompt,
                              const DatabaseCatalog& catalog, const std::string& db_id,
                              ChatBackend& backend) {
    ChatRequest req;
    req.tag = "extract/pipeline";
    req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kExtractPipeline),
                                     {{"question", question}, {"schema", db_schema_prompt}})});
    LinkedSchema result = resolve_proposal(parse_proposal(backend.complete(req)),
                                           catalog, db_id);
    if (result.items.empty()) throw ValidationError("empty extraction for db " + db_id);
    return result;
}

namespace {

// Scientist review: an explicit add/remove diff. Free-form commentary
// without the labels leaves the union unchanged.
struct ReviewDiff {
    std::vector<std::string> add;
    std::vector<std::string> remove;
};

ReviewDiff parse_review(const std::string& text) {
    ReviewDiff diff;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string lower = to_lower(line);
        if (auto pos = lower.find("add:"); pos != std::string::npos) {
            for (const auto& token : identifier_tokens(line.substr(pos + 4))) {
                diff.add.push_back(token);
            }
        } else if (auto rpos = lower.find("remove:"); rpos != std::string::npos) {
            for (const auto& token : identifier_tokens(line.substr(rpos + 7))) {
                diff.remove.push_back(token);
            }
        }
    }
    return diff;
}

std::string render_items(const std::set<SchemaItem>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += ", ";
        out += item.column_name ? item.table_name + "." + *item.column_name : item.table_name;
    }
    return out.empty() ? "(nothing)" : out;
}

}  // namespace

LinkedSchema extract_debate(const std::string& question, const std::string& db_schema_prompt,
                            const DatabaseCatalog& catalog, const std::string& db_id,
                            const DebateOptions& opts, ChatBackend& backend) {
    if (opts.n_parsers < 2) throw ValidationError("extract_debate: n_parsers must be >= 2");
    if (opts.rounds_limit < 1) throw ValidationError("extract_debate: rounds_limit must be >= 1");

    LinkedSchema result;
    result.db_id = normalize_identifier(db_id);

    for (int round = 1; round <= opts.rounds_limit; ++round) {
        std::string prior =
            round == 1 ? ""
                       : "\nCurrent reviewed extraction: " + render_items(result.items) + "\n";
        std::string parser_prompt =
            prompts::render(prompts::get(prompts::kExtractParser),
                            {{"question", question},
                             {"schema", db_schema_prompt},
                             {"prior", prior}});

        for (int i = 1; i <= opts.n_parsers; ++i) {
            ChatRequest req;
            req.tag = "parser" + std::to_string(i) + "/round" + std::to_string(round);
            req.messages.push_back({Role::user, parser_prompt});
            LinkedSchema partial =
                resolve_proposal(parse_proposal(backend.complete(req)), catalog, db_id);
            result.items.insert(partial.items.begin(), partial.items.end());
            result.warnings.insert(result.warnings.end(), partial.warnings.begin(),
                                   partial.warnings.end());
        }

        ChatRequest review_req;
        review_req.tag = "scientist/round" + std::to_string(round);
        review_req.messages.push_back(
            {Role::user, prompts::render(prompts::get(prompts::kExtractScientist),
                                         {{"question", question},
                                          {"schema", db_schema_prompt},
                                          {"union", render_items(result.items)}})});
        ReviewDiff diff = parse_review(backend.complete(review_req));

        ExtractionProposal additions;
        for (const auto& token : diff.add) {
            add_identifier(additions,
                           token.find('.') != std::string::npos ? Section::columns
                                                                : Section::tables,
                           token);
        }
        LinkedSchema added = resolve_proposal(additions, catalog, db_id);
        result.items.insert(added.items.begin(), added.items.end());
        result.warnings.insert(result.warnings.end(), added.warnings.begin(),
                               added.warnings.end());

        for (const auto& token : diff.remove) {
            auto dot = token.find('.');
            if (dot == std::string::npos) {
                // Removing a table removes its columns too.
                std::erase_if(result.items, [&](const SchemaItem& item) {
                    return item.table_name == token;
                });
            } else {
                result.items.erase(SchemaItem::column(result.db_id, token.substr(0, dot),
                                                      token.substr(dot + 1)));
            }
        }
    }

    if (result.items.empty()) throw ValidationError("empty extraction for db " + db_id);
    return result;
}

}  // namespace linkalign
