#include "linkalign/prompts.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace linkalign::prompts {

namespace {

std::string g_override_dir;  // NOLINT
std::mutex g_mutex;          // NOLINT

const std::map<std::string, std::string>& builtin_templates() {
    static const std::map<std::string, std::string> templates = {
        {kAuditorAgent, R"(You are a schema auditor for a natural-language-to-SQL system.
First map the user question into structured triplets: entities, attributes, and constraints.
Then scrutinize the retrieved schema context below and infer database schemas (tables or
fields needed for SELECT, JOIN or WHERE clauses) that the question requires but the
context is missing. Assign each hypothesis a confidence level.

Retrieved schema context:
{context}

User question: {question}

Answer strictly in this format:
entities: <comma-separated>
attributes: <comma-separated>
constraints: <comma-separated>
missing_schemas:
- <table> (<column>) [high|medium|low]
no_gap: <true if the context already covers everything the question needs, else false>
)"},
        {kAuditorPipeline, R"(You analyze a user question against retrieved database schema
context in four reasoning steps.
Step 1 - Requirement Understanding: rephrase the question to state its objective and data needs.
Step 2 - Key Entity Identification: extract the key entities or values in the question.
Step 3 - Entity Classification: classify the entities into broader categories and relations.
Step 4 - Database Schema Inference: infer tables and columns likely required but absent
from the context below.

Retrieved schema context:
{context}

User question: {question}

After your reasoning, finish with exactly this block:
entities: <comma-separated>
attributes: <comma-separated>
constraints: <comma-separated>
missing_schemas:
- <table> (<column>) [high|medium|low]
no_gap: <true|false>
)"},
        {kRewriter, R"(You are a query rewriter. Using the audit report below, rewrite the
user question so that it aligns semantically with the hypothesized database schemas:
clarify ambiguous expressions, supplement the missing schema names, and phrase the result
as a retrieval-friendly statement. Output only the rewritten question, nothing else.

Audit report:
{report}

Question to rewrite: {question}
)"},
        {kDbSelectPipeline, R"(You select the database a question should be answered from.
First restate the data requirements of the question. Then check each candidate database
for the needed tables and columns. Finally output the most relevant database name on the
last line in the form "database: <db_id>".

Question: {question}

Candidate databases:
{candidates}
)"},
        {kDebateAnalyst, R"(You are a data analyst. Rank the candidate databases below by how
well their schemas match the question, considering domain relevance and schema coverage
completeness. Explain your ranking briefly, then output your top choice on the last line
in the form "nominate: <db_id>".

Question: {question}

Candidate databases:
{candidates}
)"},
        {kDebateExpert, R"(You are a database expert responsible for the database "{db_id}".
Rigorously evaluate whether the schema below can satisfy the question. If every table and
column the question needs is present, retain the nomination; otherwise reject it. Justify
briefly, then output the last line in the form "verdict: retain" or "verdict: reject".

Question: {question}

Schema of {db_id}:
{schema}
)"},
        {kExtractPipeline, R"(You link a question to the tables and columns of one database.
Think step by step about which tables, columns and join relationships the SQL query for
this question will need. Here are two worked examples:

Q: How many singers do we have?
Schema: table singer(singer_id, name, age)
tables: singer
columns:
relationships:

Q: What are the first names of students that have both cats and dogs?
Schema: table student(stuid, f_name), table has_pet(stuid, pet_id), table pets(pet_id, pet_type)
tables: student, has_pet, pets
columns: student.f_name, student.stuid, has_pet.stuid, has_pet.pet_id, pets.pet_id, pets.pet_type
relationships: student.stuid = has_pet.stuid, has_pet.pet_id = pets.pet_id

Now the real task. Answer with exactly the three labeled lines.

Question: {question}

Schema:
{schema}

tables: <comma-separated table names>
columns: <comma-separated table.column names>
relationships: <comma-separated a.b = c.d join pairs>
)"},
        {kExtractParser, R"(You are a schema parser. From the database schema below, extract
every element the question may need, across three dimensions: tables, fields, and join
relationships. Review your own list once to prevent omissions. Answer with exactly the
three labeled lines.

Question: {question}

Schema:
{schema}
{prior}
tables: <comma-separated table names>
columns: <comma-separated table.column names>
relationships: <comma-separated a.b = c.d join pairs>
)"},
        {kExtractScientist, R"(You are a data scientist reviewing the aggregated schema
extraction below for the question. Identify omissions (e.g. missing join columns) and
errors (e.g. hallucinated tables). Answer with an explicit diff, using exactly these
labels (leave a label empty if nothing applies):
add: <comma-separated table or table.column items to add>
remove: <comma-separated items to remove>

Question: {question}

Schema:
{schema}

Aggregated extraction:
{union}
)"},
        {kBenchSubset, R"(Extract a representative subset of the database schema below: the
tables and columns that capture the key characteristics of its domain and could be shared
by synonym databases. Answer with the two labeled lines.

Schema:
{schema}

tables: <comma-separated table names>
columns: <comma-separated table.column names>
)"},
        {kBenchExpand, R"(Expand the database below by adding new tables and new columns that
fit its theme. Never rename or remove anything that already exists, and never reuse an
existing table or column name. Answer with one line per addition, using exactly these
forms:
table: <new_table> | columns: <col_a> (<type>), <col_b> (<type>)
column: <existing_table>.<new_column> (<type>)

Schema:
{schema}
)"},
        {kBenchModify, R"(Rewrite the question below to be more ambiguous in a multi-database
setting that also contains these synonym databases: {synonyms}. Keep the question
answerable by the same SQL query. Avoid copying verbatim any table or column name that is
unique to a single database, but subtly keep details that allow inferring the target
database. Output only the rewritten question.

Original question: {question}
)"},
        {kBenchVerify, R"(Check whether the data requirements described in the question align
with the given SQL query. Answer on the last line with "verdict: aligned" or
"verdict: mismatch".

Question: {question}

SQL: {sql}
)"},
        {kBenchCorrect, R"(The question below does not align with its SQL query. Fine-tune the
question so that it matches what the SQL computes, keeping it ambiguous in a
multi-database setting. Output only the corrected question.

Question: {question}

SQL: {sql}
)"},
    };
    return templates;
}

}  // namespace

void set_override_dir(const std::string& dir) {
    std::lock_guard lock(g_mutex);
    g_override_dir = dir;
}

std::string get(const std::string& name) {
    {
        std::lock_guard lock(g_mutex);
        if (!g_override_dir.empty()) {
            std::ifstream in(g_override_dir + "/" + name + ".txt");
            if (in) {
                std::ostringstream buf;
                buf << in.rdbuf();
                return buf.str();
            }
        }
    }
    auto it = builtin_templates().find(name);
    if (it == builtin_templates().end()) {
        throw std::invalid_argument("unknown prompt template: " + name);
    }
    return it->second;
}

std::string render(const std::string& template_text,
                   std::initializer_list<std::pair<std::string, std::string>> vars) {
    std::string out = template_text;
    for (const auto& [key, value] : vars) {
        std::string needle = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

}  // namespace linkalign::prompts
