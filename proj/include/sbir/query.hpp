#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbir/index.hpp"
#include "sbir/ontology.hpp"

namespace sbir {

struct QueryError : std::runtime_error {
    size_t pos;  // byte offset into the query string
    QueryError(const std::string& what, size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), pos(position) {}
};
struct EmptyQuery : QueryError {
    EmptyQuery() : QueryError("empty query", 0) {}
};
struct UnbalancedParens : QueryError {
    explicit UnbalancedParens(size_t position) : QueryError("unbalanced parentheses", position) {}
};
struct DanglingOperator : QueryError {
    explicit DanglingOperator(size_t position) : QueryError("dangling operator", position) {}
};

// Boolean expression tree. Not is binary difference (A NOT B); NotAll is
// the unary complement against the corpus (leading NOT).
struct QueryAst {
    enum class Kind { Term, And, Or, Not, NotAll };
    Kind kind;
    std::string raw;   // Term only: surface token as typed
    std::string stem;  // Term only: normalized + stemmed
    std::unique_ptr<QueryAst> left;
    std::unique_ptr<QueryAst> right;  // unused for Term / NotAll
};

using AstPtr = std::unique_ptr<QueryAst>;

AstPtr make_term(const std::string& raw);
AstPtr make_node(QueryAst::Kind kind, AstPtr left, AstPtr right = nullptr);
bool ast_equal(const QueryAst& a, const QueryAst& b);

// Grammar: NOT > AND > OR, left-associative, parentheses; keywords
// case-folded; adjacent bare terms form an implicit conjunction.
AstPtr parse_query(const std::string& input);

// Fully parenthesized form; parse(print(ast)) == ast.
std::string print_ast(const QueryAst& ast);

// Stems of every positive term (terms under a NotAll or in the right
// operand of a Not are excluded).
std::vector<std::string> positive_stems(const QueryAst& ast);

// Query RC per Algorithm 2: one concept for the whole query, resolved
// from the positive terms with the same function the indexer uses.
std::string resolve_query_rc(const QueryAst& ast, const Ontology& ont, int depth = 2);

enum class QueryMode { Semantic, Baseline };

inline const char* mode_name(QueryMode m) {
    return m == QueryMode::Semantic ? "semantic" : "baseline";
}

struct ResultSet {
    struct Entry {
        int doc_id;
        std::set<std::string> matched_rcs;
    };
    std::vector<Entry> entries;  // ascending doc_id
    QueryMode mode = QueryMode::Baseline;
    std::string query_rc = kNoneRc;
    std::string warning;  // non-fatal config fingerprint drift

    std::set<int> doc_ids() const {
        std::set<int> ids;
        for (const auto& e : entries) ids.insert(e.doc_id);
        return ids;
    }
};

// Structural evaluation over the index. Semantic mode keeps only
// postings whose RC is related to the query RC; negative operands are
// evaluated without filtering. `current_fingerprint`, when non-empty, is
// checked against the index fingerprint (ontology drift is fatal).
ResultSet execute(const QueryAst& ast, const SemanticIndex& idx, const Ontology& ont,
                  QueryMode mode, int max_hops = 2, int depth = 2,
                  const std::string& current_fingerprint = "");

struct RcGroupedResults {
    // rc -> ascending doc ids; docs matched only lexically group under
    // the NONE sentinel. Map order is lexicographic (NONE first).
    std::map<std::string, std::vector<int>, decltype(&rc_less)> groups{&rc_less};
};

RcGroupedResults group_results_by_rc(const ResultSet& rs);

}  // namespace sbir
