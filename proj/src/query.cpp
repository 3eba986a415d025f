#include "sbir/query.hpp"

#include <algorithm>
#include <cctype>

#include "sbir/text_pipeline.hpp"

namespace sbir {

namespace {

struct Token {
    enum class Kind { Word, And, Or, Not, LParen, RParen, End };
    Kind kind;
    std::string text;
    size_t pos;
};

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<Token> lex(const std::string& input) {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < input.size()) {
        char c = input[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            i++;
            continue;
        }
        if (c == '(') {
            tokens.push_back({Token::Kind::LParen, "(", i++});
            continue;
        }
        if (c == ')') {
            tokens.push_back({Token::Kind::RParen, ")", i++});
            continue;
        }
        size_t start = i;
        while (i < input.size() && input[i] != ' ' && input[i] != '\t' && input[i] != '\r' &&
               input[i] != '\n' && input[i] != '(' && input[i] != ')')
            i++;
        std::string word = input.substr(start, i - start);
        std::string folded = ascii_lower(word);
        if (folded == "and")
            tokens.push_back({Token::Kind::And, word, start});
        else if (folded == "or")
            tokens.push_back({Token::Kind::Or, word, start});
        else if (folded == "not")
            tokens.push_back({Token::Kind::Not, word, start});
        else
            tokens.push_back({Token::Kind::Word, word, start});
    }
    tokens.push_back({Token::Kind::End, "", input.size()});
    return tokens;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    AstPtr parse() {
        AstPtr ast = parse_or();
        if (peek().kind == Token::Kind::RParen) throw UnbalancedParens(peek().pos);
        if (peek().kind != Token::Kind::End) throw DanglingOperator(peek().pos);
        return ast;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    AstPtr parse_or() {
        AstPtr left = parse_and();
        while (peek().kind == Token::Kind::Or) {
            take();
            left = make_node(QueryAst::Kind::Or, std::move(left), parse_and());
        }
        return left;
    }

    AstPtr parse_and() {
        AstPtr left = parse_not();
        while (true) {
            auto k = peek().kind;
            if (k == Token::Kind::And) {
                take();
                left = make_node(QueryAst::Kind::And, std::move(left), parse_not());
            } else if (k == Token::Kind::Word || k == Token::Kind::LParen) {
                // adjacent operands: implicit conjunction
                left = make_node(QueryAst::Kind::And, std::move(left), parse_not());
            } else {
                return left;
            }
        }
    }

    AstPtr parse_not() {
        AstPtr left = parse_primary();
        while (peek().kind == Token::Kind::Not) {
            take();
            left = make_node(QueryAst::Kind::Not, std::move(left), parse_primary());
        }
        return left;
    }

    AstPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Word: {
                take();
                return terms_from_word(t);
            }
            case Token::Kind::Not: {
                take();
                return make_node(QueryAst::Kind::NotAll, parse_primary());
            }
            case Token::Kind::LParen: {
                size_t open = t.pos;
                take();
                AstPtr inner = parse_or();
                if (peek().kind != Token::Kind::RParen) throw UnbalancedParens(open);
                take();
                return inner;
            }
            case Token::Kind::RParen:
                throw UnbalancedParens(t.pos);
            default:
                throw DanglingOperator(t.pos);
        }
    }

    // A raw token may carry embedded punctuation; each normalized piece
    // becomes a term, pieces joined by implicit AND.
    AstPtr terms_from_word(const Token& t) {
        auto pieces = tokenize(normalize(t.text));
        if (pieces.empty()) throw DanglingOperator(t.pos);
        AstPtr node;
        if (pieces.size() == 1) {
            node = make_term(t.text);  // keep the surface form as typed
        } else {
            for (auto& piece : pieces) {
                AstPtr term = make_term(piece);
                node = node ? make_node(QueryAst::Kind::And, std::move(node), std::move(term))
                            : std::move(term);
            }
        }
        return node;
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

bool all_space(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

using DocRcs = std::map<int, std::set<std::string>>;

DocRcs intersect(DocRcs a, const DocRcs& b) {
    for (auto it = a.begin(); it != a.end();) {
        auto jt = b.find(it->first);
        if (jt == b.end()) {
            it = a.erase(it);
        } else {
            it->second.insert(jt->second.begin(), jt->second.end());
            ++it;
        }
    }
    return a;
}

DocRcs unite(DocRcs a, const DocRcs& b) {
    for (const auto& [doc, rcs] : b) a[doc].insert(rcs.begin(), rcs.end());
    return a;
}

struct Evaluator {
    const SemanticIndex& idx;
    const Ontology& ont;
    const std::string& query_rc;
    int max_hops;
    std::map<std::string, bool> related_memo;

    bool rc_matches(const std::string& posting_rc) {
        auto it = related_memo.find(posting_rc);
        if (it != related_memo.end()) return it->second;
        bool r = related(posting_rc, query_rc, ont, max_hops);
        related_memo.emplace(posting_rc, r);
        return r;
    }

    DocRcs eval(const QueryAst& node, bool filter) {
        switch (node.kind) {
            case QueryAst::Kind::Term: {
                DocRcs out;
                for (const auto& p : postings_for(node.stem, idx))
                    if (!filter || rc_matches(p.rc)) out[p.doc_id].insert(p.rc);
                return out;
            }
            case QueryAst::Kind::And:
                return intersect(eval(*node.left, filter), eval(*node.right, filter));
            case QueryAst::Kind::Or:
                return unite(eval(*node.left, filter), eval(*node.right, filter));
            case QueryAst::Kind::Not: {
                // Lexical exclusion: the negative side is never filtered.
                DocRcs a = eval(*node.left, filter);
                for (const auto& [doc, rcs] : eval(*node.right, false)) a.erase(doc);
                return a;
            }
            case QueryAst::Kind::NotAll: {
                DocRcs inner = eval(*node.left, false);
                DocRcs out;
                for (const auto& [doc_id, name] : idx.doc_table)
                    if (!inner.count(doc_id)) out[doc_id];
                return out;
            }
        }
        return {};
    }
};

}  // namespace

AstPtr make_term(const std::string& raw) {
    auto node = std::make_unique<QueryAst>();
    node->kind = QueryAst::Kind::Term;
    node->raw = raw;
    auto pieces = tokenize(normalize(raw));
    node->stem = pieces.empty() ? std::string{} : stem(pieces.front());
    return node;
}

AstPtr make_node(QueryAst::Kind kind, AstPtr left, AstPtr right) {
    auto node = std::make_unique<QueryAst>();
    node->kind = kind;
    node->left = std::move(left);
    node->right = std::move(right);
    return node;
}

bool ast_equal(const QueryAst& a, const QueryAst& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == QueryAst::Kind::Term) return a.raw == b.raw && a.stem == b.stem;
    if (!ast_equal(*a.left, *b.left)) return false;
    if (a.kind == QueryAst::Kind::NotAll) return true;
    return ast_equal(*a.right, *b.right);
}

AstPtr parse_query(const std::string& input) {
    if (all_space(input)) throw EmptyQuery();
    return Parser(lex(input)).parse();
}

std::string print_ast(const QueryAst& ast) {
    switch (ast.kind) {
        case QueryAst::Kind::Term:
            return ast.raw;
        case QueryAst::Kind::And:
            return "(" + print_ast(*ast.left) + " AND " + print_ast(*ast.right) + ")";
        case QueryAst::Kind::Or:
            return "(" + print_ast(*ast.left) + " OR " + print_ast(*ast.right) + ")";
        case QueryAst::Kind::Not:
            return "(" + print_ast(*ast.left) + " NOT " + print_ast(*ast.right) + ")";
        case QueryAst::Kind::NotAll:
            return "(NOT " + print_ast(*ast.left) + ")";
    }
    return "";
}

namespace {
void collect_positive(const QueryAst& node, std::vector<std::string>& out) {
    switch (node.kind) {
        case QueryAst::Kind::Term:
            out.push_back(node.stem);
            break;
        case QueryAst::Kind::And:
        case QueryAst::Kind::Or:
            collect_positive(*node.left, out);
            collect_positive(*node.right, out);
            break;
        case QueryAst::Kind::Not:
            collect_positive(*node.left, out);  // right operand is negative
            break;
        case QueryAst::Kind::NotAll:
            break;
    }
}
}  // namespace

std::vector<std::string> positive_stems(const QueryAst& ast) {
    std::vector<std::string> stems;
    collect_positive(ast, stems);
    return stems;
}

std::string resolve_query_rc(const QueryAst& ast, const Ontology& ont, int depth) {
    return resolve_reference_concept(positive_stems(ast), ont, depth).rc;
}

ResultSet execute(const QueryAst& ast, const SemanticIndex& idx, const Ontology& ont,
                  QueryMode mode, int max_hops, int depth,
                  const std::string& current_fingerprint) {
    ResultSet rs;
    rs.mode = mode;
    if (!current_fingerprint.empty()) {
        switch (check_config(idx.config_fingerprint, current_fingerprint)) {
            case ConfigCompat::Incompatible:
                throw IncompatibleConfig("index was built with a different ontology (index " +
                                         idx.config_fingerprint + ", current " +
                                         current_fingerprint + ")");
            case ConfigCompat::Warn:
                rs.warning = "index config fingerprint differs from current config (index " +
                             idx.config_fingerprint + ", current " + current_fingerprint + ")";
                break;
            case ConfigCompat::Ok:
                break;
        }
    }
    rs.query_rc = resolve_query_rc(ast, ont, depth);
    Evaluator ev{idx, ont, rs.query_rc, max_hops, {}};
    for (auto& [doc_id, rcs] : ev.eval(ast, mode == QueryMode::Semantic))
        rs.entries.push_back({doc_id, std::move(rcs)});
    return rs;
}

RcGroupedResults group_results_by_rc(const ResultSet& rs) {
    RcGroupedResults grouped;
    for (const auto& e : rs.entries) {
        if (e.matched_rcs.empty()) {
            grouped.groups[kNoneRc].push_back(e.doc_id);
        } else {
            for (const auto& rc : e.matched_rcs) grouped.groups[rc].push_back(e.doc_id);
        }
    }
    return grouped;
}

}  // namespace sbir
