#include <doctest.h>

#include <random>
#include <sstream>

#include "oracle.hpp"
#include "sbir/query.hpp"

using namespace sbir;

namespace {

Ontology load_tsv(const std::string& tsv) {
    std::istringstream in(tsv);
    return Ontology::load(in);
}

Ontology two_sense_ontology() {
    return load_tsv(
        "C\tcompany\tشركة التقنية\n"
        "C\tfruit\tالفاكهة\n"
        "A\tتفاح\tcompany\nA\tتفاح\tfruit\n"
        "A\tأبل\tcompany\nA\tخضراء\tfruit\n");
}

}  // namespace

TEST_CASE("parse: OR over two terms") {
    auto ast = parse_query("تفاحة OR أبل");
    REQUIRE(ast->kind == QueryAst::Kind::Or);
    CHECK(ast->left->kind == QueryAst::Kind::Term);
    CHECK(ast->left->raw == "تفاحة");
    CHECK(ast->left->stem == "تفاح");
    CHECK(ast->right->stem == "ابل");
}

TEST_CASE("parse: AND binds tighter than OR") {
    auto ast = parse_query("a AND b OR c");
    REQUIRE(ast->kind == QueryAst::Kind::Or);
    CHECK(ast->left->kind == QueryAst::Kind::And);
    CHECK(ast->right->raw == "c");
}

TEST_CASE("parse: binary NOT, keywords case-folded") {
    auto ast = parse_query("العين Not الفراهيدي");
    REQUIRE(ast->kind == QueryAst::Kind::Not);
    CHECK(ast->left->stem == "عين");
    CHECK(ast->right->kind == QueryAst::Kind::Term);
    CHECK(parse_query("a not b")->kind == QueryAst::Kind::Not);
    CHECK(parse_query("a AnD b")->kind == QueryAst::Kind::And);
}

TEST_CASE("parse: NOT binds tighter than AND") {
    auto ast = parse_query("a NOT b AND c");
    REQUIRE(ast->kind == QueryAst::Kind::And);
    CHECK(ast->left->kind == QueryAst::Kind::Not);
}

TEST_CASE("parse: leading NOT is complement against the corpus") {
    auto ast = parse_query("NOT a");
    REQUIRE(ast->kind == QueryAst::Kind::NotAll);
    CHECK(ast->left->raw == "a");
    auto inner = parse_query("b OR NOT a");
    REQUIRE(inner->kind == QueryAst::Kind::Or);
    CHECK(inner->right->kind == QueryAst::Kind::NotAll);
}

TEST_CASE("parse: implicit conjunction of adjacent bare terms") {
    auto ast = parse_query("قناة السويس");
    REQUIRE(ast->kind == QueryAst::Kind::And);
    CHECK(ast->left->stem == "قن");
    CHECK(ast->right->stem == "سويس");
}

TEST_CASE("parse: parentheses override precedence") {
    auto ast = parse_query("a AND (b OR c)");
    REQUIRE(ast->kind == QueryAst::Kind::And);
    CHECK(ast->right->kind == QueryAst::Kind::Or);
}

TEST_CASE("parse: left associativity") {
    auto ast = parse_query("a OR b OR c");
    REQUIRE(ast->kind == QueryAst::Kind::Or);
    CHECK(ast->left->kind == QueryAst::Kind::Or);
    CHECK(ast->right->raw == "c");
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_query(""), EmptyQuery);
    CHECK_THROWS_AS(parse_query("   \t "), EmptyQuery);
    CHECK_THROWS_AS(parse_query("(a OR b"), UnbalancedParens);
    CHECK_THROWS_AS(parse_query("a OR b)"), UnbalancedParens);
    CHECK_THROWS_AS(parse_query("a AND"), DanglingOperator);
    CHECK_THROWS_AS(parse_query("OR a"), DanglingOperator);
    try {
        parse_query("a AND");
    } catch (const DanglingOperator& e) {
        CHECK(e.pos == 5);
    }
}

TEST_CASE("print/parse round-trip on random ASTs") {
    std::mt19937 rng(41);
    for (int iter = 0; iter < 500; iter++) {
        auto ast = testing::random_ast(rng, 3);
        auto printed = print_ast(*ast);
        auto reparsed = parse_query(printed);
        CHECK(ast_equal(*ast, *reparsed));
        CHECK(print_ast(*reparsed) == printed);
    }
}

TEST_CASE("positive stems exclude negative operands") {
    auto ast = parse_query("تفاح NOT قناة");
    CHECK(positive_stems(*ast) == std::vector<std::string>{"تفاح"});
    auto ast2 = parse_query("a OR NOT b");
    CHECK(positive_stems(*ast2) == std::vector<std::string>{"a"});
}

TEST_CASE("resolve_query_rc: unanchored, anchored, negative-excluded") {
    auto ont = load_tsv("C\twaterway\tممر\nA\tقناة\twaterway\nA\tالسويس\twaterway\n");
    CHECK(resolve_query_rc(*parse_query("شمس OR قمر"), ont) == kNoneRc);
    CHECK(resolve_query_rc(*parse_query("قناة AND السويس"), ont) == "waterway");
    auto two = two_sense_ontology();
    // قناة is unanchored in the two-sense ontology; تفاح drives the RC
    CHECK(resolve_query_rc(*parse_query("تفاح NOT قناة"), two) == "company");
}

TEST_CASE("query and index paths resolve the same RC for the same words") {
    auto ont = load_tsv("C\twaterway\tممر\nA\tقناة\twaterway\nA\tالسويس\twaterway\n");
    auto idx = build_index({{0, "a.txt", "قناة السويس"}}, ont, StopList{});
    CHECK(postings_for("قن", idx)[0].rc ==
          resolve_query_rc(*parse_query("قناة السويس"), ont));
}

TEST_CASE("execute: empty index") {
    auto ont = load_tsv("");
    auto idx = build_index({}, ont, StopList{});
    auto rs = execute(*parse_query("تفاحة OR أبل"), idx, ont, QueryMode::Semantic);
    CHECK(rs.entries.empty());
}

TEST_CASE("execute: semantic filtering disambiguates the OR query") {
    auto ont = two_sense_ontology();
    auto idx = build_index({{0, "a.txt", "تفاحة أبل"}, {1, "b.txt", "تفاحة خضراء"}}, ont,
                           StopList{});
    auto ast = parse_query("تفاحة OR أبل");

    auto base = execute(*ast, idx, ont, QueryMode::Baseline);
    CHECK(base.doc_ids() == std::set<int>{0, 1});

    auto sem = execute(*ast, idx, ont, QueryMode::Semantic);
    CHECK(sem.query_rc == "company");
    CHECK(sem.doc_ids() == std::set<int>{0});
    REQUIRE(sem.entries.size() == 1);
    CHECK(sem.entries[0].matched_rcs == std::set<std::string>{"company"});

    auto both = execute(*parse_query("تفاحة AND أبل"), idx, ont, QueryMode::Baseline);
    CHECK(both.doc_ids() == std::set<int>{0});
}

TEST_CASE("execute: binary NOT is lexical set difference") {
    auto ont = load_tsv("");
    auto idx = build_index({{0, "a.txt", "العين الفراهيدي"},
                            {1, "b.txt", "العين"},
                            {2, "c.txt", "كتاب"}},
                           ont, StopList{});
    auto rs = execute(*parse_query("كتاب NOT العين"), idx, ont, QueryMode::Semantic);
    CHECK(rs.doc_ids() == std::set<int>{2});
    auto rs2 = execute(*parse_query("العين NOT الفراهيدي"), idx, ont, QueryMode::Semantic);
    CHECK(rs2.doc_ids() == std::set<int>{1});
}

TEST_CASE("execute: negative operand is never semantically filtered") {
    // doc 1 contains تفاح in the fruit sense; a company-context query
    // that excludes أبل must not re-admit it through the filter
    auto ont = two_sense_ontology();
    auto idx = build_index({{0, "a.txt", "تفاحة أبل"}, {1, "b.txt", "تفاحة خضراء"}}, ont,
                           StopList{});
    auto rs = execute(*parse_query("تفاحة أبل NOT خضراء"), idx, ont, QueryMode::Semantic);
    CHECK(rs.doc_ids() == std::set<int>{0});
}

TEST_CASE("execute: NotAll complements against the doc table") {
    auto ont = load_tsv("");
    auto idx = build_index({{0, "a.txt", "قمر"}, {1, "b.txt", "شمس"}, {2, "c.txt", "نجم"}}, ont,
                           StopList{});
    auto rs = execute(*parse_query("NOT قمر"), idx, ont, QueryMode::Semantic);
    CHECK(rs.doc_ids() == std::set<int>{1, 2});
}

TEST_CASE("execute: fingerprint compatibility") {
    auto ont = two_sense_ontology();
    auto other = load_tsv("C\tx\tX\n");
    StopList stops;
    auto idx = build_index({{0, "a.txt", "تفاحة"}}, ont, stops);
    auto ast = parse_query("تفاحة");
    // same config: silent
    auto fp_same = make_fingerprint(ont, stops, AffixTables::defaults(), 2);
    CHECK(execute(*ast, idx, ont, QueryMode::Semantic, 2, 2, fp_same).warning.empty());
    // different depth: warn
    auto fp_depth = make_fingerprint(ont, stops, AffixTables::defaults(), 3);
    CHECK(!execute(*ast, idx, ont, QueryMode::Semantic, 2, 3, fp_depth).warning.empty());
    // different ontology: hard error
    auto fp_ont = make_fingerprint(other, stops, AffixTables::defaults(), 2);
    CHECK_THROWS_AS(execute(*ast, idx, other, QueryMode::Semantic, 2, 2, fp_ont),
                    IncompatibleConfig);
}

TEST_CASE("group_results_by_rc") {
    auto ont = two_sense_ontology();
    auto idx = build_index({{0, "a.txt", "تفاحة أبل"}, {1, "b.txt", "تفاحة خضراء"}}, ont,
                           StopList{});
    SUBCASE("empty result set") {
        CHECK(group_results_by_rc(ResultSet{}).groups.empty());
    }
    SUBCASE("single-word query splits by sense") {
        auto rs = execute(*parse_query("تفاحة"), idx, ont, QueryMode::Baseline);
        auto grouped = group_results_by_rc(rs);
        REQUIRE(grouped.groups.size() == 2);
        CHECK(grouped.groups.at("company") == std::vector<int>{0});
        CHECK(grouped.groups.at("fruit") == std::vector<int>{1});
    }
    SUBCASE("union of groups covers the result docs") {
        auto rs = execute(*parse_query("تفاحة OR خضراء"), idx, ont, QueryMode::Baseline);
        auto grouped = group_results_by_rc(rs);
        std::set<int> covered;
        for (const auto& [rc, docs] : grouped.groups) covered.insert(docs.begin(), docs.end());
        CHECK(covered == rs.doc_ids());
    }
}

TEST_CASE("baseline equals the brute-force oracle on random cases") {
    std::mt19937 rng(42);
    StopList stops;
    stops.words = {"في"};
    for (int iter = 0; iter < 300; iter++) {
        auto [ont, ids] = testing::random_ontology(rng);
        auto corpus = testing::random_corpus(rng, 50);
        auto idx = build_index(corpus, ont, stops);
        testing::ScannedCorpus scanned(corpus, stops);
        for (int q = 0; q < 3; q++) {
            auto ast = testing::random_ast(rng, 3);
            auto got = execute(*ast, idx, ont, QueryMode::Baseline).doc_ids();
            REQUIRE(got == testing::brute_force_eval(*ast, scanned));
        }
    }
}

TEST_CASE("semantic results are a subset of baseline results") {
    std::mt19937 rng(43);
    for (int iter = 0; iter < 200; iter++) {
        auto [ont, ids] = testing::random_ontology(rng);
        auto corpus = testing::random_corpus(rng, 30);
        auto idx = build_index(corpus, ont, StopList{});
        for (int q = 0; q < 3; q++) {
            auto ast = testing::random_ast(rng, 3);
            auto sem = execute(*ast, idx, ont, QueryMode::Semantic).doc_ids();
            auto base = execute(*ast, idx, ont, QueryMode::Baseline).doc_ids();
            REQUIRE(std::includes(base.begin(), base.end(), sem.begin(), sem.end()));
        }
    }
}

TEST_CASE("self-retrieval: an indexed phrase's own terms find its document") {
    std::mt19937 rng(44);
    for (int iter = 0; iter < 100; iter++) {
        auto [ont, ids] = testing::random_ontology(rng);
        auto corpus = testing::random_corpus(rng, 20);
        auto idx = build_index(corpus, ont, StopList{});
        std::vector<PhraseTrace> traces;
        build_index_traced(corpus, ont, StopList{}, 2, AffixTables::defaults(), traces);
        if (traces.empty()) continue;
        const auto& trace = traces[iter % traces.size()];
        AstPtr ast;
        for (const auto& s : trace.stems) {
            auto term = make_term(s);
            ast = ast ? make_node(QueryAst::Kind::And, std::move(ast), std::move(term))
                      : std::move(term);
        }
        auto rs = execute(*ast, idx, ont, QueryMode::Semantic);
        CHECK(rs.doc_ids().count(trace.doc_id) == 1);
    }
}

TEST_CASE("semantic equals baseline when nothing is anchored") {
    std::mt19937 rng(45);
    auto ont = load_tsv("C\tlonely\tno anchors\n");
    for (int iter = 0; iter < 50; iter++) {
        auto corpus = testing::random_corpus(rng, 20);
        auto idx = build_index(corpus, ont, StopList{});
        auto ast = testing::random_ast(rng, 3);
        CHECK(execute(*ast, idx, ont, QueryMode::Semantic).doc_ids() ==
              execute(*ast, idx, ont, QueryMode::Baseline).doc_ids());
    }
}
