// Acceptance suite: one pass/fail line per criterion, non-zero exit on
// any failure. Tolerances and budgets are fixed here, not configurable.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "sbir/eval.hpp"
#include "sbir/index.hpp"
#include "sbir/query.hpp"
#include "sbir/utf8.hpp"

using namespace sbir;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name,
                detail.c_str());
    if (!ok) failures++;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct MaterializedSet {
    std::vector<RawDocument> docs;
    Ontology ont;
    QuerySet queries;
    Qrels qrels;
    StopList stops;
    SemanticIndex idx;
};

MaterializedSet materialize(const GeneratedSet& gen) {
    MaterializedSet set;
    set.docs = gen.docs;
    std::istringstream ont_in(gen.ontology_tsv);
    set.ont = Ontology::load(ont_in);
    set.queries = gen.queries;
    set.qrels = gen.qrels;
    for (const auto& w : gen.stopwords) set.stops.words.insert(normalize(w));
    set.idx = build_index(set.docs, set.ont, set.stops);
    return set;
}

// Criteria 1 + 2 share one sweep: >= 1000 random (corpus, ontology,
// query) cases, baseline vs. the linear-scan oracle and semantic-subset.
void criteria_1_2() {
    auto t0 = Clock::now();
    std::mt19937 rng(1001);
    StopList stops;
    stops.words = {"في"};
    int cases = 0, mismatches = 0, subset_violations = 0;
    for (int iter = 0; iter < 250; iter++) {
        auto [ont, ids] = testing::random_ontology(rng);
        auto corpus = testing::random_corpus(rng, 50);
        auto idx = build_index(corpus, ont, stops);
        testing::ScannedCorpus scanned(corpus, stops);
        for (int q = 0; q < 4; q++) {
            auto ast = testing::random_ast(rng, 3);
            auto base = execute(*ast, idx, ont, QueryMode::Baseline).doc_ids();
            auto sem = execute(*ast, idx, ont, QueryMode::Semantic).doc_ids();
            if (base != testing::brute_force_eval(*ast, scanned)) mismatches++;
            if (!std::includes(base.begin(), base.end(), sem.begin(), sem.end()))
                subset_violations++;
            cases++;
        }
    }
    double secs = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d cases, %d mismatches, %.1fs", cases, mismatches, secs);
    report(1, "baseline equals brute-force oracle", cases >= 1000 && mismatches == 0 && secs < 60,
           buf);
    std::snprintf(buf, sizeof buf, "%d cases, %d violations", cases, subset_violations);
    report(2, "semantic subset of baseline", subset_violations == 0, buf);
}

// Criteria 3 + 4 share the generated ambiguity sets.
void criteria_3_4() {
    auto t0 = Clock::now();
    int sets = 0, bad_semantic = 0, bad_baseline = 0, recall_mismatches = 0;
    for (int n_senses : {2, 3}) {
        for (int docs_per_sense : {1, 3}) {
            for (unsigned seed = 1; seed <= 10; seed++) {
                auto set = materialize(
                    generate_ambiguity_corpus(n_senses, docs_per_sense, seed * 7919));
                auto rep = run_eval(set.queries, set.qrels, set.idx, set.ont,
                                    {QueryMode::Semantic, QueryMode::Baseline}, 1);
                double sem_p = rep.averages[0].precision;
                double base_p = rep.averages[1].precision;
                if (sem_p != 1.0) bad_semantic++;
                if (!(base_p < 1.0)) bad_baseline++;
                for (size_t i = 0; i < set.queries.entries.size(); i++) {
                    double sr = 0, br = 0;
                    for (const auto& row : rep.rows) {
                        if (row.query_id != set.queries.entries[i].first) continue;
                        (row.mode == QueryMode::Semantic ? sr : br) = row.recall;
                    }
                    if (sr != br) recall_mismatches++;
                }
                sets++;
            }
        }
    }
    double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d sets, %d with semantic avg != 1.0, %d with baseline avg >= 1.0, %.1fs",
                  sets, bad_semantic, bad_baseline, secs);
    report(3, "ambiguity sets: semantic avg precision 1.0, baseline below",
           bad_semantic == 0 && bad_baseline == 0 && secs < 10, buf);
    std::snprintf(buf, sizeof buf, "%d sets, %d per-query recall mismatches", sets,
                  recall_mismatches);
    report(4, "semantic recall equals baseline recall", recall_mismatches == 0, buf);
}

void criterion_5() {
    std::mt19937 rng(1005);
    StopList stops;
    int audited = 0, violations = 0;
    auto audit = [&](const std::vector<RawDocument>& corpus, const Ontology& ont,
                     const StopList& stop_list) {
        std::vector<PhraseTrace> traces;
        build_index_traced(corpus, ont, stop_list, 2, AffixTables::defaults(), traces);
        std::map<std::pair<int, int>, std::set<std::string>> rcs_per_phrase;
        for (const auto& t : traces) rcs_per_phrase[{t.doc_id, t.phrase_index}].insert(t.rc);
        for (const auto& [key, rcs] : rcs_per_phrase) {
            audited++;
            if (rcs.size() != 1) violations++;
        }
    };
    for (int iter = 0; iter < 100; iter++) {
        auto [ont, ids] = testing::random_ontology(rng);
        audit(testing::random_corpus(rng, 30), ont, stops);
    }
    for (unsigned seed = 1; seed <= 10; seed++) {
        auto set = materialize(generate_ambiguity_corpus(3, 3, seed));
        audit(set.docs, set.ont, set.stops);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d phrases audited, %d violations", audited, violations);
    report(5, "one RC per phrase", audited > 0 && violations == 0, buf);
}

void criterion_6() {
    std::mt19937 rng(1006);
    StopList stops;
    stops.words = {"من"};
    int round_trips = 0, failures_here = 0;
    for (int iter = 0; iter < 100; iter++) {
        auto [ont, ids] = testing::random_ontology(rng);
        auto corpus = testing::random_corpus(rng, 25);
        auto idx1 = build_index(corpus, ont, stops);
        auto idx2 = build_index(corpus, ont, stops);
        if (serialize_index(idx1) != serialize_index(idx2)) failures_here++;
        if (parse_index(serialize_index(idx1)) != idx1) failures_here++;
        round_trips++;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d indexes, %d failures", round_trips, failures_here);
    report(6, "byte-identical rebuilds and round-trip identity", failures_here == 0, buf);
}

void criterion_7() {
    std::mt19937 rng(1007);
    static const std::vector<std::string> letters = {"ا", "ب", "ت", "ث", "ج", "ح", "خ", "د",
                                                     "ذ", "ر", "ز", "س", "ش", "ص", "ض", "ط",
                                                     "ظ", "ع", "غ", "ف", "ق", "ك", "ل", "م",
                                                     "ن", "ه", "و", "ي"};
    std::uniform_int_distribution<int> len(1, 9);
    std::uniform_int_distribution<size_t> pick(0, letters.size() - 1);
    std::uniform_int_distribution<char32_t> noise(0x0600, 0x06FF);
    std::uniform_int_distribution<int> with_noise(0, 4);
    int token_failures = 0;
    for (int i = 0; i < 10000; i++) {
        std::string tok;
        int n = len(rng);
        for (int k = 0; k < n; k++) tok += letters[pick(rng)];
        if (with_noise(rng) == 0) append_utf8(tok, noise(rng));  // diacritics etc.
        std::string n1 = normalize(tok);
        if (normalize(n1) != n1) token_failures++;
        std::string s1 = stem(n1.empty() ? tok : n1);
        if (stem(s1) != s1) token_failures++;
    }
    int ast_failures = 0;
    for (int i = 0; i < 1000; i++) {
        auto ast = testing::random_ast(rng, 3);
        auto printed = print_ast(*ast);
        auto reparsed = parse_query(printed);
        if (!ast_equal(*ast, *reparsed) || print_ast(*reparsed) != printed) ast_failures++;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "10000 tokens (%d failures), 1000 ASTs (%d failures)",
                  token_failures, ast_failures);
    report(7, "normalize/stem idempotence and parse/print fixpoint",
           token_failures == 0 && ast_failures == 0, buf);
}

void criterion_8() {
    auto t0 = Clock::now();
    auto set = materialize(generate_ambiguity_corpus(5, 5, 88));  // 25 docs
    // pad to exactly 50 docs with unanchored filler
    std::mt19937 rng(1008);
    const auto& bank = testing::word_bank();
    std::uniform_int_distribution<size_t> pick(0, bank.size() - 1);
    while (set.docs.size() < 50) {
        int id = static_cast<int>(set.docs.size());
        std::string text = bank[pick(rng)] + " " + bank[pick(rng)] + ".";
        set.docs.push_back({id, "filler" + std::to_string(id) + ".txt", text});
    }
    set.idx = build_index(set.docs, set.ont, set.stops);
    auto rep = run_eval(set.queries, set.qrels, set.idx, set.ont,
                        {QueryMode::Semantic, QueryMode::Baseline}, 5);
    std::ostringstream tsv;
    write_report_tsv(rep, tsv);
    bool shape_ok = rep.averages.size() == 2 &&
                    tsv.str().find("AVERAGE\tsemantic\t") != std::string::npos &&
                    tsv.str().find("AVERAGE\tbaseline\t") != std::string::npos;
    bool rows_ok = rep.rows.size() == set.queries.entries.size() * 2;
    bool latency_ok = true;
    for (const auto& row : rep.rows) latency_ok = latency_ok && row.latency_ms >= 0.0;
    double secs = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu docs, %zu rows, %.2fs", set.docs.size(),
                  rep.rows.size(), secs);
    report(8, "side-by-side timing report on a 50-doc corpus",
           shape_ok && rows_ok && latency_ok && secs < 5.0, buf);
}

}  // namespace

int main() {
    criteria_1_2();
    criteria_3_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
