#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "sbir/index.hpp"
#include "sbir/query.hpp"

namespace sbir {

struct QuerySet {
    std::vector<std::pair<std::string, std::string>> entries;  // (query_id, query string)

    static QuerySet load(std::istream& in);
    static QuerySet load(const std::string& path);
};

// Binary relevance judgments.
struct Qrels {
    std::map<std::string, std::set<int>> relevant;  // query_id -> docs judged 1
    std::map<std::string, std::set<int>> judged;    // query_id -> every doc with a judgment

    static Qrels load(std::istream& in);
    static Qrels load(const std::string& path);
};

// |retrieved ∩ relevant| / |retrieved|; 1.0 for an empty retrieved set
// (no false positives were returned).
double precision(const std::set<int>& retrieved, const std::set<int>& relevant);

// |retrieved ∩ relevant| / |relevant|; 1.0 when nothing is relevant.
double recall(const std::set<int>& retrieved, const std::set<int>& relevant);

struct EvalRow {
    std::string query_id;
    QueryMode mode;
    double precision;
    double recall;
    double latency_ms;
};

struct EvalAverage {
    QueryMode mode;
    double precision = 0.0;
    double recall = 0.0;
    double latency_ms = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::vector<EvalAverage> averages;  // one per requested mode
    std::vector<std::string> warnings;  // e.g. qrels referencing unknown docs
};

// Runs every query in every requested mode; latency is the median of
// `timing_runs` repetitions after one discarded warm-up run.
EvalReport run_eval(const QuerySet& queries, const Qrels& qrels, const SemanticIndex& idx,
                    const Ontology& ont, const std::vector<QueryMode>& modes,
                    int timing_runs = 5, int max_hops = 2, int depth = 2);

void write_report_tsv(const EvalReport& report, std::ostream& out);
void print_report_pretty(const EvalReport& report, std::ostream& out);

// Synthetic corpus where one pivot word occurs in every document but each
// document's companion word ties the phrase to one sense cluster. Queries
// pair the pivot with a companion via OR; only same-sense documents are
// judged relevant. Deterministic per seed.
struct GeneratedSet {
    std::vector<RawDocument> docs;
    std::string ontology_tsv;
    QuerySet queries;
    Qrels qrels;
    std::vector<std::string> stopwords;
};

GeneratedSet generate_ambiguity_corpus(int n_senses, int docs_per_sense, unsigned seed);

}  // namespace sbir
