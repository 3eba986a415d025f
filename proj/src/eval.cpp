#include "sbir/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sbir {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

QuerySet QuerySet::load(std::istream& in) {
    QuerySet qs;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (f.size() != 2 || f[0].empty())
            throw std::runtime_error("queries file line " + std::to_string(line_no) +
                                     ": expected <query_id>\\t<query>");
        if (!seen.insert(f[0]).second)
            throw std::runtime_error("queries file line " + std::to_string(line_no) +
                                     ": duplicate query_id " + f[0]);
        qs.entries.emplace_back(f[0], f[1]);
    }
    return qs;
}

QuerySet QuerySet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open queries file: " + path);
    return load(in);
}

Qrels Qrels::load(std::istream& in) {
    Qrels q;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (f.size() != 3 || (f[2] != "0" && f[2] != "1"))
            throw std::runtime_error("qrels file line " + std::to_string(line_no) +
                                     ": expected <query_id>\\t<doc_id>\\t<0|1>");
        int doc_id;
        try {
            doc_id = std::stoi(f[1]);
        } catch (const std::exception&) {
            throw std::runtime_error("qrels file line " + std::to_string(line_no) +
                                     ": bad doc_id " + f[1]);
        }
        q.judged[f[0]].insert(doc_id);
        if (f[2] == "1") q.relevant[f[0]].insert(doc_id);
    }
    return q;
}

Qrels Qrels::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open qrels file: " + path);
    return load(in);
}

double precision(const std::set<int>& retrieved, const std::set<int>& relevant) {
    if (retrieved.empty()) return 1.0;
    size_t hits = 0;
    for (int d : retrieved) hits += relevant.count(d);
    return static_cast<double>(hits) / static_cast<double>(retrieved.size());
}

double recall(const std::set<int>& retrieved, const std::set<int>& relevant) {
    if (relevant.empty()) return 1.0;
    size_t hits = 0;
    for (int d : relevant) hits += retrieved.count(d);
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

EvalReport run_eval(const QuerySet& queries, const Qrels& qrels, const SemanticIndex& idx,
                    const Ontology& ont, const std::vector<QueryMode>& modes, int timing_runs,
                    int max_hops, int depth) {
    if (timing_runs < 1) throw std::invalid_argument("timing_runs must be >= 1");
    EvalReport report;
    for (const auto& [qid, judged] : qrels.judged)
        for (int doc : judged)
            if (!idx.doc_table.count(doc))
                report.warnings.push_back("qrels: query " + qid + " references unknown doc " +
                                         std::to_string(doc));

    for (const auto& [qid, qstr] : queries.entries) {
        AstPtr ast = parse_query(qstr);
        auto rel_it = qrels.relevant.find(qid);
        const std::set<int> no_relevant;
        const std::set<int>& relevant = rel_it == qrels.relevant.end() ? no_relevant
                                                                       : rel_it->second;
        for (QueryMode mode : modes) {
            execute(*ast, idx, ont, mode, max_hops, depth);  // warm-up, discarded
            std::vector<double> latencies;
            ResultSet rs;
            for (int run = 0; run < timing_runs; run++) {
                auto t0 = std::chrono::steady_clock::now();
                rs = execute(*ast, idx, ont, mode, max_hops, depth);
                auto t1 = std::chrono::steady_clock::now();
                latencies.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            }
            auto retrieved = rs.doc_ids();
            report.rows.push_back({qid, mode, precision(retrieved, relevant),
                                   recall(retrieved, relevant), median(latencies)});
        }
    }

    for (QueryMode mode : modes) {
        EvalAverage avg{mode};
        int n = 0;
        for (const auto& row : report.rows) {
            if (row.mode != mode) continue;
            avg.precision += row.precision;
            avg.recall += row.recall;
            avg.latency_ms += row.latency_ms;
            n++;
        }
        if (n > 0) {
            avg.precision /= n;
            avg.recall /= n;
            avg.latency_ms /= n;
        }
        report.averages.push_back(avg);
    }
    return report;
}

void write_report_tsv(const EvalReport& report, std::ostream& out) {
    out << "query_id\tmode\tprecision\trecall\tlatency_ms\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& row : report.rows)
        out << row.query_id << '\t' << mode_name(row.mode) << '\t' << row.precision << '\t'
            << row.recall << '\t' << row.latency_ms << '\n';
    for (const auto& avg : report.averages)
        out << "AVERAGE\t" << mode_name(avg.mode) << '\t' << avg.precision << '\t' << avg.recall
            << '\t' << avg.latency_ms << '\n';
    out << "# precision of an empty retrieved set is defined as 1.0\n";
    for (const auto& w : report.warnings) out << "# warning: " << w << '\n';
}

void print_report_pretty(const EvalReport& report, std::ostream& out) {
    out << std::left << std::setw(16) << "query_id" << std::setw(10) << "mode" << std::right
        << std::setw(11) << "precision" << std::setw(9) << "recall" << std::setw(12)
        << "latency_ms" << '\n';
    out << std::fixed << std::setprecision(4);
    auto row_line = [&](const std::string& id, QueryMode mode, double p, double r, double ms) {
        out << std::left << std::setw(16) << id << std::setw(10) << mode_name(mode) << std::right
            << std::setw(11) << p << std::setw(9) << r << std::setw(12) << ms << '\n';
    };
    for (const auto& row : report.rows)
        row_line(row.query_id, row.mode, row.precision, row.recall, row.latency_ms);
    for (const auto& avg : report.averages)
        row_line("AVERAGE", avg.mode, avg.precision, avg.recall, avg.latency_ms);
    out << "note: precision of an empty retrieved set is defined as 1.0\n";
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

GeneratedSet generate_ambiguity_corpus(int n_senses, int docs_per_sense, unsigned seed) {
    if (n_senses < 2) throw std::invalid_argument("n_senses must be >= 2");
    if (docs_per_sense < 1) throw std::invalid_argument("docs_per_sense must be >= 1");
    std::mt19937 rng(seed);

    // Letters that never match a prefix/suffix table entry, so every
    // generated word is its own stem.
    static const std::vector<std::string> kLetters = {"ج", "ح", "خ", "د", "ذ", "ر",
                                                      "ز", "س", "ش", "ص", "ض", "ط",
                                                      "ظ", "ع", "غ", "ق", "م"};
    std::set<std::string> used;
    auto fresh_word = [&] {
        while (true) {
            std::uniform_int_distribution<int> len_dist(3, 4);
            std::uniform_int_distribution<size_t> letter(0, kLetters.size() - 1);
            std::string w;
            int len = len_dist(rng);
            for (int i = 0; i < len; i++) w += kLetters[letter(rng)];
            if (used.insert(w).second) return w;
        }
    };
    auto surface = [&](const std::string& word) {
        // exercise the stemmer: sometimes add the definite article
        return std::uniform_int_distribution<int>(0, 1)(rng) ? "ال" + word : word;
    };

    GeneratedSet gen;
    gen.stopwords = {"في", "من", "عن", "على"};
    std::string pivot = fresh_word();

    std::ostringstream ont;
    ont << "# generated ambiguity ontology\n";
    std::vector<std::vector<std::string>> companions(n_senses);
    for (int k = 0; k < n_senses; k++) {
        std::string root = "s" + std::to_string(k);
        ont << "C\t" << root << "\tsense cluster " << k << '\n';
        for (int j = 0; j < docs_per_sense; j++) {
            std::string word = fresh_word();
            std::string concept_id = root + "w" + std::to_string(j);
            companions[k].push_back(word);
            ont << "C\t" << concept_id << "\tcompanion " << word << '\n';
            ont << "R\t" << root << "\trelated_to\t" << concept_id << '\n';
            ont << "A\t" << word << '\t' << concept_id << '\n';
        }
    }
    gen.ontology_tsv = ont.str();

    std::uniform_int_distribution<size_t> stop_pick(0, gen.stopwords.size() - 1);
    int doc_id = 0;
    for (int k = 0; k < n_senses; k++) {
        for (int j = 0; j < docs_per_sense; j++) {
            std::ostringstream text;
            text << surface(pivot) << ' ' << gen.stopwords[stop_pick(rng)] << ' '
                 << surface(companions[k][j]) << ".";
            if (std::uniform_int_distribution<int>(0, 1)(rng))
                text << ' ' << surface(companions[k][j]) << '.';
            char name[32];
            std::snprintf(name, sizeof name, "doc%03d.txt", doc_id);
            gen.docs.push_back({doc_id, name, text.str()});
            doc_id++;
        }
    }

    for (int k = 0; k < n_senses; k++) {
        std::string qid = "q" + std::to_string(k);
        gen.queries.entries.emplace_back(qid,
                                         surface(pivot) + " OR " + surface(companions[k][0]));
        for (int j = 0; j < docs_per_sense; j++) {
            int rel_doc = k * docs_per_sense + j;
            gen.qrels.relevant[qid].insert(rel_doc);
            gen.qrels.judged[qid].insert(rel_doc);
        }
    }
    return gen;
}

}  // namespace sbir
