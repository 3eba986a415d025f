// sbir: semantic Boolean retrieval over an ontology-annotated inverted index.
//
// Subcommands:
//   index  build a semantic index from a corpus directory
//   query  run one Boolean query against a saved index
//   eval   score a query set against relevance judgments in both modes
//   gen    emit a synthetic ambiguity corpus (corpus + ontology + queries + qrels)

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbir/eval.hpp"
#include "sbir/index.hpp"
#include "sbir/ontology.hpp"
#include "sbir/query.hpp"
#include "sbir/text_pipeline.hpp"
#include "sbir/utf8.hpp"

namespace fs = std::filesystem;
using namespace sbir;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_file;
    std::string corpus_dir;
    std::string ontology_path;
    std::string stopwords_path;
    std::string affixes_path;
    int depth = 2;
    int max_hops = 2;
    std::string mode = "semantic";
    std::string out;
    bool tsv = false;
    int timing_runs = 5;
    unsigned seed = 1;
};

// Shared `key = value` config file; command-line flags win.
void apply_config_file(Options& opt, const std::map<std::string, bool>& flag_set) {
    if (opt.config_file.empty()) return;
    std::ifstream in(opt.config_file);
    if (!in) throw IoError("cannot open config file: " + opt.config_file);
    std::string line;
    int line_no = 0;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        line_no++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto take = [&](const char* key, auto& field) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        if (flag_set.count(key) && flag_set.at(key)) return;  // flag overrides
        std::istringstream ss(it->second);
        ss >> field;
        if (ss.fail()) throw InputError(std::string("config: bad value for ") + key);
    };
    take("corpus", opt.corpus_dir);
    take("ontology", opt.ontology_path);
    take("stopwords", opt.stopwords_path);
    take("affixes", opt.affixes_path);
    take("depth", opt.depth);
    take("max-hops", opt.max_hops);
    take("mode", opt.mode);
    take("timing-runs", opt.timing_runs);
}

AffixTables load_affixes(const Options& opt) {
    return opt.affixes_path.empty() ? AffixTables::defaults() : AffixTables::load(opt.affixes_path);
}

StopList load_stops(const Options& opt) {
    if (opt.stopwords_path.empty()) return StopList{};
    return StopList::load(opt.stopwords_path);
}

std::vector<RawDocument> read_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) throw InputError("corpus dir does not exist: " + dir);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".txt")
            names.push_back(e.path().filename().string());
    if (names.empty()) throw InputError("corpus dir contains no .txt files: " + dir);
    std::sort(names.begin(), names.end());
    std::vector<RawDocument> docs;
    int doc_id = 0;
    for (const auto& name : names) {
        std::ifstream in(fs::path(dir) / name, std::ios::binary);
        if (!in) throw IoError("cannot read corpus file: " + name);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        if (!is_valid_utf8(text)) throw InputError("corpus file is not valid UTF-8: " + name);
        docs.push_back({doc_id++, name, std::move(text)});
    }
    return docs;
}

std::vector<QueryMode> modes_from(const std::string& mode) {
    if (mode == "semantic") return {QueryMode::Semantic};
    if (mode == "baseline") return {QueryMode::Baseline};
    if (mode == "both") return {QueryMode::Semantic, QueryMode::Baseline};
    throw InputError("bad --mode (want semantic|baseline|both): " + mode);
}

int cmd_index(const Options& opt, const std::string& out_path) {
    auto affixes = load_affixes(opt);
    auto stops = load_stops(opt);
    auto ont = Ontology::load(opt.ontology_path, affixes);
    auto corpus = read_corpus(opt.corpus_dir);
    auto t0 = std::chrono::steady_clock::now();
    auto idx = build_index(corpus, ont, stops, opt.depth, affixes);
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
    try {
        save_index(idx, out_path);
    } catch (const IndexError& e) {
        throw IoError(e.what());
    }
    if (opt.tsv) {
        std::cout << "docs\t" << idx.doc_table.size() << "\npostings\t" << idx.posting_count()
                  << "\nbuild_ms\t" << ms << '\n';
    } else {
        std::cout << "indexed " << idx.doc_table.size() << " docs, " << idx.posting_count()
                  << " postings in " << ms << " ms -> " << out_path << '\n';
    }
    return kExitOk;
}

void print_results(const ResultSet& rs, const SemanticIndex& idx, const Ontology& ont,
                   bool tsv) {
    auto grouped = group_results_by_rc(rs);
    if (!rs.warning.empty()) std::cerr << "warning: " << rs.warning << '\n';
    if (!tsv)
        std::cout << "[" << mode_name(rs.mode) << "] query RC: "
                  << (is_none_rc(rs.query_rc) ? "(none)" : rs.query_rc) << ", "
                  << rs.entries.size() << " result(s)\n";
    for (const auto& [rc, doc_ids] : grouped.groups) {
        std::string rc_label = is_none_rc(rc) ? "(none)" : rc + " [" + ont.label_of(rc) + "]";
        if (!tsv) std::cout << "  RC " << rc_label << ":\n";
        for (int doc : doc_ids) {
            auto it = idx.doc_table.find(doc);
            std::string name = it == idx.doc_table.end() ? "?" : it->second;
            if (tsv)
                std::cout << mode_name(rs.mode) << '\t' << (is_none_rc(rc) ? "-" : rc) << '\t'
                          << doc << '\t' << name << '\n';
            else
                std::cout << "    doc " << doc << "  " << name << '\n';
        }
    }
}

int cmd_query(const Options& opt, const std::string& index_path, const std::string& query) {
    auto affixes = load_affixes(opt);
    auto stops = load_stops(opt);
    auto ont = Ontology::load(opt.ontology_path, affixes);
    auto idx = load_index(index_path);
    std::string fingerprint = make_fingerprint(ont, stops, affixes, opt.depth);
    AstPtr ast;
    try {
        ast = parse_query(query);
    } catch (const QueryError& e) {
        std::cerr << "query error: " << e.what() << '\n' << query << '\n';
        std::cerr << std::string(std::min(e.pos, query.size()), ' ') << "^\n";
        return kExitInput;
    }
    for (QueryMode mode : modes_from(opt.mode)) {
        auto rs = execute(*ast, idx, ont, mode, opt.max_hops, opt.depth, fingerprint);
        print_results(rs, idx, ont, opt.tsv);
    }
    return kExitOk;
}

int cmd_eval(const Options& opt, const std::string& index_path, const std::string& queries_path,
             const std::string& qrels_path) {
    auto affixes = load_affixes(opt);
    auto ont = Ontology::load(opt.ontology_path, affixes);
    auto idx = load_index(index_path);
    auto queries = QuerySet::load(queries_path);
    auto qrels = Qrels::load(qrels_path);
    auto report = run_eval(queries, qrels, idx, ont, modes_from(opt.mode), opt.timing_runs,
                           opt.max_hops, opt.depth);
    if (!opt.out.empty()) {
        std::ofstream out(opt.out);
        if (!out) throw IoError("cannot open report file for writing: " + opt.out);
        write_report_tsv(report, out);
    }
    if (opt.tsv)
        write_report_tsv(report, std::cout);
    else
        print_report_pretty(report, std::cout);
    return kExitOk;
}

int cmd_gen(int n_senses, int docs_per_sense, unsigned seed, const std::string& out_dir) {
    auto gen = generate_ambiguity_corpus(n_senses, docs_per_sense, seed);
    fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "corpus", ec);
    if (ec) throw IoError("cannot create output dir: " + out_dir);
    auto write = [](const fs::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write " + p.string());
        out << content;
    };
    for (const auto& doc : gen.docs) write(root / "corpus" / doc.source_name, doc.text);
    write(root / "ontology.tsv", gen.ontology_tsv);
    std::ostringstream queries;
    for (const auto& [qid, q] : gen.queries.entries) queries << qid << '\t' << q << '\n';
    write(root / "queries.tsv", queries.str());
    std::ostringstream qrels;
    for (const auto& [qid, docs] : gen.qrels.relevant)
        for (int doc : docs) qrels << qid << '\t' << doc << "\t1\n";
    write(root / "qrels.tsv", qrels.str());
    std::ostringstream stops;
    for (const auto& w : gen.stopwords) stops << w << '\n';
    write(root / "stopwords.txt", stops.str());
    std::cout << "wrote " << gen.docs.size() << " docs, " << gen.queries.entries.size()
              << " queries to " << out_dir << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic Boolean Arabic retrieval engine"};
    app.require_subcommand(1);

    Options opt;
    std::map<std::string, bool> flag_set;
    auto add_common = [&](CLI::App* sub, bool needs_ontology) {
        sub->add_option("--config", opt.config_file, "key = value config file");
        auto* ont = sub->add_option("--ontology", opt.ontology_path, "concept-graph TSV");
        if (needs_ontology) ont->required();
        sub->add_option("--stopwords", opt.stopwords_path, "stop-word file");
        sub->add_option("--affixes", opt.affixes_path, "affix override file");
        sub->add_option("--depth", opt.depth, "RC resolution hop depth")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--max-hops", opt.max_hops, "RC relatedness hop limit")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--mode", opt.mode, "semantic|baseline|both");
        sub->add_flag("--tsv", opt.tsv, "machine-parseable TSV output");
        sub->final_callback([&, sub] {
            for (const auto* o : sub->get_options())
                if (o->get_lnames().size() == 1) flag_set[o->get_lnames()[0]] = o->count() > 0;
            apply_config_file(opt, flag_set);
        });
    };

    auto* s_index = app.add_subcommand("index", "build a semantic inverted index");
    std::string out_path = "index.sbir";
    s_index->add_option("--corpus", opt.corpus_dir, "directory of UTF-8 .txt files");
    s_index->add_option("--out", out_path, "index output path");
    add_common(s_index, /*needs_ontology=*/false);

    auto* s_query = app.add_subcommand("query", "run a Boolean query");
    std::string index_path, query_string;
    s_query->add_option("--index", index_path, "index file")->required();
    s_query->add_option("query", query_string, "Boolean query string")->required();
    add_common(s_query, /*needs_ontology=*/true);

    auto* s_eval = app.add_subcommand("eval", "precision/recall/latency evaluation");
    std::string queries_path, qrels_path;
    s_eval->add_option("--index", index_path, "index file")->required();
    s_eval->add_option("--queries", queries_path, "queries TSV")->required();
    s_eval->add_option("--qrels", qrels_path, "relevance judgments TSV")->required();
    s_eval->add_option("--out", opt.out, "report TSV output path");
    s_eval->add_option("--timing-runs", opt.timing_runs, "timed repetitions per query")
        ->check(CLI::PositiveNumber);
    add_common(s_eval, /*needs_ontology=*/true);

    auto* s_gen = app.add_subcommand("gen", "generate a synthetic ambiguity corpus");
    int n_senses = 2, docs_per_sense = 3;
    std::string gen_out = "generated";
    s_gen->add_option("--senses", n_senses, "number of sense clusters")->check(CLI::Range(2, 64));
    s_gen->add_option("--docs-per-sense", docs_per_sense, "documents per sense")
        ->check(CLI::PositiveNumber);
    s_gen->add_option("--seed", opt.seed, "RNG seed");
    s_gen->add_option("--out", gen_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_index->parsed()) {
            if (opt.corpus_dir.empty()) throw InputError("--corpus (or config `corpus`) required");
            if (opt.ontology_path.empty())
                throw InputError("--ontology (or config `ontology`) required");
            return cmd_index(opt, out_path);
        }
        if (s_query->parsed()) return cmd_query(opt, index_path, query_string);
        if (s_eval->parsed()) return cmd_eval(opt, index_path, queries_path, qrels_path);
        if (s_gen->parsed()) return cmd_gen(n_senses, docs_per_sense, opt.seed, gen_out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        // malformed inputs: ontology, stop list, index file, queries, qrels
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
