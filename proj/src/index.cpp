#include "sbir/index.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "sbir/sha256.hpp"

namespace sbir {

namespace {

constexpr const char* kMagic = "SBIRIDX";
constexpr const char* kVersion = "1";

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

std::string component(const std::string& fp, const std::string& key) {
    size_t pos = fp.find(key + ":");
    if (pos == std::string::npos) return "";
    size_t start = pos + key.size() + 1;
    size_t end = fp.find(';', start);
    return fp.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

int parse_int(const std::string& s, int line_no, const char* what) {
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size() || v < 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRecord(line_no, std::string("bad ") + what + ": " + s);
    }
}

}  // namespace

std::string make_fingerprint(const Ontology& ont, const StopList& stops,
                             const AffixTables& affixes, int depth) {
    std::vector<std::string> stop_words(stops.words.begin(), stops.words.end());
    std::sort(stop_words.begin(), stop_words.end());
    std::ostringstream sw;
    for (const auto& w : stop_words) sw << w << '\n';

    std::ostringstream af;
    for (const auto& p : affixes.prefixes) af << "p " << p << '\n';
    for (const auto& s : affixes.suffixes) af << "s " << s << '\n';

    std::ostringstream fp;
    fp << "o:" << ont.digest() << ";s:" << sha256_hex(sw.str()).substr(0, 16)
       << ";a:" << sha256_hex(af.str()).substr(0, 16) << ";d:" << depth;
    return fp.str();
}

ConfigCompat check_config(const std::string& index_fp, const std::string& current_fp) {
    if (index_fp == current_fp) return ConfigCompat::Ok;
    if (component(index_fp, "o") != component(current_fp, "o")) return ConfigCompat::Incompatible;
    return ConfigCompat::Warn;
}

SemanticIndex build_index_traced(const std::vector<RawDocument>& corpus, const Ontology& ont,
                                 const StopList& stops, int depth, const AffixTables& affixes,
                                 std::vector<PhraseTrace>& traces) {
    SemanticIndex idx;
    idx.config_fingerprint = make_fingerprint(ont, stops, affixes, depth);
    for (const auto& doc : corpus) {
        if (!idx.doc_table.emplace(doc.doc_id, doc.source_name).second)
            throw DuplicateDocId(doc.doc_id);
    }
    std::set<std::tuple<std::string, std::string, int>> triples;
    for (const auto& doc : corpus) {
        int phrase_index = 0;
        for (const auto& phrase : split_phrases(normalize(doc.text))) {
            auto terms = preprocess_phrase(phrase, stops, affixes);
            if (terms.empty()) continue;
            auto res = resolve_reference_concept(terms, ont, depth);
            PhraseTrace trace{doc.doc_id, phrase_index++, res.rc, {}};
            for (const auto& t : terms) {
                triples.emplace(t.stem, res.rc, doc.doc_id);
                trace.stems.push_back(t.stem);
            }
            traces.push_back(std::move(trace));
        }
    }
    for (const auto& [stem, rc, doc_id] : triples) idx.postings[stem].push_back({rc, doc_id});
    for (auto& [stem, list] : idx.postings) std::sort(list.begin(), list.end());
    return idx;
}

SemanticIndex build_index(const std::vector<RawDocument>& corpus, const Ontology& ont,
                          const StopList& stops, int depth, const AffixTables& affixes) {
    std::vector<PhraseTrace> traces;
    return build_index_traced(corpus, ont, stops, depth, affixes, traces);
}

const std::vector<RcDoc>& postings_for(const std::string& stem, const SemanticIndex& idx) {
    static const std::vector<RcDoc> kEmpty;
    auto it = idx.postings.find(stem);
    return it == idx.postings.end() ? kEmpty : it->second;
}

std::string serialize_index(const SemanticIndex& idx) {
    std::ostringstream out;
    out << kMagic << '\t' << kVersion << '\t' << idx.config_fingerprint << '\n';
    for (const auto& [doc_id, name] : idx.doc_table) out << "D\t" << doc_id << '\t' << name << '\n';
    for (const auto& [stem, list] : idx.postings)
        for (const auto& [rc, doc_id] : list)
            out << "P\t" << stem << '\t' << rc << '\t' << doc_id << '\n';
    std::string body = out.str();
    return body + "X\t" + sha256_hex(body) + "\n";
}

SemanticIndex parse_index(const std::string& data) {
    // The X line covers every byte before it.
    size_t x_pos = data.rfind("X\t");
    if (x_pos == std::string::npos || (x_pos != 0 && data[x_pos - 1] != '\n'))
        throw ChecksumMismatch("missing checksum record");
    std::string body = data.substr(0, x_pos);
    std::string check_line = data.substr(x_pos);
    if (!check_line.empty() && check_line.back() == '\n') check_line.pop_back();
    auto check_fields = split_tabs(check_line);
    if (check_fields.size() != 2 || check_fields[1] != sha256_hex(body))
        throw ChecksumMismatch("index checksum does not match contents");

    SemanticIndex idx;
    std::istringstream in(body);
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        line_no++;
        auto f = split_tabs(line);
        if (!saw_header) {
            if (f.size() != 3 || f[0] != kMagic)
                throw MalformedRecord(line_no, "bad index header");
            if (f[1] != kVersion)
                throw FormatVersionMismatch("unsupported index format version: " + f[1]);
            idx.config_fingerprint = f[2];
            saw_header = true;
            continue;
        }
        if (f[0] == "D") {
            if (f.size() != 3) throw MalformedRecord(line_no, "D record needs 3 fields");
            idx.doc_table[parse_int(f[1], line_no, "doc_id")] = f[2];
        } else if (f[0] == "P") {
            if (f.size() != 4) throw MalformedRecord(line_no, "P record needs 4 fields");
            idx.postings[f[1]].push_back({f[2], parse_int(f[3], line_no, "doc_id")});
        } else {
            throw MalformedRecord(line_no, "unknown record type: " + f[0]);
        }
    }
    if (!saw_header) throw MalformedRecord(1, "empty index file");
    return idx;
}

void save_index(const SemanticIndex& idx, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IndexError("cannot open index file for writing: " + path);
    out << serialize_index(idx);
    if (!out) throw IndexError("write failed: " + path);
}

SemanticIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexError("cannot open index file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_index(buf.str());
}

}  // namespace sbir
