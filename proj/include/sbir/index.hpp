#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbir/ontology.hpp"
#include "sbir/text_pipeline.hpp"

namespace sbir {

struct IndexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicateDocId : IndexError {
    int doc_id;
    explicit DuplicateDocId(int id)
        : IndexError("duplicate doc_id: " + std::to_string(id)), doc_id(id) {}
};
struct FormatVersionMismatch : IndexError {
    using IndexError::IndexError;
};
struct ChecksumMismatch : IndexError {
    using IndexError::IndexError;
};
struct MalformedRecord : IndexError {
    int line_no;
    MalformedRecord(int line, const std::string& what)
        : IndexError("line " + std::to_string(line) + ": " + what), line_no(line) {}
};
struct IncompatibleConfig : IndexError {
    using IndexError::IndexError;
};

// NONE sorts before every real concept id.
inline bool rc_less(const std::string& a, const std::string& b) {
    bool na = is_none_rc(a), nb = is_none_rc(b);
    if (na != nb) return na;
    return a < b;
}

struct RcDoc {
    std::string rc;  // kNoneRc when the phrase resolved to no concept
    int doc_id;

    bool operator==(const RcDoc&) const = default;
    bool operator<(const RcDoc& o) const {
        if (rc != o.rc) return rc_less(rc, o.rc);
        return doc_id < o.doc_id;
    }
};

struct SemanticIndex {
    std::map<std::string, std::vector<RcDoc>> postings;  // stem -> sorted (rc, doc)
    std::map<int, std::string> doc_table;                // doc_id -> source_name
    std::string config_fingerprint;

    bool operator==(const SemanticIndex&) const = default;

    size_t posting_count() const {
        size_t n = 0;
        for (const auto& [s, v] : postings) n += v.size();
        return n;
    }
};

// Binds the preprocessing and ontology configuration an index was built
// with: "o:<ontology>;s:<stops>;a:<affixes>;d:<depth>".
std::string make_fingerprint(const Ontology& ont, const StopList& stops,
                             const AffixTables& affixes, int depth);

enum class ConfigCompat { Ok, Warn, Incompatible };

// Incompatible when the ontology component differs, Warn on any other
// component difference.
ConfigCompat check_config(const std::string& index_fp, const std::string& current_fp);

// One phrase's contribution to the index; used by shadow-build audits.
struct PhraseTrace {
    int doc_id;
    int phrase_index;
    std::string rc;
    std::vector<std::string> stems;
};

SemanticIndex build_index(const std::vector<RawDocument>& corpus, const Ontology& ont,
                          const StopList& stops, int depth = 2,
                          const AffixTables& affixes = AffixTables::defaults());
SemanticIndex build_index_traced(const std::vector<RawDocument>& corpus, const Ontology& ont,
                                 const StopList& stops, int depth, const AffixTables& affixes,
                                 std::vector<PhraseTrace>& traces);

// Full sorted (rc, doc) list for a stem; empty when absent.
const std::vector<RcDoc>& postings_for(const std::string& stem, const SemanticIndex& idx);

// Text format, byte-deterministic, sha256-checksummed.
std::string serialize_index(const SemanticIndex& idx);
SemanticIndex parse_index(const std::string& data);
void save_index(const SemanticIndex& idx, const std::string& path);
SemanticIndex load_index(const std::string& path);

}  // namespace sbir
