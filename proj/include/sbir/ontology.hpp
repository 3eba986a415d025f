#pragma once

#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbir/text_pipeline.hpp"

namespace sbir {

// Sentinel for "no reference concept". Real concept ids may not begin
// with "__", so this never collides.
inline const std::string kNoneRc = "__NONE__";

inline bool is_none_rc(const std::string& rc) { return rc == kNoneRc; }

struct OntologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedLine : OntologyError {
    int line_no;
    MalformedLine(int line, const std::string& what)
        : OntologyError("line " + std::to_string(line) + ": " + what), line_no(line) {}
};
struct UnknownConcept : OntologyError {
    std::string id;
    int line_no;
    UnknownConcept(std::string concept_id, int line = 0)
        : OntologyError("unknown concept: " + concept_id +
                        (line ? " (line " + std::to_string(line) + ")" : "")),
          id(std::move(concept_id)),
          line_no(line) {}
};
struct DuplicateConcept : OntologyError {
    std::string id;
    explicit DuplicateConcept(std::string concept_id)
        : OntologyError("duplicate concept: " + concept_id), id(std::move(concept_id)) {}
};

struct Relation {
    std::string from;
    std::string name;
    std::string to;

    auto operator<=>(const Relation&) const = default;
};

// Immutable labeled concept graph with lexical anchors (stem -> concepts).
// Relation names are carried but not interpreted; traversal is undirected.
class Ontology {
public:
    static Ontology load(const std::string& path,
                         const AffixTables& affixes = AffixTables::defaults());
    static Ontology load(std::istream& in, const AffixTables& affixes = AffixTables::defaults());

    bool has_concept(const std::string& id) const { return concepts_.count(id) != 0; }
    const std::string& label_of(const std::string& id) const;
    const std::map<std::string, std::string>& concepts() const { return concepts_; }
    const std::vector<Relation>& relations() const { return relations_; }
    const std::map<std::string, std::set<std::string>>& anchors() const { return anchors_; }
    const std::vector<std::string>& neighbors(const std::string& id) const;

    // Stable digest of the canonical record set; part of the index
    // config fingerprint.
    const std::string& digest() const { return digest_; }

private:
    std::map<std::string, std::string> concepts_;  // id -> label
    std::vector<Relation> relations_;
    std::map<std::string, std::vector<std::string>> adjacency_;  // undirected, deduped
    std::map<std::string, std::set<std::string>> anchors_;       // stem -> concept ids
    std::string digest_;
};

// Exact-match anchor lookup; empty set for unknown stems.
std::set<std::string> anchors_of(const std::string& stem, const Ontology& ont);

struct RcResolution {
    std::string rc = kNoneRc;
    int score = 0;
    std::set<std::string> covered_terms;  // stems with an anchor within depth of rc
};

// Pick the concept covering the most distinct term stems within `depth`
// undirected hops of their anchors. Ties broken by smaller sum of minimal
// hop distances, then lexicographically smallest id.
RcResolution resolve_reference_concept(const std::vector<Term>& terms, const Ontology& ont,
                                       int depth = 2);
RcResolution resolve_reference_concept(const std::vector<std::string>& stems, const Ontology& ont,
                                       int depth = 2);

// True iff a == b or an undirected path of <= max_hops edges connects
// them. NONE is related only to NONE.
bool related(const std::string& a, const std::string& b, const Ontology& ont, int max_hops = 2);

}  // namespace sbir
