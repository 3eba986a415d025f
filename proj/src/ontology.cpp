#include "sbir/ontology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include "sbir/sha256.hpp"

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

bool valid_concept_id(const std::string& id) {
    if (id.empty()) return false;
    if (id.rfind("__", 0) == 0) return false;  // reserved for the NONE sentinel
    return id.find_first_of(" \t\r\n") == std::string::npos;
}

// Minimal hop distance from any anchor in `sources` to every concept
// within `limit` hops.
std::map<std::string, int> bfs_distances(const std::set<std::string>& sources, const Ontology& ont,
                                         int limit) {
    std::map<std::string, int> dist;
    std::deque<std::string> frontier;
    for (const auto& s : sources) {
        dist[s] = 0;
        frontier.push_back(s);
    }
    while (!frontier.empty()) {
        std::string cur = frontier.front();
        frontier.pop_front();
        int d = dist[cur];
        if (d >= limit) continue;
        for (const auto& nb : ont.neighbors(cur)) {
            if (!dist.count(nb)) {
                dist[nb] = d + 1;
                frontier.push_back(nb);
            }
        }
    }
    return dist;
}

}  // namespace

const std::string& Ontology::label_of(const std::string& id) const {
    auto it = concepts_.find(id);
    if (it == concepts_.end()) throw UnknownConcept(id);
    return it->second;
}

const std::vector<std::string>& Ontology::neighbors(const std::string& id) const {
    static const std::vector<std::string> kEmpty;
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? kEmpty : it->second;
}

Ontology Ontology::load(const std::string& path, const AffixTables& affixes) {
    std::ifstream in(path);
    if (!in) throw OntologyError("cannot open ontology file: " + path);
    return load(in, affixes);
}

Ontology Ontology::load(std::istream& in, const AffixTables& affixes) {
    Ontology ont;
    struct PendingRelation {
        Relation rel;
        int line_no;
    };
    struct PendingAnchor {
        std::string stem, concept_id;
        int line_no;
    };
    std::vector<PendingRelation> relations;
    std::vector<PendingAnchor> anchors;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (f[0] == "C") {
            if (f.size() != 3) throw MalformedLine(line_no, "C record needs 3 fields");
            if (!valid_concept_id(f[1])) throw MalformedLine(line_no, "bad concept id: " + f[1]);
            if (ont.concepts_.count(f[1])) throw DuplicateConcept(f[1]);
            ont.concepts_[f[1]] = f[2];
        } else if (f[0] == "R") {
            if (f.size() != 4) throw MalformedLine(line_no, "R record needs 4 fields");
            relations.push_back({Relation{f[1], f[2], f[3]}, line_no});
        } else if (f[0] == "A") {
            if (f.size() != 3) throw MalformedLine(line_no, "A record needs 3 fields");
            anchors.push_back({stem(normalize(f[1]), affixes), f[2], line_no});
        } else {
            throw MalformedLine(line_no, "unknown record type: " + f[0]);
        }
    }

    // Forward references are legal; validate after the full read.
    std::set<Relation> seen_relations;
    for (const auto& [rel, rline] : relations) {
        if (!ont.concepts_.count(rel.from)) throw UnknownConcept(rel.from, rline);
        if (!ont.concepts_.count(rel.to)) throw UnknownConcept(rel.to, rline);
        if (!seen_relations.insert(rel).second) continue;
        ont.relations_.push_back(rel);
    }
    std::sort(ont.relations_.begin(), ont.relations_.end());
    for (const auto& [st, cid, aline] : anchors) {
        if (!ont.concepts_.count(cid)) throw UnknownConcept(cid, aline);
        if (!st.empty()) ont.anchors_[st].insert(cid);
    }

    for (const auto& rel : ont.relations_) {
        if (rel.from != rel.to) {
            ont.adjacency_[rel.from].push_back(rel.to);
            ont.adjacency_[rel.to].push_back(rel.from);
        }
    }
    for (auto& [id, nbs] : ont.adjacency_) {
        std::sort(nbs.begin(), nbs.end());
        nbs.erase(std::unique(nbs.begin(), nbs.end()), nbs.end());
    }

    // Canonical serialization for the digest: sorted records, one per line.
    std::ostringstream canon;
    for (const auto& [id, label] : ont.concepts_) canon << "C\t" << id << '\t' << label << '\n';
    for (const auto& rel : ont.relations_)
        canon << "R\t" << rel.from << '\t' << rel.name << '\t' << rel.to << '\n';
    for (const auto& [st, cids] : ont.anchors_)
        for (const auto& cid : cids) canon << "A\t" << st << '\t' << cid << '\n';
    ont.digest_ = sha256_hex(canon.str()).substr(0, 16);
    return ont;
}

std::set<std::string> anchors_of(const std::string& stem, const Ontology& ont) {
    auto it = ont.anchors().find(stem);
    return it == ont.anchors().end() ? std::set<std::string>{} : it->second;
}

RcResolution resolve_reference_concept(const std::vector<Term>& terms, const Ontology& ont,
                                       int depth) {
    std::vector<std::string> stems;
    stems.reserve(terms.size());
    for (const auto& t : terms) stems.push_back(t.stem);
    return resolve_reference_concept(stems, ont, depth);
}

RcResolution resolve_reference_concept(const std::vector<std::string>& stems, const Ontology& ont,
                                       int depth) {
    // Per distinct anchored stem: minimal hop distance from its anchor set
    // to every concept within `depth` hops.
    std::map<std::string, std::map<std::string, int>> stem_dist;
    for (const auto& s : stems) {
        if (stem_dist.count(s)) continue;
        auto anchors = anchors_of(s, ont);
        if (anchors.empty()) continue;
        stem_dist[s] = bfs_distances(anchors, ont, depth);
    }
    RcResolution best;
    if (stem_dist.empty()) return best;

    std::set<std::string> candidates;
    for (const auto& [s, dist] : stem_dist)
        for (const auto& [c, d] : dist) candidates.insert(c);

    long best_dist_sum = std::numeric_limits<long>::max();
    for (const auto& c : candidates) {
        int score = 0;
        long dist_sum = 0;
        std::set<std::string> covered;
        for (const auto& [s, dist] : stem_dist) {
            auto it = dist.find(c);
            if (it != dist.end() && it->second <= depth) {
                score++;
                dist_sum += it->second;
                covered.insert(s);
            }
        }
        if (score > best.score || (score == best.score && dist_sum < best_dist_sum) ||
            (score == best.score && dist_sum == best_dist_sum && c < best.rc)) {
            best.rc = c;
            best.score = score;
            best.covered_terms = std::move(covered);
            best_dist_sum = dist_sum;
        }
    }
    return best;
}

bool related(const std::string& a, const std::string& b, const Ontology& ont, int max_hops) {
    if (a == b) return true;  // covers NONE <-> NONE and reflexivity
    if (is_none_rc(a) || is_none_rc(b)) return false;
    if (!ont.has_concept(a)) throw UnknownConcept(a);
    if (!ont.has_concept(b)) throw UnknownConcept(b);
    auto dist = bfs_distances({a}, ont, max_hops);
    auto it = dist.find(b);
    return it != dist.end() && it->second <= max_hops;
}

}  // namespace sbir
