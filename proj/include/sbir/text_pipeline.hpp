#pragma once

#include <istream>
#include <string>
#include <unordered_set>
#include <vector>

namespace sbir {

struct RawDocument {
    int doc_id = 0;
    std::string source_name;
    std::string text;  // UTF-8
};

// A token after normalization (surface) and light stemming (stem).
struct Term {
    std::string surface;
    std::string stem;

    bool operator==(const Term&) const = default;
};

struct StopList {
    std::unordered_set<std::string> words;

    bool contains(const std::string& w) const { return words.count(w) != 0; }
    static StopList load(const std::string& path);
    static StopList load(std::istream& in);
};

// Prefix/suffix strip tables for the light stemmer, longest-match order.
struct AffixTables {
    std::vector<std::string> prefixes;
    std::vector<std::string> suffixes;

    static AffixTables defaults();
    static AffixTables load(const std::string& path);
    static AffixTables load(std::istream& in);
};

// Arabic-aware normalization: canonical composition of alef + combining
// hamza/madda, diacritic and tatweel removal, alef/ya/ta-marbuta folding.
// Total and idempotent.
std::string normalize(const std::string& text);

// Maximal runs between sentence terminators {. ! ? ; ؟ ؛ newline};
// whitespace-only runs dropped.
std::vector<std::string> split_phrases(const std::string& text);

// Split on whitespace and punctuation; no empty tokens.
std::vector<std::string> tokenize(const std::string& phrase);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stops);

// Light stemming: strip one longest matching prefix, then one longest
// matching suffix, keeping at least 2 characters; iterated to a fixed
// point (at most 3 rounds).
std::string stem(const std::string& token, const AffixTables& affixes = AffixTables::defaults());

// tokenize, then remove_stopwords, then stem. Shared by the indexing and
// query paths; expects normalized input.
std::vector<Term> preprocess_phrase(const std::string& phrase, const StopList& stops,
                                    const AffixTables& affixes = AffixTables::defaults());

}  // namespace sbir
