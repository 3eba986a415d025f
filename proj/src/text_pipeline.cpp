#include "sbir/text_pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "sbir/utf8.hpp"

namespace sbir {

namespace {

constexpr char32_t kTatweel = 0x0640;

bool is_arabic_diacritic(char32_t cp) { return cp >= 0x064B && cp <= 0x0652; }

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\v':
        case U'\f':
        case 0x00A0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return (cp >= 0x2000 && cp <= 0x200A);
    }
}

bool is_delimiter_cp(char32_t cp) {
    if (cp < 0x80) {
        // ASCII: anything that is not a letter or digit splits tokens.
        return !((cp >= U'0' && cp <= U'9') || (cp >= U'A' && cp <= U'Z') ||
                 (cp >= U'a' && cp <= U'z'));
    }
    if (is_space_cp(cp)) return true;
    switch (cp) {
        case 0x060C:  // arabic comma
        case 0x061B:  // arabic semicolon
        case 0x061E:
        case 0x061F:  // arabic question mark
        case 0x066A:
        case 0x066B:
        case 0x066C:
        case 0x066D:
        case 0x06D4:  // arabic full stop
        case 0x00AB:
        case 0x00BB:
            return true;
        default:
            return (cp >= 0x2010 && cp <= 0x2027);  // general punctuation
    }
}

bool is_phrase_terminator(char32_t cp) {
    switch (cp) {
        case U'.':
        case U'!':
        case U'?':
        case U';':
        case U'\n':
        case 0x061F:  // ؟
        case 0x061B:  // ؛
            return true;
        default:
            return false;
    }
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool starts_with(const std::u32string& s, const std::u32string& p) {
    return s.size() >= p.size() && std::equal(p.begin(), p.end(), s.begin());
}

bool ends_with(const std::u32string& s, const std::u32string& p) {
    return s.size() >= p.size() && std::equal(p.rbegin(), p.rend(), s.rbegin());
}

// Longest table entry that matches and leaves a remainder of >= 2 chars.
void strip_one(std::u32string& w, const std::vector<std::u32string>& table, bool prefix) {
    for (const auto& affix : table) {
        if (w.size() < affix.size() + 2) continue;
        if (prefix ? starts_with(w, affix) : ends_with(w, affix)) {
            if (prefix)
                w.erase(0, affix.size());
            else
                w.erase(w.size() - affix.size());
            return;
        }
    }
}

std::vector<std::u32string> decode_table(const std::vector<std::string>& affixes) {
    std::vector<std::u32string> out;
    out.reserve(affixes.size());
    for (const auto& a : affixes) out.push_back(decode_utf8(a));
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return out;
}

}  // namespace

std::string normalize(const std::string& text) {
    std::u32string in = decode_utf8(text);
    std::u32string out;
    out.reserve(in.size());
    for (size_t i = 0; i < in.size(); i++) {
        char32_t cp = in[i];
        // Compose alef + combining madda/hamza, then fold.
        if (cp == 0x0627 && i + 1 < in.size() &&
            (in[i + 1] == 0x0653 || in[i + 1] == 0x0654 || in[i + 1] == 0x0655)) {
            i++;  // composed form folds back to bare alef
            out.push_back(0x0627);
            continue;
        }
        if (is_arabic_diacritic(cp) || cp == kTatweel) continue;
        switch (cp) {
            case 0x0622:  // آ
            case 0x0623:  // أ
            case 0x0625:  // إ
                out.push_back(0x0627);
                break;
            case 0x0649:  // ى
                out.push_back(0x064A);
                break;
            case 0x0629:  // ة
                out.push_back(0x0647);
                break;
            default:
                out.push_back(cp);
        }
    }
    return encode_utf8(out);
}

std::vector<std::string> split_phrases(const std::string& text) {
    std::u32string in = decode_utf8(text);
    std::vector<std::string> phrases;
    std::u32string cur;
    auto flush = [&] {
        size_t a = 0, b = cur.size();
        while (a < b && is_space_cp(cur[a])) a++;
        while (b > a && is_space_cp(cur[b - 1])) b--;
        if (b > a) phrases.push_back(encode_utf8(cur.substr(a, b - a)));
        cur.clear();
    };
    for (char32_t cp : in) {
        if (is_phrase_terminator(cp))
            flush();
        else
            cur.push_back(cp);
    }
    flush();
    return phrases;
}

std::vector<std::string> tokenize(const std::string& phrase) {
    std::u32string in = decode_utf8(phrase);
    std::vector<std::string> tokens;
    std::u32string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(encode_utf8(cur));
        cur.clear();
    };
    for (char32_t cp : in) {
        if (is_delimiter_cp(cp))
            flush();
        else
            cur.push_back(cp);
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stops) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stops.contains(t)) out.push_back(t);
    return out;
}

std::string stem(const std::string& token, const AffixTables& affixes) {
    std::u32string w = decode_utf8(token);
    auto prefixes = decode_table(affixes.prefixes);
    auto suffixes = decode_table(affixes.suffixes);
    // Iterated to a fixed point so stem(stem(x)) == stem(x); each round
    // shrinks the word, so the loop terminates.
    while (true) {
        std::u32string before = w;
        strip_one(w, prefixes, /*prefix=*/true);
        strip_one(w, suffixes, /*prefix=*/false);
        if (w == before) break;
    }
    return encode_utf8(w);
}

std::vector<Term> preprocess_phrase(const std::string& phrase, const StopList& stops,
                                    const AffixTables& affixes) {
    std::vector<Term> terms;
    for (const auto& tok : remove_stopwords(tokenize(phrase), stops)) {
        std::string st = stem(tok, affixes);
        if (st.empty()) continue;
        terms.push_back(Term{tok, st});
    }
    return terms;
}

AffixTables AffixTables::defaults() {
    AffixTables t;
    t.prefixes = {"وال", "بال", "كال", "فال", "ال", "و", "ف", "ب", "ك", "ل"};
    t.suffixes = {"ها", "ان", "ات", "ون", "ين", "يه", "ية", "ه", "ي", "ا"};
    return t;
}

AffixTables AffixTables::load(std::istream& in) {
    AffixTables t;
    std::string line;
    std::vector<std::string>* section = nullptr;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "[prefixes]") {
            section = &t.prefixes;
        } else if (line == "[suffixes]") {
            section = &t.suffixes;
        } else if (section) {
            section->push_back(normalize(line));
        } else {
            throw std::runtime_error("affix file line " + std::to_string(line_no) +
                                     ": entry before [prefixes]/[suffixes] section");
        }
    }
    return t;
}

AffixTables AffixTables::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open affix file: " + path);
    return load(in);
}

StopList StopList::load(std::istream& in) {
    StopList s;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        s.words.insert(normalize(line));
    }
    return s;
}

StopList StopList::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stop-word file: " + path);
    return StopList::load(in);
}

}  // namespace sbir
