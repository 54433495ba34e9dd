#include "aqg/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqg/errors.hpp"

namespace aqg {

// --- UTF-8 ---

std::vector<uint32_t> utf8_decode(const std::string& text) {
    std::vector<uint32_t> out;
    out.reserve(text.size());
    size_t i = 0;
    const auto n = text.size();
    while (i < n) {
        unsigned char b0 = static_cast<unsigned char>(text[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int extra;
        uint32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            extra = 1;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            extra = 2;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            extra = 3;
            cp = b0 & 0x07;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + static_cast<size_t>(extra) >= n) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        uint32_t acc = cp;
        for (int k = 1; k <= extra; ++k) {
            unsigned char bk = static_cast<unsigned char>(text[i + k]);
            if ((bk & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            acc = (acc << 6) | (bk & 0x3F);
        }
        if (!ok || acc > 0x10FFFF) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(acc);
        i += 1 + extra;
    }
    return out;
}

std::string utf8_encode(const std::vector<uint32_t>& codepoints) {
    std::string out;
    out.reserve(codepoints.size());
    for (uint32_t cp : codepoints) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

// --- Tokenizer ---

namespace {

bool in_range(uint32_t cp, uint32_t lo, uint32_t hi) { return cp >= lo && cp <= hi; }

// Separator blocks among non-ASCII codepoints. Anything not listed here and
// >= U+00C0 counts as a word character.
bool is_nonascii_separator(uint32_t cp) {
    return in_range(cp, 0x80, 0xBF)        // C1 controls, Latin-1 punctuation
           || cp == 0xD7 || cp == 0xF7     // multiplication / division signs
           || in_range(cp, 0x2000, 0x206F) // general punctuation (dashes, quotes)
           || in_range(cp, 0x2E00, 0x2E7F) // supplemental punctuation
           || in_range(cp, 0x3000, 0x303F) // CJK symbols and punctuation
           || in_range(cp, 0xFE30, 0xFE4F) // CJK compatibility forms
           || in_range(cp, 0xFF01, 0xFF0F) // fullwidth punctuation
           || in_range(cp, 0xFF1A, 0xFF20) || in_range(cp, 0xFF3B, 0xFF40) ||
           in_range(cp, 0xFF5B, 0xFF65);
}

bool is_word_cp(uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    return !is_nonascii_separator(cp);
}

uint32_t lower_cp(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20; // Latin-1
    if (in_range(cp, 0x100, 0x177)) {                             // Latin Extended-A pairs
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if (cp == 0x178) return 0xFF;
    if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
    if (in_range(cp, 0x391, 0x3A1) || in_range(cp, 0x3A3, 0x3AB)) return cp + 0x20; // Greek
    if (in_range(cp, 0x410, 0x42F)) return cp + 0x20;                               // Cyrillic
    if (in_range(cp, 0x400, 0x40F)) return cp + 0x50;
    return cp;
}

} // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::vector<uint32_t> current;
    for (uint32_t cp : utf8_decode(text)) {
        if (is_word_cp(cp)) {
            current.push_back(lower_cp(cp));
        } else if (!current.empty()) {
            tokens.push_back(utf8_encode(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(utf8_encode(current));
    return tokens;
}

// --- Porter stemmer ---

namespace {

bool ascii_lower_alpha(const std::string& w) {
    for (char c : w)
        if (c < 'a' || c > 'z') return false;
    return true;
}

bool is_consonant(const std::string& w, size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
    if (c == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
    return true;
}

// Number of VC sequences in the word: [C](VC)^m[V].
int measure(const std::string& w) {
    int m = 0;
    bool prev_vowel = false;
    for (size_t i = 0; i < w.size(); ++i) {
        bool vowel = !is_consonant(w, i);
        if (!vowel && prev_vowel) ++m;
        prev_vowel = vowel;
    }
    return m;
}

bool contains_vowel(const std::string& w) {
    for (size_t i = 0; i < w.size(); ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool ends_double_consonant(const std::string& w) {
    size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// *o: stem ends cvc where the final consonant is not w, x or y.
bool ends_cvc(const std::string& w) {
    size_t n = w.size();
    if (n < 3) return false;
    if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
    char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, const std::string& suf) {
    return w.size() >= suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
}

struct SuffixRule {
    const char* suffix;
    const char* replacement;
};

// Longest matching suffix wins; if its measure condition fails, the step
// leaves the word unchanged.
bool apply_longest(std::string& w, const std::vector<SuffixRule>& rules, int min_measure) {
    const SuffixRule* best = nullptr;
    for (const auto& r : rules) {
        if (ends_with(w, r.suffix)) {
            if (!best || std::string(r.suffix).size() > std::string(best->suffix).size())
                best = &r;
        }
    }
    if (!best) return false;
    std::string stem = w.substr(0, w.size() - std::string(best->suffix).size());
    if (measure(stem) > min_measure) {
        w = stem + best->replacement;
        return true;
    }
    return false;
}

} // namespace

std::string porter_stem(const std::string& token) {
    if (token.size() <= 2 || !ascii_lower_alpha(token)) return token;
    std::string w = token;

    // Step 1a
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (!ends_with(w, "ss") && ends_with(w, "s")) {
        w.resize(w.size() - 1);
    }

    // Step 1b
    bool cleanup = false;
    if (ends_with(w, "eed")) {
        std::string stem = w.substr(0, w.size() - 3);
        if (measure(stem) > 0) w.resize(w.size() - 1);
    } else if (ends_with(w, "ed") && contains_vowel(w.substr(0, w.size() - 2))) {
        w.resize(w.size() - 2);
        cleanup = true;
    } else if (ends_with(w, "ing") && contains_vowel(w.substr(0, w.size() - 3))) {
        w.resize(w.size() - 3);
        cleanup = true;
    }
    if (cleanup) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w.push_back('e');
        } else if (ends_double_consonant(w) && !ends_with(w, "l") && !ends_with(w, "s") &&
                   !ends_with(w, "z")) {
            w.resize(w.size() - 1);
        } else if (measure(w) == 1 && ends_cvc(w)) {
            w.push_back('e');
        }
    }

    // Step 1c
    if (ends_with(w, "y") && contains_vowel(w.substr(0, w.size() - 1))) {
        w[w.size() - 1] = 'i';
    }

    // Step 2
    static const std::vector<SuffixRule> step2 = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    };
    apply_longest(w, step2, 0);

    // Step 3
    static const std::vector<SuffixRule> step3 = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    apply_longest(w, step3, 0);

    // Step 4
    {
        static const std::vector<SuffixRule> step4 = {
            {"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},  {"able", ""},
            {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ou", ""},
            {"ism", ""}, {"ate", ""},  {"iti", ""},  {"ous", ""}, {"ive", ""}, {"ize", ""},
        };
        const SuffixRule* best = nullptr;
        for (const auto& r : step4) {
            if (ends_with(w, r.suffix)) {
                if (!best || std::string(r.suffix).size() > std::string(best->suffix).size())
                    best = &r;
            }
        }
        bool ion = ends_with(w, "ion");
        if (ion && (!best || std::string(best->suffix).size() < 3)) {
            std::string stem = w.substr(0, w.size() - 3);
            if (measure(stem) > 1 && (ends_with(stem, "s") || ends_with(stem, "t"))) w = stem;
        } else if (best) {
            std::string stem = w.substr(0, w.size() - std::string(best->suffix).size());
            if (measure(stem) > 1) w = stem;
        }
    }

    // Step 5a
    if (ends_with(w, "e")) {
        std::string stem = w.substr(0, w.size() - 1);
        int m = measure(stem);
        if (m > 1 || (m == 1 && !ends_cvc(stem))) w = stem;
    }

    // Step 5b
    if (measure(w) > 1 && ends_double_consonant(w) && ends_with(w, "l")) w.resize(w.size() - 1);

    return w;
}

// --- Small helpers ---

std::string trim(const std::string& s) {
    size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    size_t e = s.size();
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c += 0x20;
    return out;
}

std::string collapse_to_single_line(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n' || c == '\r') {
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            while (i < s.size() &&
                   (s[i] == '\n' || s[i] == '\r' || s[i] == ' ' || s[i] == '\t'))
                ++i;
            if (!out.empty() && i < s.size()) out.push_back(' ');
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return trim(out);
}

// --- Hashing ---

uint64_t fnv1a64(const std::string& data) {
    return fnv1a64_mix(14695981039346656037ULL, data);
}

uint64_t fnv1a64_mix(uint64_t seed, const std::string& data) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// --- Rng ---

uint64_t Rng::next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t Rng::next_below(uint64_t n) {
    // Rejection sampling keeps the draw unbiased and fully pinned.
    uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
}

double Rng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 1e-300) u1 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "0";
    return std::string(buf, end);
}

// --- Time and files ---

std::string format_utc(int64_t unix_seconds) {
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm_utc.tm_year + 1900,
                  tm_utc.tm_mon + 1, tm_utc.tm_mday, tm_utc.tm_hour, tm_utc.tm_min,
                  tm_utc.tm_sec);
    return buf;
}

int64_t now_unix_seconds() { return static_cast<int64_t>(std::time(nullptr)); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

} // namespace aqg
