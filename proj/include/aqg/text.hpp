#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aqg {

// --- UTF-8 ---

// Decodes UTF-8 into codepoints; invalid byte sequences become U+FFFD.
std::vector<uint32_t> utf8_decode(const std::string& text);
std::string utf8_encode(const std::vector<uint32_t>& codepoints);

// --- Tokenizer shared by retrieval and the token-level metrics ---
//
// Lowercased; maximal runs of alphanumeric codepoints are tokens, everything
// else separates. ASCII is handled exactly; for non-ASCII, common punctuation
// and separator blocks split tokens and the remaining codepoints are treated
// as word characters. Case folding covers ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic.
std::vector<std::string> tokenize(const std::string& text);

// Porter's stemming algorithm (1980), applied to lowercase ASCII tokens.
// Tokens containing non-ASCII bytes are returned unchanged.
std::string porter_stem(const std::string& token);

// --- Small helpers ---

std::string trim(const std::string& s);
std::string to_lower_ascii(const std::string& s);

// Collapses internal newlines (and surrounding spaces) to single spaces.
std::string collapse_to_single_line(const std::string& s);

// --- Hashing ---

// FNV-1a, 64 bit. Used for prompt hashes, template ids and cache keys.
uint64_t fnv1a64(const std::string& data);
uint64_t fnv1a64_mix(uint64_t seed, const std::string& data);
std::string hex64(uint64_t v);

// --- Deterministic RNG ---
//
// splitmix64 with explicitly pinned bounded-draw and gaussian methods, so
// seeded results are identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64();

    // Uniform in [0, n). n must be > 0.
    uint64_t next_below(uint64_t n);

    // Uniform in [0, 1).
    double next_double();

    // Standard normal via Box-Muller.
    double next_gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

// --- Time and file helpers ---

// "YYYY-MM-DDTHH:MM:SSZ" for the given unix timestamp.
std::string format_utc(int64_t unix_seconds);
int64_t now_unix_seconds();

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace aqg
