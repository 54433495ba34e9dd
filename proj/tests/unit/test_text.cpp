#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "aqg/csv.hpp"
#include "aqg/errors.hpp"
#include "aqg/text.hpp"

using namespace aqg;

namespace {

// Reference splitmix64, transcribed from the published constants.
struct SplitMixRef {
    uint64_t x;
    uint64_t next() {
        uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

} // namespace

TEST_SUITE("text") {

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("The cat, sat!") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(tokenize("a1 b2-c3") == std::vector<std::string>{"a1", "b2", "c3"});
    CHECK(tokenize("  spaced\tout\nwords ") == std::vector<std::string>{"spaced", "out", "words"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("!!! ...").empty());
}

TEST_CASE("tokenize folds case beyond ascii") {
    CHECK(tokenize("Äpfel") == std::vector<std::string>{"äpfel"});
    CHECK(tokenize("ΣΟΦΙΑ") == std::vector<std::string>{"σοφια"});
    CHECK(tokenize("МИР") == std::vector<std::string>{"мир"});
}

TEST_CASE("tokenize splits on unicode punctuation") {
    // em dash and curly quotes separate; words survive
    auto toks = tokenize("one—two “three”");
    CHECK(toks == std::vector<std::string>{"one", "two", "three"});
}

TEST_CASE("utf8 round trip") {
    std::string s = "aä中\U0001F600z";
    auto cps = utf8_decode(s);
    REQUIRE(cps.size() == 5);
    CHECK(cps[0] == 'a');
    CHECK(cps[1] == 0xE4);
    CHECK(cps[2] == 0x4E2D);
    CHECK(cps[3] == 0x1F600);
    CHECK(utf8_encode(cps) == s);
}

TEST_CASE("invalid utf8 bytes become replacement chars") {
    std::string bad = "a\x80\xffz";
    auto cps = utf8_decode(bad);
    REQUIRE(cps.size() == 4);
    CHECK(cps[0] == 'a');
    CHECK(cps[1] == 0xFFFD);
    CHECK(cps[2] == 0xFFFD);
    CHECK(cps[3] == 'z');
}

TEST_CASE("porter stemmer canonical pairs") {
    // step 1a
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("ties") == "ti");
    CHECK(porter_stem("caress") == "caress");
    CHECK(porter_stem("cats") == "cat");
    // step 1b and its cleanup
    CHECK(porter_stem("feed") == "feed");
    CHECK(porter_stem("plastered") == "plaster");
    CHECK(porter_stem("bled") == "bled");
    CHECK(porter_stem("motoring") == "motor");
    CHECK(porter_stem("sing") == "sing");
    CHECK(porter_stem("hopping") == "hop");
    CHECK(porter_stem("falling") == "fall");
    CHECK(porter_stem("hissing") == "hiss");
    CHECK(porter_stem("filing") == "file");
    // step 1c
    CHECK(porter_stem("happy") == "happi");
    CHECK(porter_stem("sky") == "sky");
    // later steps
    CHECK(porter_stem("relational") == "relat");
    CHECK(porter_stem("conditional") == "condit");
    CHECK(porter_stem("digitizer") == "digit");
    CHECK(porter_stem("operator") == "oper");
    CHECK(porter_stem("hopefulness") == "hope");
    CHECK(porter_stem("goodness") == "good");
    CHECK(porter_stem("adoption") == "adopt");
    CHECK(porter_stem("adjustable") == "adjust");
    CHECK(porter_stem("defensible") == "defens");
    CHECK(porter_stem("replacement") == "replac");
    CHECK(porter_stem("controlling") == "control");
}

TEST_CASE("porter stemmer leaves short and non-ascii tokens alone") {
    CHECK(porter_stem("is") == "is");
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("äpfel") == "äpfel");
}

TEST_CASE("trim and lowering") {
    CHECK(trim("  x  ") == "x");
    CHECK(trim("\t\r\n") == "");
    CHECK(trim("") == "");
    CHECK(to_lower_ascii("MiXeD 42!") == "mixed 42!");
}

TEST_CASE("collapse_to_single_line") {
    CHECK(collapse_to_single_line("one\ntwo") == "one two");
    CHECK(collapse_to_single_line("one  \n\n  two") == "one two");
    CHECK(collapse_to_single_line("flat") == "flat");
}

TEST_CASE("fnv1a64 published vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("fnv1a64_mix continues the hash stream") {
    CHECK(fnv1a64_mix(fnv1a64("foo"), "bar") == fnv1a64("foobar"));
}

TEST_CASE("hex64 zero pads to 16 digits") {
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
    CHECK(hex64(~0ULL) == "ffffffffffffffff");
}

TEST_CASE("rng matches reference splitmix64") {
    for (uint64_t seed : {0ULL, 1ULL, 42ULL, 0x123456789abcdefULL}) {
        Rng rng(seed);
        SplitMixRef ref{seed};
        for (int i = 0; i < 64; ++i) CHECK(rng.next_u64() == ref.next());
    }
}

TEST_CASE("rng bounded draw stays in range and covers it") {
    Rng rng(7);
    std::set<uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        uint64_t v = rng.next_below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("rng doubles live in the unit interval") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        double d = rng.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
}

TEST_CASE("rng gaussians are deterministic and roughly standard") {
    Rng a(5), b(5);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double g = a.next_gaussian();
        CHECK(g == b.next_gaussian());
        sum += g;
        sumsq += g * g;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("rng shuffle is a deterministic permutation") {
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> w = v;
    Rng(99).shuffle(v);
    Rng(99).shuffle(w);
    CHECK(v == w);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("format_double is shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        double v = (rng.next_double() - 0.5) * std::pow(10.0, double(i % 17) - 8.0);
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("format_utc known timestamps") {
    CHECK(format_utc(0) == "1970-01-01T00:00:00Z");
    CHECK(format_utc(1234567890) == "2009-02-13T23:31:30Z");
}

TEST_CASE("file round trip") {
    std::string path = "/tmp/aqg_text_test_file.txt";
    std::string content = "line one\nline two\n\x01 binaryish";
    write_file(path, content);
    CHECK(read_file(path) == content);
    CHECK_THROWS_AS(read_file("/tmp/definitely/not/here.txt"), DataError);
}

} // TEST_SUITE("text")

TEST_SUITE("csv") {

TEST_CASE("plain rows") {
    auto rows = parse_csv("a,b,c\nd,e,f\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"d", "e", "f"});
}

TEST_CASE("quoted fields carry commas and escaped quotes") {
    auto rows = parse_csv("\"a,b\",\"say \"\"hi\"\"\",plain\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == std::vector<std::string>{"a,b", "say \"hi\"", "plain"});
}

TEST_CASE("crlf and missing final newline both work") {
    auto rows = parse_csv("a,b\r\nc,d");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1] == std::vector<std::string>{"c", "d"});
}

TEST_CASE("empty fields survive") {
    auto rows = parse_csv(",x,\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0] == std::vector<std::string>{"", "x", ""});
}

TEST_CASE("unterminated quote is an error naming the source") {
    CHECK_THROWS_WITH_AS(parse_csv("\"open", "ratings.csv"),
                         doctest::Contains("ratings.csv"), DataError);
    CHECK_THROWS_AS(parse_csv("\"open"), DataError);
}

TEST_CASE("escape and join round trip") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"q") == "\"q\"\"q\"");
    Rng rng(17);
    const std::string alphabet = "ab ,\"xyz09";
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> fields;
        size_t nfields = 1 + rng.next_below(5);
        for (size_t f = 0; f < nfields; ++f) {
            std::string field;
            size_t len = rng.next_below(8);
            for (size_t c = 0; c < len; ++c)
                field.push_back(alphabet[rng.next_below(alphabet.size())]);
            fields.push_back(field);
        }
        // a lone empty field joins to a blank line, which parses as no row
        if (fields.size() == 1 && fields[0].empty()) fields[0] = "x";
        auto rows = parse_csv(csv_join(fields) + "\n");
        REQUIRE(rows.size() == 1);
        CHECK(rows[0] == fields);
    }
}

} // TEST_SUITE("csv")
