#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "aqg/embedding.hpp"
#include "aqg/errors.hpp"
#include "aqg/metrics.hpp"
#include "aqg/text.hpp"

using namespace aqg;

// Brute-force re-implementations, structured nothing like the library: maps
// of explicit n-gram vectors, full DP tables, plain DFS over alignments.
namespace oracle {

using Tokens = std::vector<std::string>;

std::map<Tokens, int> ngram_counts(const Tokens& tokens, size_t n) {
    std::map<Tokens, int> counts;
    if (tokens.size() < n) return counts;
    for (size_t i = 0; i + n <= tokens.size(); ++i)
        counts[Tokens(tokens.begin() + i, tokens.begin() + i + n)]++;
    return counts;
}

struct OrderTally {
    long matches = 0;
    long total = 0;
};

OrderTally clipped(const Tokens& cand, const Tokens& ref, size_t n) {
    OrderTally tally;
    auto cand_counts = ngram_counts(cand, n);
    auto ref_counts = ngram_counts(ref, n);
    for (const auto& [gram, count] : cand_counts) {
        tally.total += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) tally.matches += std::min(count, it->second);
    }
    return tally;
}

double brevity(long c, long r) {
    if (c == 0) return 0.0;
    if (c >= r) return 1.0;
    return std::exp(1.0 - double(r) / double(c));
}

double sentence_bleu(const std::string& cand_text, const std::string& ref_text) {
    Tokens cand = tokenize(cand_text);
    Tokens ref = tokenize(ref_text);
    double bp = brevity(long(cand.size()), long(ref.size()));
    if (bp == 0.0) return 0.0;
    double log_sum = 0.0;
    for (size_t n = 1; n <= 4; ++n) {
        OrderTally t = clipped(cand, ref, n);
        double p = (t.matches > 0 ? double(t.matches) : 0.1) / double(std::max(t.total, 1L));
        log_sum += std::log(p);
    }
    return 100.0 * bp * std::exp(log_sum / 4.0);
}

double corpus_bleu(const std::vector<EvalPair>& pairs) {
    OrderTally pooled[4];
    long cand_len = 0, ref_len = 0;
    for (const auto& pair : pairs) {
        Tokens cand = tokenize(pair.candidate);
        Tokens ref = tokenize(pair.reference);
        cand_len += long(cand.size());
        ref_len += long(ref.size());
        for (size_t n = 1; n <= 4; ++n) {
            OrderTally t = clipped(cand, ref, n);
            pooled[n - 1].matches += t.matches;
            pooled[n - 1].total += t.total;
        }
    }
    double bp = brevity(cand_len, ref_len);
    if (bp == 0.0) return 0.0;
    double log_sum = 0.0;
    int orders = 0;
    for (const auto& t : pooled) {
        if (t.total == 0) continue;
        if (t.matches == 0) return 0.0;
        log_sum += std::log(double(t.matches) / double(t.total));
        ++orders;
    }
    if (orders == 0) return 0.0;
    return 100.0 * bp * std::exp(log_sum / orders);
}

int lcs_table(const Tokens& a, const Tokens& b) {
    std::vector<std::vector<int>> dp(a.size() + 1, std::vector<int>(b.size() + 1, 0));
    for (size_t i = 1; i <= a.size(); ++i)
        for (size_t j = 1; j <= b.size(); ++j)
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
    return dp[a.size()][b.size()];
}

double rouge_l(const std::string& cand_text, const std::string& ref_text) {
    Tokens cand = tokenize(cand_text);
    Tokens ref = tokenize(ref_text);
    if (cand.empty() || ref.empty()) return 0.0;
    double l = lcs_table(cand, ref);
    double p = l / double(cand.size());
    double r = l / double(ref.size());
    if (p + r == 0.0) return 0.0;
    return 100.0 * 2.0 * p * r / (p + r);
}

// Exhaustive METEOR alignment: walk candidate positions left to right, try
// every unused matching reference position plus the skip branch, keep the
// lexicographically best (exact matches, total matches, -chunks).
struct MeteorSearch {
    const Tokens& cand;
    const Tokens& ref;
    Tokens cand_stem, ref_stem;
    std::vector<int> assign;
    std::vector<bool> used;
    long best_exact = -1, best_total = -1, best_chunks = 0;
    long nodes = 0;

    MeteorSearch(const Tokens& c, const Tokens& r) : cand(c), ref(r) {
        for (const auto& t : cand) cand_stem.push_back(porter_stem(t));
        for (const auto& t : ref) ref_stem.push_back(porter_stem(t));
        assign.assign(cand.size(), -1);
        used.assign(ref.size(), false);
    }

    void finish() {
        long exact = 0, total = 0, chunks = 0;
        int prev_i = -2, prev_j = -2;
        for (size_t i = 0; i < assign.size(); ++i) {
            if (assign[i] < 0) continue;
            ++total;
            if (cand[i] == ref[size_t(assign[i])]) ++exact;
            if (!(int(i) == prev_i + 1 && assign[i] == prev_j + 1)) ++chunks;
            prev_i = int(i);
            prev_j = assign[i];
        }
        if (exact > best_exact || (exact == best_exact && total > best_total) ||
            (exact == best_exact && total == best_total && chunks < best_chunks)) {
            best_exact = exact;
            best_total = total;
            best_chunks = chunks;
        }
    }

    void walk(size_t i) {
        ++nodes;
        REQUIRE(nodes < 40000000L);
        if (i == cand.size()) {
            finish();
            return;
        }
        for (size_t j = 0; j < ref.size(); ++j) {
            if (used[j]) continue;
            if (cand[i] != ref[j] && cand_stem[i] != ref_stem[j]) continue;
            used[j] = true;
            assign[i] = int(j);
            walk(i + 1);
            assign[i] = -1;
            used[j] = false;
        }
        walk(i + 1);
    }
};

double meteor(const std::string& cand_text, const std::string& ref_text) {
    Tokens cand = tokenize(cand_text);
    Tokens ref = tokenize(ref_text);
    if (cand.empty() || ref.empty()) return 0.0;
    MeteorSearch search(cand, ref);
    search.walk(0);
    long m = search.best_total;
    if (m <= 0) return 0.0;
    double p = double(m) / double(cand.size());
    double r = double(m) / double(ref.size());
    double f_mean = 10.0 * p * r / (r + 9.0 * p);
    double frag = double(search.best_chunks) / double(m);
    return 100.0 * f_mean * (1.0 - std::pow(frag, 3.0) * 0.5);
}

std::vector<uint32_t> strip_ws(const std::string& text) {
    std::vector<uint32_t> out;
    for (uint32_t cp : utf8_decode(text)) {
        bool ws = cp == 0x09 || cp == 0x0A || cp == 0x0B || cp == 0x0C || cp == 0x0D ||
                  cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
                  (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
                  cp == 0x202F || cp == 0x205F || cp == 0x3000;
        if (!ws) out.push_back(cp);
    }
    return out;
}

double chrf(const std::string& cand_text, const std::string& ref_text, double beta) {
    auto cand = strip_ws(cand_text);
    auto ref = strip_ws(ref_text);
    double p_sum = 0.0, r_sum = 0.0;
    int orders = 0;
    for (size_t n = 1; n <= 6; ++n) {
        long cand_total = cand.size() >= n ? long(cand.size() - n + 1) : 0;
        long ref_total = ref.size() >= n ? long(ref.size() - n + 1) : 0;
        if (cand_total == 0 && ref_total == 0) continue;
        std::map<std::vector<uint32_t>, int> cand_counts, ref_counts;
        for (long i = 0; i < cand_total; ++i)
            cand_counts[std::vector<uint32_t>(cand.begin() + i, cand.begin() + i + long(n))]++;
        for (long i = 0; i < ref_total; ++i)
            ref_counts[std::vector<uint32_t>(ref.begin() + i, ref.begin() + i + long(n))]++;
        long matches = 0;
        for (const auto& [gram, count] : cand_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matches += std::min(count, it->second);
        }
        if (cand_total > 0) p_sum += double(matches) / double(cand_total);
        if (ref_total > 0) r_sum += double(matches) / double(ref_total);
        ++orders;
    }
    if (orders == 0) return 0.0;
    double p_bar = p_sum / orders;
    double r_bar = r_sum / orders;
    double b2 = beta * beta;
    if (b2 * p_bar + r_bar <= 0.0) return 0.0;
    return 100.0 * (1.0 + b2) * p_bar * r_bar / (b2 * p_bar + r_bar);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double bertscore(const std::vector<std::vector<double>>& cand,
                 const std::vector<std::vector<double>>& ref) {
    double p = 0.0;
    for (const auto& c : cand) {
        double best = -2.0;
        for (const auto& r : ref) best = std::max(best, cosine(c, r));
        p += best;
    }
    p /= double(cand.size());
    double r = 0.0;
    for (const auto& rv : ref) {
        double best = -2.0;
        for (const auto& c : cand) best = std::max(best, cosine(c, rv));
        r += best;
    }
    r /= double(ref.size());
    if (p + r == 0.0) return 0.0;
    double f1 = 2.0 * p * r / (p + r);
    return std::clamp(100.0 * f1, 0.0, 100.0);
}

// Random pair generator. Reference draws cap each stem class at two copies so
// the exhaustive alignment search stays small; stem siblings in the vocab
// exercise the Porter stage.
struct PairGen {
    Rng rng;
    std::vector<std::vector<std::string>> stem_classes = {
        {"cat", "cats"},   {"run", "running"}, {"trade", "traded"}, {"river", "rivers"},
        {"hope", "hoped"}, {"storm"},          {"coin"},            {"empire"},
        {"the"},           {"of"}};

    explicit PairGen(uint64_t seed) : rng(seed) {}

    std::string draw(size_t max_tokens, bool cap_classes) {
        std::vector<size_t> class_use(stem_classes.size(), 0);
        size_t len = rng.next_below(max_tokens + 1);
        std::string out;
        for (size_t i = 0; i < len; ++i) {
            size_t cls = rng.next_below(stem_classes.size());
            if (cap_classes && class_use[cls] >= 2) continue;
            ++class_use[cls];
            const auto& variants = stem_classes[cls];
            if (!out.empty()) out.push_back(' ');
            out += variants[rng.next_below(variants.size())];
        }
        return out;
    }

    EvalPair next() { return {draw(12, false), draw(12, true)}; }
};

} // namespace oracle

TEST_SUITE("metrics") {

TEST_CASE("metric names round trip and accept loose spellings") {
    for (Metric m : {Metric::BLEU4, Metric::ROUGEL, Metric::METEOR, Metric::CHRF,
                     Metric::BERTSCORE})
        CHECK(parse_metric(metric_name(m)) == m);
    CHECK(parse_metric("bleu-4") == Metric::BLEU4);
    CHECK(parse_metric("BLEU-4s") == Metric::BLEU4);
    CHECK(parse_metric("rouge_l") == Metric::ROUGEL);
    CHECK(parse_metric("chrf") == Metric::CHRF);
    CHECK_THROWS_AS(parse_metric("cider"), UsageError);
}

TEST_CASE("bleu worked fixture: 5 of 6 tokens") {
    auto score = bleu4({{"the cat sat on mat", "the cat sat on the mat"}});
    // p = 5/5, 3/4, 2/3, 1/2; bp = e^(1 - 6/5)
    double expected =
        100.0 * std::exp(1.0 - 6.0 / 5.0) *
        std::exp((std::log(1.0) + std::log(0.75) + std::log(2.0 / 3.0) + std::log(0.5)) / 4.0);
    CHECK(score.value == doctest::Approx(57.9).epsilon(0.001));
    CHECK(std::abs(score.value - expected) < 1e-9);
    CHECK(score.detail.at("p1") == doctest::Approx(1.0));
    CHECK(score.detail.at("p4") == doctest::Approx(0.5));
    CHECK(score.detail.at("bp") == doctest::Approx(std::exp(-0.2)));
}

TEST_CASE("corpus bleu pools counts across pairs") {
    std::vector<EvalPair> pairs = {{"the cat sat", "the cat sat"},
                                   {"a dog barks loudly", "a dog barked loudly"}};
    auto score = bleu4(pairs);
    CHECK(std::abs(score.value - oracle::corpus_bleu(pairs)) < 1e-9);
    // pooling differs from averaging the two sentence scores
    double avg = (bleu4({pairs[0]}).value + bleu4({pairs[1]}).value) / 2.0;
    CHECK(score.value != doctest::Approx(avg).epsilon(1e-6));
}

TEST_CASE("short identical texts score 100 because empty orders drop out") {
    CHECK(bleu4({{"two words", "two words"}}).value == doctest::Approx(100.0));
    CHECK(bleu4({{"one", "one"}}).value == doctest::Approx(100.0));
}

TEST_CASE("corpus bleu edge cases") {
    CHECK_THROWS_AS(bleu4({}), DataError);
    CHECK(bleu4({{"", "the ref"}}).value == 0.0);
    CHECK(bleu4({{"zero overlap here", "completely different words"}}).value == 0.0);
}

TEST_CASE("rouge worked fixture: a b c d vs a c b d") {
    auto score = rouge_l({"a b c d", "a c b d"});
    CHECK(score.value == doctest::Approx(75.0));
    CHECK(score.detail.at("lcs") == 3.0);
    CHECK(score.detail.at("p") == doctest::Approx(0.75));
    CHECK(score.detail.at("r") == doctest::Approx(0.75));
}

TEST_CASE("meteor worked fixture: identical three tokens") {
    auto score = meteor({"the cat sat", "the cat sat"});
    double penalty = 0.5 * std::pow(1.0 / 3.0, 3.0);
    CHECK(score.value == doctest::Approx(100.0 * (1.0 - penalty)));
    CHECK(score.value == doctest::Approx(98.1481).epsilon(0.0001));
    CHECK(score.detail.at("m") == 3.0);
    CHECK(score.detail.at("chunks") == 1.0);
}

TEST_CASE("meteor worked fixture: swapped order costs a chunk") {
    auto score = meteor({"sat the cat", "the cat sat"});
    double penalty = 0.5 * std::pow(2.0 / 3.0, 3.0);
    CHECK(score.value == doctest::Approx(100.0 * (1.0 - penalty)));
    CHECK(score.value == doctest::Approx(85.1852).epsilon(0.0001));
    CHECK(score.detail.at("chunks") == 2.0);
}

TEST_CASE("meteor stem stage matches inflected forms") {
    auto score = meteor({"the cats running", "the cat runs"});
    CHECK(score.detail.at("m") == 3.0);
    CHECK(score.value > 0.0);
}

TEST_CASE("chrf worked fixture: abc vs abd") {
    auto score = chrf({"abc", "abd"});
    double p_bar = (2.0 / 3.0 + 0.5 + 0.0) / 3.0;
    CHECK(score.value == doctest::Approx(100.0 * 5.0 * p_bar * p_bar / (5.0 * p_bar)));
    CHECK(score.value == doctest::Approx(38.8889).epsilon(0.0001));
    CHECK(score.detail.at("orders") == 3.0);
    CHECK(score.detail.at("p1") == doctest::Approx(2.0 / 3.0));
    CHECK(score.detail.at("p3") == 0.0);
}

TEST_CASE("chrf ignores whitespace and validates beta") {
    CHECK(chrf({"a b c", "abc"}).value == doctest::Approx(100.0));
    CHECK_THROWS_AS(chrf({"a", "a"}, 0.0), UsageError);
    CHECK_THROWS_AS(chrf({"a", "a"}, -1.0), UsageError);
}

TEST_CASE("chrf swap symmetry at beta 1, p/r exchange at beta 2") {
    EvalPair pair{"alpha beta gamma", "alpha delta"};
    EvalPair swapped{pair.reference, pair.candidate};
    CHECK(chrf(pair, 1.0).value == doctest::Approx(chrf(swapped, 1.0).value).epsilon(1e-12));
    auto fwd = chrf(pair);
    auto rev = chrf(swapped);
    CHECK(fwd.detail.at("p_bar") == doctest::Approx(rev.detail.at("r_bar")).epsilon(1e-12));
    CHECK(fwd.detail.at("r_bar") == doctest::Approx(rev.detail.at("p_bar")).epsilon(1e-12));
}

TEST_CASE("bertscore worked fixture") {
    std::vector<std::vector<double>> cand = {{1.0, 0.0}, {0.0, 1.0}};
    double h = std::sqrt(2.0) / 2.0;
    std::vector<std::vector<double>> ref = {{1.0, 0.0}, {h, h}};
    auto score = bertscore_greedy(cand, ref);
    double pr = (1.0 + h) / 2.0;
    CHECK(score.detail.at("p") == doctest::Approx(pr).epsilon(1e-12));
    CHECK(score.detail.at("r") == doctest::Approx(pr).epsilon(1e-12));
    CHECK(score.value == doctest::Approx(85.3553).epsilon(0.0001));
}

TEST_CASE("bertscore input validation") {
    std::vector<std::vector<double>> ok = {{1.0, 0.0}};
    CHECK_THROWS_AS(bertscore_greedy({}, ok), DataError);
    CHECK_THROWS_AS(bertscore_greedy(ok, {}), DataError);
    CHECK_THROWS_AS(bertscore_greedy(ok, {{1.0, 0.0, 0.0}}), DataError);
    CHECK_THROWS_AS(bertscore_greedy(ok, {{0.0, 0.0}}), DataError);
}

TEST_CASE("bertscore_pair embeds tokens and is 100 on identical text") {
    HashedEmbedder embedder(32);
    CHECK(bertscore_pair({"the same words", "the same words"}, embedder).value ==
          doctest::Approx(100.0));
    CHECK(bertscore_pair({"", "words"}, embedder).value == 0.0);
    auto differing = bertscore_pair({"rivers flow east", "markets trade goods"}, embedder);
    CHECK(differing.value < 100.0);
    CHECK(differing.value >= 0.0);
}

TEST_CASE("random pairs match the brute-force oracles") {
    oracle::PairGen gen(101);
    for (int trial = 0; trial < 150; ++trial) {
        EvalPair pair = gen.next();
        CAPTURE(pair.candidate);
        CAPTURE(pair.reference);
        CHECK(std::abs(bleu4_sentence(pair).value -
                       oracle::sentence_bleu(pair.candidate, pair.reference)) < 1e-9);
        CHECK(std::abs(rouge_l(pair).value -
                       oracle::rouge_l(pair.candidate, pair.reference)) < 1e-9);
        CHECK(std::abs(meteor(pair).value -
                       oracle::meteor(pair.candidate, pair.reference)) < 1e-9);
        CHECK(std::abs(chrf(pair).value -
                       oracle::chrf(pair.candidate, pair.reference, 2.0)) < 1e-9);
    }
}

TEST_CASE("random corpora match the pooled bleu oracle") {
    oracle::PairGen gen(102);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<EvalPair> pairs;
        size_t n = 1 + gen.rng.next_below(6);
        for (size_t i = 0; i < n; ++i) pairs.push_back(gen.next());
        CHECK(std::abs(bleu4(pairs).value - oracle::corpus_bleu(pairs)) < 1e-9);
    }
}

TEST_CASE("bertscore greedy matches the exhaustive cosine oracle") {
    Rng rng(103);
    for (int trial = 0; trial < 60; ++trial) {
        size_t dim = 2 + rng.next_below(6);
        auto draw = [&](size_t rows) {
            std::vector<std::vector<double>> m(rows, std::vector<double>(dim));
            for (auto& row : m) {
                double norm = 0.0;
                while (norm < 1e-6) {
                    norm = 0.0;
                    for (auto& x : row) {
                        x = rng.next_gaussian();
                        norm += x * x;
                    }
                }
            }
            return m;
        };
        auto cand = draw(1 + rng.next_below(8));
        auto ref = draw(1 + rng.next_below(8));
        CHECK(std::abs(bertscore_greedy(cand, ref).value - oracle::bertscore(cand, ref)) <
              1e-9);
    }
}

TEST_CASE("identity and disjoint invariants") {
    oracle::PairGen gen(104);
    for (int trial = 0; trial < 50; ++trial) {
        std::string text = gen.draw(10, false);
        if (tokenize(text).empty()) continue;
        EvalPair self{text, text};
        CAPTURE(text);
        CHECK(bleu4({self}).value == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(rouge_l(self).value == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(chrf(self).value == doctest::Approx(100.0).epsilon(1e-12));
    }
    EvalPair disjoint{"alpha beta gamma", "delta epsilon zeta"};
    CHECK(bleu4({disjoint}).value == 0.0);
    CHECK(rouge_l(disjoint).value == 0.0);
    CHECK(meteor(disjoint).value == 0.0);
    EvalPair char_disjoint{"aaa bbb", "ccc ddd"};
    CHECK(chrf(char_disjoint).value == 0.0);
}

TEST_CASE("values stay in range on random input") {
    oracle::PairGen gen(105);
    for (int trial = 0; trial < 80; ++trial) {
        EvalPair pair = gen.next();
        if (tokenize(pair.candidate).empty() || tokenize(pair.reference).empty()) continue;
        for (double v : {bleu4_sentence(pair).value, rouge_l(pair).value, meteor(pair).value,
                         chrf(pair).value}) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0 + 1e-9);
        }
    }
}

TEST_CASE("token-irrelevant whitespace does not change token metrics") {
    EvalPair base{"the cat sat on the mat", "a cat sat on a mat"};
    EvalPair spaced{"  the   cat sat on the mat ", "a cat  sat on a mat"};
    CHECK(bleu4_sentence(base).value == bleu4_sentence(spaced).value);
    CHECK(rouge_l(base).value == rouge_l(spaced).value);
    CHECK(meteor(base).value == meteor(spaced).value);
    CHECK(chrf(base).value == chrf(spaced).value);
}

TEST_CASE("evaluate_corpus resolves gold by record id and macro-averages") {
    std::vector<ContextRecord> gold = {
        {"r1", "ctx one", "the cat sat on the mat", Subject::Science},
        {"r2", "ctx two", "rivers carry silt downstream", Subject::Geography},
    };
    std::vector<GeneratedQuestion> questions(2);
    questions[0].record_id = "r2";
    questions[0].question_text = "rivers carry silt downstream";
    questions[1].record_id = "r1";
    questions[1].question_text = "the cat sat on mat";

    HashedEmbedder embedder(32);
    auto eval = evaluate_corpus(questions, gold, embedder);
    REQUIRE(eval.items.size() == 2);
    CHECK(eval.items[0].record_id == "r2");
    CHECK(eval.items[1].record_id == "r1");

    for (Metric m : {Metric::ROUGEL, Metric::METEOR, Metric::CHRF, Metric::BERTSCORE}) {
        double mean = (eval.items[0].values.at(m) + eval.items[1].values.at(m)) / 2.0;
        CHECK(eval.corpus.at(m).value == doctest::Approx(mean).epsilon(1e-12));
    }
    // corpus BLEU is pooled, not the mean of the per-item smoothed values
    std::vector<EvalPair> pairs = {{"rivers carry silt downstream", gold[1].question},
                                   {"the cat sat on mat", gold[0].question}};
    CHECK(eval.corpus.at(Metric::BLEU4).value == doctest::Approx(bleu4(pairs).value));
    CHECK(eval.items[1].values.at(Metric::BLEU4) ==
          doctest::Approx(bleu4_sentence({"the cat sat on mat", gold[0].question}).value));
}

TEST_CASE("evaluate_corpus input errors") {
    HashedEmbedder embedder(16);
    std::vector<ContextRecord> gold = {{"r1", "c", "q", Subject::Other}};
    CHECK_THROWS_AS(evaluate_corpus({}, gold, embedder), DataError);
    GeneratedQuestion orphan;
    orphan.record_id = "missing";
    orphan.question_text = "what?";
    CHECK_THROWS_WITH_AS(evaluate_corpus({orphan}, gold, embedder),
                         doctest::Contains("missing"), DataError);
}

TEST_CASE("per-item csv round trips") {
    std::vector<ItemScores> items(2);
    items[0].record_id = "r1";
    items[0].values = {{Metric::BLEU4, 13.134549472120794},
                       {Metric::ROUGEL, 62.5},
                       {Metric::METEOR, 75.625},
                       {Metric::CHRF, 72.67286218915633},
                       {Metric::BERTSCORE, 69.97615840840167}};
    items[1].record_id = "r2";
    items[1].values = {{Metric::BLEU4, 0.0},
                       {Metric::ROUGEL, 100.0},
                       {Metric::METEOR, 98.14814814814815},
                       {Metric::CHRF, 100.0},
                       {Metric::BERTSCORE, 100.0}};
    std::string csv = items_to_csv(items);
    CHECK(csv.find("record_id,metric,value") == 0);
    CHECK(csv.find("BLEU-4s") != std::string::npos);
    auto back = items_from_csv(csv, "test");
    REQUIRE(back.size() == 2);
    CHECK(back[0].record_id == "r1");
    for (const auto& [metric, value] : items[0].values)
        CHECK(back[0].values.at(metric) == value);
    for (const auto& [metric, value] : items[1].values)
        CHECK(back[1].values.at(metric) == value);
    CHECK_THROWS_AS(items_from_csv("wrong,header\n", "test"), DataError);
}

} // TEST_SUITE("metrics")
