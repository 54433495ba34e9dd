#pragma once

#include <map>
#include <string>
#include <vector>

#include "aqg/dataset.hpp"
#include "aqg/embedding.hpp"
#include "aqg/generation.hpp"

namespace aqg {

enum class Metric { BLEU4, ROUGEL, METEOR, CHRF, BERTSCORE };

// Canonical display names: "BLEU-4", "ROUGE-L", "METEOR", "ChRF", "BERTScore".
const char* metric_name(Metric m);
Metric parse_metric(const std::string& name);

struct EvalPair {
    std::string candidate;  // generated question
    std::string reference;  // gold question
};

struct MetricScore {
    Metric metric = Metric::BLEU4;
    double value = 0.0;  // 0..100
    std::map<std::string, double> detail;
};

// Corpus-level BLEU-4: clipped n-gram counts pooled over all pairs, geometric
// mean of p1..p4, brevity penalty. No smoothing; a pooled zero precision
// zeroes the score. Orders with no candidate n-grams anywhere are left out of
// the mean so short identical texts still score 100.
MetricScore bleu4(const std::vector<EvalPair>& pairs);

// Sentence-level variant with add-epsilon smoothing (0.1 on zero counts),
// used for per-item score columns. Labeled "BLEU-4s" wherever serialized.
MetricScore bleu4_sentence(const EvalPair& pair);

// Token LCS, F1 with beta = 1.
MetricScore rouge_l(const EvalPair& pair);

// Unigram matching in two stages, exact then Porter-stemmed, with the
// fragmentation penalty 0.5 * (chunks/m)^3 over the minimal-chunk alignment.
// No synonym stage (reports flag this variant as METEOR-es).
MetricScore meteor(const EvalPair& pair);

// Character n-grams of orders 1..6 over whitespace-stripped codepoints,
// averaged over orders that have any n-grams, F-beta with beta = 2.
MetricScore chrf(const EvalPair& pair, double beta = 2.0);

// Greedy matching over token vectors: precision is the candidate-side mean of
// best cosines, recall the reference-side mean, value 100 * F1 clamped to
// [0,100]. No baseline rescaling, no idf weighting.
MetricScore bertscore_greedy(const std::vector<std::vector<double>>& cand_vectors,
                             const std::vector<std::vector<double>>& ref_vectors);

// Tokenizes both sides and embeds each token before greedy matching.
MetricScore bertscore_pair(const EvalPair& pair, const TokenEmbedder& embedder);

struct ItemScores {
    std::string record_id;
    // Per-item values; the BLEU4 entry holds the smoothed sentence variant.
    std::map<Metric, double> values;
};

struct CorpusEvaluation {
    std::map<Metric, MetricScore> corpus;  // BLEU-4 pooled; the rest macro-averaged
    std::vector<ItemScores> items;
};

// Pairs every generated question with its gold record by record_id and scores
// all five metrics. Per-item rows feed the significance tests downstream.
CorpusEvaluation evaluate_corpus(const std::vector<GeneratedQuestion>& questions,
                                 const std::vector<ContextRecord>& gold,
                                 const TokenEmbedder& embedder);

// CSV round trip: header "record_id,metric,value", one row per item metric.
std::string items_to_csv(const std::vector<ItemScores>& items);
std::vector<ItemScores> items_from_csv(const std::string& text, const std::string& source);

} // namespace aqg
