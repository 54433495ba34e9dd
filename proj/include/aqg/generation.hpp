#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aqg/cache.hpp"
#include "aqg/dataset.hpp"
#include "aqg/prompting.hpp"
#include "aqg/provider.hpp"
#include "aqg/retrieval.hpp"

namespace aqg {

struct GeneratedQuestion {
    std::string record_id;
    Method method = Method::Baseline;
    std::string question_text;
    uint64_t prompt_hash = 0;
    std::string provider_id;
    std::string template_id;
    int64_t timestamp = 0;    // cache-entry creation time, so reruns serialize identically
    bool from_cache = false;  // runtime only, never serialized
};

// First non-empty line of the raw completion, stripped of a leading
// "Question:" label, internal whitespace collapsed. A blank result is a
// DataError naming the record.
std::string extract_question(const std::string& raw, const std::string& record_id);

// One completion for the bundle, resolved through the cache when available.
// A cache hit performs no provider call and sets from_cache.
GeneratedQuestion generate(const std::string& record_id, const PromptBundle& bundle,
                           const std::string& template_id, const GenerationParams& params,
                           Provider& provider, GenerationCache* cache);

// Deterministic provider-free path used by CI and the acceptance checks.
GeneratedQuestion mock_generate(const PromptBundle& bundle, const std::string& record_id = "");

// JSONL round trip for generated questions. from_cache is runtime state and
// is deliberately absent from the serialized form.
std::string serialize_question(const GeneratedQuestion& q);
std::string serialize_questions(const std::vector<GeneratedQuestion>& questions);
std::vector<GeneratedQuestion> parse_questions(const std::string& text, const std::string& source);
std::vector<GeneratedQuestion> load_questions_file(const std::string& path);

// Everything run_experiment needs besides the test split itself.
struct ExperimentContext {
    const std::vector<ContextRecord>* train = nullptr;  // example pool for ICL / Hybrid
    const LexicalIndex* index = nullptr;                // corpus index for RAG / Hybrid
    PromptTemplate tmpl = PromptTemplate::built_in();
    GenerationCache* cache = nullptr;
    std::string out_dir;     // when set, questions.jsonl and manifest.json land here
    std::string train_hash;  // dataset fingerprints recorded in the manifest
    std::string test_hash;
    int max_in_flight = 4;
    double failure_threshold = 0.05;
    size_t token_budget = 3000;  // 0 disables prompt truncation
};

// Assembles the method-appropriate prompt for one record, seeded per record
// so example selection is independent of processing order.
PromptBundle build_bundle(const ContextRecord& record, const PipelineConfig& config,
                          const ExperimentContext& ctx);

struct ExperimentResult {
    std::vector<GeneratedQuestion> questions;                    // input order; failed records skipped
    std::vector<std::pair<std::string, std::string>> failures;   // record_id, error text
    std::string questions_path;
    std::string manifest_path;
};

// Generates one question per test record with bounded concurrency, writes
// questions.jsonl plus a manifest when out_dir is set, and fails the run only
// when the failure fraction exceeds ctx.failure_threshold.
ExperimentResult run_experiment(const std::vector<ContextRecord>& test,
                                const PipelineConfig& config, const GenerationParams& params,
                                Provider& provider, const ExperimentContext& ctx);

// Stable fingerprint of a dataset split, recorded in run manifests.
std::string dataset_hash(const std::vector<ContextRecord>& records);

} // namespace aqg
