#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aqg/dataset.hpp"
#include "aqg/retrieval.hpp"

namespace aqg {

enum class Method { Baseline, ICL, RAG, Hybrid };

const char* method_name(Method m);
Method parse_method(const std::string& name);

enum class SelectionStrategy { StratifiedRandom, SimilarityTopM };

const char* selection_strategy_name(SelectionStrategy s);
SelectionStrategy parse_selection_strategy(const std::string& name);

struct FewShotExample {
    std::string passage;
    std::string question;
};

struct PipelineConfig {
    Method method = Method::Baseline;
    int icl_shots = 0;     // few-shot count for ICL
    int retrieval_k = 0;   // retrieved-document count for RAG / Hybrid
    int hybrid_shots = 0;  // few-shot count for Hybrid
    uint64_t seed = 0;
    SelectionStrategy selection_strategy = SelectionStrategy::StratifiedRandom;

    // ICL needs icl_shots >= 1; RAG needs retrieval_k >= 1; Hybrid needs both
    // retrieval_k >= 1 and hybrid_shots >= 1. Throws UsageError otherwise.
    void validate() const;

    // Shots in effect for this method (0 for Baseline / RAG).
    int shots() const;
};

// Template text with placeholders {examples}, {contexts}, {passage}.
// {passage} must appear exactly once; {examples} and {contexts} at most once
// and before it. The id is a content hash, recorded in every generated
// question for provenance.
class PromptTemplate {
  public:
    static PromptTemplate built_in();
    static PromptTemplate from_text(const std::string& text);
    static PromptTemplate from_file(const std::string& path);

    const std::string& text() const { return text_; }
    const std::string& id() const { return id_; }

  private:
    std::string text_;
    std::string id_;
};

// The fully assembled generation input for one method.
struct PromptBundle {
    Method method = Method::Baseline;
    std::string target_passage;
    std::vector<FewShotExample> examples;
    std::vector<RetrievedDoc> retrieved;
    std::string rendered_text;
    uint64_t prompt_hash = 0; // hash(method || template id || rendered_text)
};

// Few-shot exemplar selection. The target's own record (by id) is never
// selected. StratifiedRandom draws preferentially from the target's subject,
// topping up from other subjects, deterministically for a given seed.
// SimilarityTopM takes the `count` most BM25-similar training passages.
std::vector<FewShotExample> select_examples(const std::vector<ContextRecord>& train, int count,
                                            SelectionStrategy strategy, uint64_t seed,
                                            const ContextRecord& target);

PromptBundle assemble_baseline_prompt(const std::string& target_passage,
                                      const PromptTemplate& tpl);

// Instruction header, one Passage/Question block per example in selection
// order, then the target passage with an empty question slot last.
PromptBundle assemble_icl_prompt(const std::vector<FewShotExample>& examples,
                                 const std::string& target_passage, const PromptTemplate& tpl);

// Retrieved docs in rank order, each under a source marker, then the target
// passage. With no retrieved docs this degrades to the baseline form.
PromptBundle assemble_rag_input(const std::string& target_passage,
                                const std::vector<RetrievedDoc>& retrieved,
                                const PromptTemplate& tpl);

// Few-shot blocks, then retrieved-context blocks, then the target passage.
// With no retrieved docs this reduces to the ICL prompt text.
PromptBundle assemble_hybrid_prompt(const std::string& target_passage,
                                    const std::vector<RetrievedDoc>& retrieved,
                                    const std::vector<FewShotExample>& examples,
                                    const PromptTemplate& tpl);

// Drops lowest-rank retrieved docs until the rendered prompt fits the token
// budget, re-rendering after each drop. Examples and the passage are kept.
PromptBundle enforce_token_budget(PromptBundle bundle, const PromptTemplate& tpl,
                                  size_t token_budget);

// Per-record seed derivation: all run randomness flows from the single run
// seed; each target gets an independent deterministic stream.
uint64_t derive_record_seed(uint64_t run_seed, const std::string& record_id);

} // namespace aqg
