#include "aqg/prompting.hpp"

#include <algorithm>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

const char* method_name(Method m) {
    switch (m) {
    case Method::Baseline: return "baseline";
    case Method::ICL: return "icl";
    case Method::RAG: return "rag";
    case Method::Hybrid: return "hybrid";
    }
    return "baseline";
}

Method parse_method(const std::string& name) {
    std::string n = to_lower_ascii(trim(name));
    if (n == "baseline") return Method::Baseline;
    if (n == "icl") return Method::ICL;
    if (n == "rag") return Method::RAG;
    if (n == "hybrid") return Method::Hybrid;
    throw UsageError("unknown method \"" + name + "\" (expected baseline|icl|rag|hybrid)");
}

const char* selection_strategy_name(SelectionStrategy s) {
    return s == SelectionStrategy::StratifiedRandom ? "stratified_random" : "similarity_top_m";
}

SelectionStrategy parse_selection_strategy(const std::string& name) {
    std::string n = to_lower_ascii(trim(name));
    if (n == "stratified_random" || n == "stratified") return SelectionStrategy::StratifiedRandom;
    if (n == "similarity_top_m" || n == "similarity") return SelectionStrategy::SimilarityTopM;
    throw UsageError("unknown selection strategy \"" + name + "\"");
}

void PipelineConfig::validate() const {
    switch (method) {
    case Method::Baseline:
        break;
    case Method::ICL:
        if (icl_shots < 1) throw UsageError("icl requires icl_shots >= 1");
        break;
    case Method::RAG:
        if (retrieval_k < 1) throw UsageError("rag requires retrieval_k >= 1");
        break;
    case Method::Hybrid:
        if (retrieval_k < 1) throw UsageError("hybrid requires retrieval_k >= 1");
        if (hybrid_shots < 1) throw UsageError("hybrid requires hybrid_shots >= 1");
        break;
    }
}

int PipelineConfig::shots() const {
    if (method == Method::ICL) return icl_shots;
    if (method == Method::Hybrid) return hybrid_shots;
    return 0;
}

// --- PromptTemplate ---

namespace {

// Shared across methods so the RAG and Hybrid prompts degrade exactly to the
// baseline / ICL forms when no documents are retrieved.
constexpr const char* kBuiltInTemplate =
    "You are given educational material. Write exactly one question for the final passage.\n"
    "\n"
    "{examples}{contexts}Passage: {passage}\n"
    "Question:";

size_t count_occurrences(const std::string& text, const std::string& needle) {
    size_t count = 0;
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string replace_once(std::string text, const std::string& placeholder,
                         const std::string& value) {
    size_t pos = text.find(placeholder);
    if (pos != std::string::npos) text.replace(pos, placeholder.size(), value);
    return text;
}

} // namespace

PromptTemplate PromptTemplate::built_in() { return from_text(kBuiltInTemplate); }

PromptTemplate PromptTemplate::from_text(const std::string& text) {
    if (count_occurrences(text, "{passage}") != 1)
        throw UsageError("prompt template must contain {passage} exactly once");
    for (const char* ph : {"{examples}", "{contexts}"}) {
        size_t n = count_occurrences(text, ph);
        if (n > 1) throw UsageError(std::string("prompt template contains ") + ph + " twice");
        if (n == 1 && text.find(ph) > text.find("{passage}"))
            throw UsageError(std::string("prompt template places ") + ph + " after {passage}");
    }
    PromptTemplate tpl;
    tpl.text_ = text;
    tpl.id_ = "tpl-" + hex64(fnv1a64(text));
    return tpl;
}

PromptTemplate PromptTemplate::from_file(const std::string& path) {
    return from_text(read_file(path));
}

// --- Example selection ---

uint64_t derive_record_seed(uint64_t run_seed, const std::string& record_id) {
    return Rng(run_seed ^ fnv1a64(record_id)).next_u64();
}

std::vector<FewShotExample> select_examples(const std::vector<ContextRecord>& train, int count,
                                            SelectionStrategy strategy, uint64_t seed,
                                            const ContextRecord& target) {
    if (count < 1) throw UsageError("example count must be >= 1");
    if (train.empty()) throw UsageError("training set is empty");

    std::vector<const ContextRecord*> eligible;
    eligible.reserve(train.size());
    for (const auto& rec : train)
        if (rec.id != target.id) eligible.push_back(&rec);
    if (static_cast<size_t>(count) > eligible.size())
        throw UsageError("requested " + std::to_string(count) + " examples but only " +
                         std::to_string(eligible.size()) + " eligible training records exist");

    std::vector<const ContextRecord*> picked;
    if (strategy == SelectionStrategy::StratifiedRandom) {
        std::vector<const ContextRecord*> same, other;
        for (const auto* rec : eligible)
            (rec->subject == target.subject ? same : other).push_back(rec);
        Rng rng(seed);
        rng.shuffle(same);
        rng.shuffle(other);
        for (const auto* rec : same) {
            if (picked.size() == static_cast<size_t>(count)) break;
            picked.push_back(rec);
        }
        for (const auto* rec : other) {
            if (picked.size() == static_cast<size_t>(count)) break;
            picked.push_back(rec);
        }
    } else {
        // BM25 similarity of training passages to the target passage; docs
        // that share no term still rank (score 0) after all scored ones.
        std::vector<CorpusDoc> docs;
        docs.reserve(eligible.size());
        for (const auto* rec : eligible) docs.push_back({rec->id, rec->context, ""});
        auto index = LexicalIndex::build(docs);
        auto ranked = index.retrieve(target.context, count);

        std::vector<std::string> chosen_ids;
        for (const auto& r : ranked) chosen_ids.push_back(r.doc.doc_id);
        if (chosen_ids.size() < static_cast<size_t>(count)) {
            std::vector<std::string> rest;
            for (const auto* rec : eligible) {
                if (std::find(chosen_ids.begin(), chosen_ids.end(), rec->id) ==
                    chosen_ids.end())
                    rest.push_back(rec->id);
            }
            std::sort(rest.begin(), rest.end());
            for (const auto& id : rest) {
                if (chosen_ids.size() == static_cast<size_t>(count)) break;
                chosen_ids.push_back(id);
            }
        }
        for (const auto& id : chosen_ids) {
            auto it = std::find_if(eligible.begin(), eligible.end(),
                                   [&](const ContextRecord* r) { return r->id == id; });
            picked.push_back(*it);
        }
    }

    std::vector<FewShotExample> out;
    out.reserve(picked.size());
    for (const auto* rec : picked) out.push_back({rec->context, rec->question});
    return out;
}

// --- Assembly ---

namespace {

std::string render_examples(const std::vector<FewShotExample>& examples) {
    std::string out;
    for (const auto& ex : examples) {
        out += "Passage: " + ex.passage + "\n";
        out += "Question: " + ex.question + "\n\n";
    }
    return out;
}

std::string render_contexts(const std::vector<RetrievedDoc>& retrieved) {
    std::string out;
    for (const auto& doc : retrieved) {
        out += "Context [" + std::to_string(doc.rank) + "] (" + doc.doc.doc_id +
               "): " + doc.doc.text + "\n\n";
    }
    return out;
}

PromptBundle finish_bundle(Method method, std::string target_passage,
                           std::vector<FewShotExample> examples,
                           std::vector<RetrievedDoc> retrieved, const PromptTemplate& tpl) {
    PromptBundle bundle;
    bundle.method = method;
    bundle.target_passage = std::move(target_passage);
    bundle.examples = std::move(examples);
    bundle.retrieved = std::move(retrieved);

    std::string text = tpl.text();
    text = replace_once(text, "{examples}", render_examples(bundle.examples));
    text = replace_once(text, "{contexts}", render_contexts(bundle.retrieved));
    text = replace_once(text, "{passage}", bundle.target_passage);
    bundle.rendered_text = text;

    uint64_t h = fnv1a64(method_name(method));
    h = fnv1a64_mix(h, "\x1f" + tpl.id());
    h = fnv1a64_mix(h, "\x1f" + bundle.rendered_text);
    bundle.prompt_hash = h;
    return bundle;
}

} // namespace

PromptBundle assemble_baseline_prompt(const std::string& target_passage,
                                      const PromptTemplate& tpl) {
    return finish_bundle(Method::Baseline, target_passage, {}, {}, tpl);
}

PromptBundle assemble_icl_prompt(const std::vector<FewShotExample>& examples,
                                 const std::string& target_passage, const PromptTemplate& tpl) {
    if (examples.empty()) throw UsageError("icl prompt requires at least one example");
    for (const auto& ex : examples)
        if (trim(ex.passage).empty() || trim(ex.question).empty())
            throw DataError("few-shot example with empty passage or question");
    return finish_bundle(Method::ICL, target_passage, examples, {}, tpl);
}

PromptBundle assemble_rag_input(const std::string& target_passage,
                                const std::vector<RetrievedDoc>& retrieved,
                                const PromptTemplate& tpl) {
    return finish_bundle(Method::RAG, target_passage, {}, retrieved, tpl);
}

PromptBundle assemble_hybrid_prompt(const std::string& target_passage,
                                    const std::vector<RetrievedDoc>& retrieved,
                                    const std::vector<FewShotExample>& examples,
                                    const PromptTemplate& tpl) {
    if (examples.empty()) throw UsageError("hybrid prompt requires at least one example");
    return finish_bundle(Method::Hybrid, target_passage, examples, retrieved, tpl);
}

PromptBundle enforce_token_budget(PromptBundle bundle, const PromptTemplate& tpl,
                                  size_t token_budget) {
    while (!bundle.retrieved.empty() && tokenize(bundle.rendered_text).size() > token_budget) {
        auto retrieved = bundle.retrieved;
        retrieved.pop_back();
        bundle = finish_bundle(bundle.method, bundle.target_passage, bundle.examples, retrieved,
                               tpl);
    }
    return bundle;
}

} // namespace aqg
