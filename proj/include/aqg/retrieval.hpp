#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace aqg {

// A scored external document standing in for the dense retrieval module at
// desk scale. The lexical BM25 backend is the default; dense_retrieve covers
// the embedding-vector route behind the same result contract.

struct CorpusDoc {
    std::string doc_id;
    std::string text;
    std::string source;

    bool operator==(const CorpusDoc&) const = default;
};

struct RetrievedDoc {
    CorpusDoc doc;
    double score = 0.0;
    int rank = 0; // 1-based; scores non-increasing by rank, ties by doc_id
};

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

class LexicalIndex {
  public:
    LexicalIndex() = default;

    // Duplicate doc_ids are rejected. Query results do not depend on the
    // insertion order of `docs`.
    static LexicalIndex build(const std::vector<CorpusDoc>& docs, Bm25Params params = {});

    // Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)).
    // Unknown doc_id is an error; 0 when no query term occurs in the doc.
    double bm25_score(const std::vector<std::string>& query_terms,
                      const std::string& doc_id) const;

    // Top-k docs for a passage, score descending, ties by ascending doc_id,
    // zero-score docs excluded. k < 1 is an error.
    std::vector<RetrievedDoc> retrieve(const std::string& passage, int k) const;

    size_t doc_count() const { return docs_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const std::vector<CorpusDoc>& docs() const { return docs_; }
    const Bm25Params& params() const { return params_; }

    bool has_doc(const std::string& doc_id) const { return doc_index_.count(doc_id) > 0; }

  private:
    struct Posting {
        uint32_t doc;      // index into docs_
        uint32_t term_freq;
    };

    double score_doc(const std::vector<std::string>& terms, uint32_t doc) const;

    std::vector<CorpusDoc> docs_;                 // sorted by doc_id
    std::vector<uint32_t> doc_lengths_;           // token counts, parallel to docs_
    std::unordered_map<std::string, uint32_t> doc_index_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
};

// Exact exhaustive cosine search over stored vectors; same tie rule as
// LexicalIndex::retrieve. All vectors must share one dimension and have
// nonzero norm.
std::vector<RetrievedDoc> dense_retrieve(
    const std::map<std::string, std::vector<double>>& doc_vectors,
    const std::vector<double>& query_vector, int k);

// --- Corpus ingestion ---
//
// Corpus files are plain UTF-8 text; blank lines separate documents. Blocks
// longer than max_tokens are split at sentence boundaries (hard-split when a
// single sentence exceeds the budget). Directory ingestion recurses over
// *.txt in sorted path order, so doc ids are stable across runs.
std::vector<CorpusDoc> chunk_corpus_text(const std::string& text, const std::string& source,
                                         size_t max_tokens = 200);
std::vector<CorpusDoc> load_corpus_dir(const std::string& dir, size_t max_tokens = 200);

// --- Persistence ---
//
// Line-based file: a versioned magic header, then one JSON doc per line.
// Loading rebuilds postings deterministically.
std::string serialize_index(const LexicalIndex& index);
LexicalIndex parse_index(const std::string& data);
void save_index_file(const LexicalIndex& index, const std::string& path);
LexicalIndex load_index_file(const std::string& path);

} // namespace aqg
