#include "aqg/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

using json = nlohmann::json;
namespace fs = std::filesystem;

LexicalIndex LexicalIndex::build(const std::vector<CorpusDoc>& docs, Bm25Params params) {
    LexicalIndex index;
    index.params_ = params;
    index.docs_ = docs;
    std::sort(index.docs_.begin(), index.docs_.end(),
              [](const CorpusDoc& a, const CorpusDoc& b) { return a.doc_id < b.doc_id; });
    for (size_t i = 1; i < index.docs_.size(); ++i) {
        if (index.docs_[i].doc_id == index.docs_[i - 1].doc_id)
            throw DataError("duplicate doc_id \"" + index.docs_[i].doc_id + "\"");
    }

    uint64_t total_len = 0;
    index.doc_lengths_.resize(index.docs_.size());
    for (uint32_t d = 0; d < index.docs_.size(); ++d) {
        index.doc_index_[index.docs_[d].doc_id] = d;
        auto tokens = tokenize(index.docs_[d].text);
        index.doc_lengths_[d] = static_cast<uint32_t>(tokens.size());
        total_len += tokens.size();
        std::map<std::string, uint32_t> freqs;
        for (auto& t : tokens) ++freqs[t];
        for (auto& [term, tf] : freqs)
            index.postings_[term].push_back({d, tf});
    }
    index.avg_doc_length_ =
        index.docs_.empty() ? 0.0 : static_cast<double>(total_len) / index.docs_.size();
    return index;
}

double LexicalIndex::score_doc(const std::vector<std::string>& terms, uint32_t doc) const {
    const double n_docs = static_cast<double>(docs_.size());
    const double dl = doc_lengths_[doc];
    const double norm = params_.k1 * (1.0 - params_.b + params_.b * dl / avg_doc_length_);
    double score = 0.0;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        auto pit = std::lower_bound(plist.begin(), plist.end(), doc,
                                    [](const Posting& p, uint32_t d) { return p.doc < d; });
        if (pit == plist.end() || pit->doc != doc) continue;
        double df = static_cast<double>(plist.size());
        double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        double tf = static_cast<double>(pit->term_freq);
        score += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    return score;
}

double LexicalIndex::bm25_score(const std::vector<std::string>& query_terms,
                                const std::string& doc_id) const {
    auto it = doc_index_.find(doc_id);
    if (it == doc_index_.end()) throw DataError("unknown doc_id \"" + doc_id + "\"");
    return score_doc(query_terms, it->second);
}

std::vector<RetrievedDoc> LexicalIndex::retrieve(const std::string& passage, int k) const {
    if (k < 1) throw UsageError("retrieval k must be >= 1");
    auto terms = tokenize(passage);

    // Candidates are docs containing at least one query term.
    std::set<uint32_t> candidates;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        for (const auto& p : it->second) candidates.insert(p.doc);
    }

    std::vector<RetrievedDoc> scored;
    scored.reserve(candidates.size());
    for (uint32_t d : candidates) {
        double s = score_doc(terms, d);
        if (s > 0.0) scored.push_back({docs_[d], s, 0});
    }
    std::sort(scored.begin(), scored.end(), [](const RetrievedDoc& a, const RetrievedDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc.doc_id < b.doc.doc_id;
    });
    if (scored.size() > static_cast<size_t>(k)) scored.resize(static_cast<size_t>(k));
    for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
    return scored;
}

std::vector<RetrievedDoc> dense_retrieve(
    const std::map<std::string, std::vector<double>>& doc_vectors,
    const std::vector<double>& query_vector, int k) {
    if (k < 1) throw UsageError("retrieval k must be >= 1");
    if (query_vector.empty()) throw DataError("query vector is empty");

    auto norm_of = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    };
    double qnorm = norm_of(query_vector);
    if (qnorm == 0.0) throw DataError("query vector has zero norm");

    std::vector<RetrievedDoc> scored;
    scored.reserve(doc_vectors.size());
    for (const auto& [doc_id, vec] : doc_vectors) {
        if (vec.size() != query_vector.size())
            throw DataError("vector dimension mismatch for doc \"" + doc_id + "\"");
        double vnorm = norm_of(vec);
        if (vnorm == 0.0) throw DataError("zero-norm vector for doc \"" + doc_id + "\"");
        double dot = 0.0;
        for (size_t i = 0; i < vec.size(); ++i) dot += vec[i] * query_vector[i];
        scored.push_back({CorpusDoc{doc_id, "", ""}, dot / (vnorm * qnorm), 0});
    }
    std::sort(scored.begin(), scored.end(), [](const RetrievedDoc& a, const RetrievedDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc.doc_id < b.doc.doc_id;
    });
    if (scored.size() > static_cast<size_t>(k)) scored.resize(static_cast<size_t>(k));
    for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
    return scored;
}

// --- Corpus ingestion ---

namespace {

// Splits a block into sentences at ./!/? followed by whitespace or end.
std::vector<std::string> split_sentences(const std::string& block) {
    std::vector<std::string> sentences;
    std::string current;
    for (size_t i = 0; i < block.size(); ++i) {
        current.push_back(block[i]);
        char c = block[i];
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 >= block.size() || std::isspace(static_cast<unsigned char>(block[i + 1])))) {
            std::string t = trim(current);
            if (!t.empty()) sentences.push_back(t);
            current.clear();
        }
    }
    std::string t = trim(current);
    if (!t.empty()) sentences.push_back(t);
    return sentences;
}

void emit_chunk(std::vector<CorpusDoc>& out, const std::string& source, size_t& seq,
                const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) return;
    out.push_back({source + "#" + std::to_string(seq++), t, source});
}

} // namespace

std::vector<CorpusDoc> chunk_corpus_text(const std::string& text, const std::string& source,
                                         size_t max_tokens) {
    std::vector<CorpusDoc> docs;
    size_t seq = 0;

    // Blank-line-separated blocks.
    std::vector<std::string> blocks;
    std::string block;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            if (!trim(block).empty()) blocks.push_back(block);
            block.clear();
        } else {
            if (!block.empty()) block.push_back('\n');
            block += line;
        }
    }
    if (!trim(block).empty()) blocks.push_back(block);

    for (const auto& blk : blocks) {
        if (tokenize(blk).size() <= max_tokens) {
            emit_chunk(docs, source, seq, blk);
            continue;
        }
        // Greedy sentence packing; hard-split a single oversized sentence.
        std::string chunk;
        size_t chunk_tokens = 0;
        for (const auto& sent : split_sentences(blk)) {
            size_t sent_tokens = tokenize(sent).size();
            if (sent_tokens > max_tokens) {
                if (!chunk.empty()) {
                    emit_chunk(docs, source, seq, chunk);
                    chunk.clear();
                    chunk_tokens = 0;
                }
                auto words = [&] {
                    std::vector<std::string> w;
                    std::istringstream ss(sent);
                    std::string tok;
                    while (ss >> tok) w.push_back(tok);
                    return w;
                }();
                std::string piece;
                size_t piece_tokens = 0;
                for (const auto& w : words) {
                    size_t wt = tokenize(w).size();
                    if (piece_tokens + wt > max_tokens && !piece.empty()) {
                        emit_chunk(docs, source, seq, piece);
                        piece.clear();
                        piece_tokens = 0;
                    }
                    if (!piece.empty()) piece.push_back(' ');
                    piece += w;
                    piece_tokens += wt;
                }
                emit_chunk(docs, source, seq, piece);
                continue;
            }
            if (chunk_tokens + sent_tokens > max_tokens && !chunk.empty()) {
                emit_chunk(docs, source, seq, chunk);
                chunk.clear();
                chunk_tokens = 0;
            }
            if (!chunk.empty()) chunk.push_back(' ');
            chunk += sent;
            chunk_tokens += sent_tokens;
        }
        if (!chunk.empty()) emit_chunk(docs, source, seq, chunk);
    }
    return docs;
}

std::vector<CorpusDoc> load_corpus_dir(const std::string& dir, size_t max_tokens) {
    if (!fs::is_directory(dir)) throw DataError("corpus directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
        return a.generic_string() < b.generic_string();
    });

    std::vector<CorpusDoc> docs;
    for (const auto& f : files) {
        std::string rel = fs::relative(f, dir).generic_string();
        auto chunks = chunk_corpus_text(read_file(f.string()), rel, max_tokens);
        docs.insert(docs.end(), chunks.begin(), chunks.end());
    }
    if (docs.empty()) throw DataError("no corpus documents under " + dir);
    return docs;
}

// --- Persistence ---

static constexpr const char* kIndexMagic = "AQG-LEXIDX 1";

std::string serialize_index(const LexicalIndex& index) {
    std::string out = kIndexMagic;
    out.push_back('\n');
    json header;
    header["doc_count"] = index.doc_count();
    header["k1"] = index.params().k1;
    header["b"] = index.params().b;
    out += header.dump();
    out.push_back('\n');
    for (const auto& doc : index.docs()) {
        json obj;
        obj["doc_id"] = doc.doc_id;
        obj["source"] = doc.source;
        obj["text"] = doc.text;
        out += obj.dump();
        out.push_back('\n');
    }
    return out;
}

LexicalIndex parse_index(const std::string& data) {
    std::istringstream in(data);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kIndexMagic)
        throw DataError("not an index file (bad magic header)");
    if (!std::getline(in, line)) throw DataError("index file truncated (missing header)");
    Bm25Params params;
    size_t expected = 0;
    try {
        json header = json::parse(line);
        params.k1 = header.at("k1").get<double>();
        params.b = header.at("b").get<double>();
        expected = header.at("doc_count").get<size_t>();
    } catch (const json::exception& e) {
        throw DataError(std::string("bad index header: ") + e.what());
    }
    std::vector<CorpusDoc> docs;
    size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            json obj = json::parse(line);
            docs.push_back({obj.at("doc_id").get<std::string>(),
                            obj.at("text").get<std::string>(),
                            obj.at("source").get<std::string>()});
        } catch (const json::exception& e) {
            throw DataError("index line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (docs.size() != expected)
        throw DataError("index doc count mismatch: header says " + std::to_string(expected) +
                        ", found " + std::to_string(docs.size()));
    return LexicalIndex::build(docs, params);
}

void save_index_file(const LexicalIndex& index, const std::string& path) {
    write_file(path, serialize_index(index));
}

LexicalIndex load_index_file(const std::string& path) { return parse_index(read_file(path)); }

} // namespace aqg
