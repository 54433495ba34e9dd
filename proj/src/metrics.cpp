#include "aqg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "aqg/csv.hpp"
#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::BLEU4: return "BLEU-4";
        case Metric::ROUGEL: return "ROUGE-L";
        case Metric::METEOR: return "METEOR";
        case Metric::CHRF: return "ChRF";
        case Metric::BERTSCORE: return "BERTScore";
    }
    return "?";
}

Metric parse_metric(const std::string& name) {
    std::string key;
    for (char ch : to_lower_ascii(name))
        if (ch != '-' && ch != '_' && ch != ' ') key += ch;
    if (key == "bleu4" || key == "bleu" || key == "bleu4s") return Metric::BLEU4;
    if (key == "rougel" || key == "rouge") return Metric::ROUGEL;
    if (key == "meteor" || key == "meteores") return Metric::METEOR;
    if (key == "chrf") return Metric::CHRF;
    if (key == "bertscore") return Metric::BERTSCORE;
    throw UsageError("unknown metric: " + name);
}

namespace {

// Multiset of token n-grams keyed by the joined tokens.
std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
    std::unordered_map<std::string, int> counts;
    if (n <= 0 || tokens.size() < static_cast<size_t>(n)) return counts;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

struct OrderCounts {
    uint64_t matches = 0;
    uint64_t total = 0;
};

OrderCounts clipped_order_counts(const std::vector<std::string>& cand,
                                 const std::vector<std::string>& ref, int n) {
    OrderCounts oc;
    auto cand_counts = ngram_counts(cand, n);
    for (const auto& [key, count] : cand_counts) oc.total += static_cast<uint64_t>(count);
    if (oc.total == 0) return oc;
    auto ref_counts = ngram_counts(ref, n);
    for (const auto& [key, count] : cand_counts) {
        auto it = ref_counts.find(key);
        if (it != ref_counts.end()) oc.matches += static_cast<uint64_t>(std::min(count, it->second));
    }
    return oc;
}

double brevity_penalty(uint64_t cand_len, uint64_t ref_len) {
    if (cand_len == 0) return 0.0;
    if (cand_len >= ref_len) return 1.0;
    return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
}

} // namespace

MetricScore bleu4(const std::vector<EvalPair>& pairs) {
    if (pairs.empty()) throw DataError("bleu4 requires at least one pair");
    OrderCounts pooled[4];
    uint64_t cand_len = 0;
    uint64_t ref_len = 0;
    for (const auto& pair : pairs) {
        auto cand = tokenize(pair.candidate);
        auto ref = tokenize(pair.reference);
        cand_len += cand.size();
        ref_len += ref.size();
        for (int n = 1; n <= 4; ++n) {
            OrderCounts oc = clipped_order_counts(cand, ref, n);
            pooled[n - 1].matches += oc.matches;
            pooled[n - 1].total += oc.total;
        }
    }

    MetricScore score;
    score.metric = Metric::BLEU4;
    double bp = brevity_penalty(cand_len, ref_len);
    double log_sum = 0.0;
    int orders_used = 0;
    bool zero_precision = false;
    for (int n = 1; n <= 4; ++n) {
        const auto& oc = pooled[n - 1];
        double p = 1.0;  // orders with no candidate n-grams anywhere drop out of the mean
        if (oc.total > 0) {
            p = static_cast<double>(oc.matches) / static_cast<double>(oc.total);
            ++orders_used;
            if (oc.matches == 0)
                zero_precision = true;
            else
                log_sum += std::log(p);
        }
        score.detail["p" + std::to_string(n)] = p;
    }
    score.detail["bp"] = bp;
    score.detail["cand_len"] = static_cast<double>(cand_len);
    score.detail["ref_len"] = static_cast<double>(ref_len);
    score.detail["orders"] = orders_used;
    if (orders_used == 0 || zero_precision || bp == 0.0)
        score.value = 0.0;
    else
        score.value = 100.0 * bp * std::exp(log_sum / orders_used);
    return score;
}

MetricScore bleu4_sentence(const EvalPair& pair) {
    auto cand = tokenize(pair.candidate);
    auto ref = tokenize(pair.reference);
    MetricScore score;
    score.metric = Metric::BLEU4;
    score.detail["smoothed"] = 1.0;
    double bp = brevity_penalty(cand.size(), ref.size());
    score.detail["bp"] = bp;
    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        OrderCounts oc = clipped_order_counts(cand, ref, n);
        double numer = oc.matches > 0 ? static_cast<double>(oc.matches) : 0.1;
        double denom = static_cast<double>(std::max<uint64_t>(oc.total, 1));
        double p = numer / denom;
        score.detail["p" + std::to_string(n)] = p;
        log_sum += std::log(p);
    }
    score.value = bp == 0.0 ? 0.0 : 100.0 * bp * std::exp(log_sum / 4.0);
    return score;
}

MetricScore rouge_l(const EvalPair& pair) {
    auto cand = tokenize(pair.candidate);
    auto ref = tokenize(pair.reference);
    MetricScore score;
    score.metric = Metric::ROUGEL;
    if (cand.empty() || ref.empty()) {
        score.detail = {{"lcs", 0.0}, {"p", 0.0}, {"r", 0.0}};
        return score;
    }
    // Rolling-row LCS table.
    std::vector<int> prev(ref.size() + 1, 0);
    std::vector<int> curr(ref.size() + 1, 0);
    for (size_t i = 1; i <= cand.size(); ++i) {
        for (size_t j = 1; j <= ref.size(); ++j) {
            if (cand[i - 1] == ref[j - 1])
                curr[j] = prev[j - 1] + 1;
            else
                curr[j] = std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    int lcs = prev[ref.size()];
    double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
    double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
    double f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    score.value = 100.0 * f1;
    score.detail = {{"lcs", static_cast<double>(lcs)}, {"p", p}, {"r", r}};
    return score;
}

namespace {

// Exact two-stage METEOR alignment. Objective, lexicographic: most exact
// matches, then most total matches, then fewest chunks. Branch and bound over
// candidate positions with a greedy seed, capped so adversarial inputs with
// heavy token repetition stay bounded.
struct MeteorAligner {
    const std::vector<std::string>& cand;
    const std::vector<std::string>& ref;
    std::vector<std::string> cand_stem;
    std::vector<std::string> ref_stem;
    std::vector<std::vector<int>> exact_opts;  // per cand pos, eligible ref positions
    std::vector<std::vector<int>> stem_opts;   // stem-only (non-exact) eligible positions
    std::vector<int> suffix_any;               // cand positions >= i with any option
    std::vector<int> suffix_exact;             // cand positions >= i with an exact option

    int best_exact = -1;
    int best_total = -1;
    int best_chunks = 0;
    std::vector<int> best_assign;  // ref pos per cand pos, -1 unmatched

    std::vector<int> assign;
    std::vector<char> used;
    long nodes = 0;
    static constexpr long kNodeCap = 4000000;

    MeteorAligner(const std::vector<std::string>& c, const std::vector<std::string>& r)
        : cand(c), ref(r) {
        cand_stem.reserve(cand.size());
        for (const auto& t : cand) cand_stem.push_back(porter_stem(t));
        ref_stem.reserve(ref.size());
        for (const auto& t : ref) ref_stem.push_back(porter_stem(t));
        exact_opts.resize(cand.size());
        stem_opts.resize(cand.size());
        for (size_t i = 0; i < cand.size(); ++i) {
            for (size_t j = 0; j < ref.size(); ++j) {
                if (cand[i] == ref[j])
                    exact_opts[i].push_back(static_cast<int>(j));
                else if (cand_stem[i] == ref_stem[j])
                    stem_opts[i].push_back(static_cast<int>(j));
            }
        }
        suffix_any.assign(cand.size() + 1, 0);
        suffix_exact.assign(cand.size() + 1, 0);
        for (int i = static_cast<int>(cand.size()) - 1; i >= 0; --i) {
            bool any = !exact_opts[i].empty() || !stem_opts[i].empty();
            suffix_any[i] = suffix_any[i + 1] + (any ? 1 : 0);
            suffix_exact[i] = suffix_exact[i + 1] + (exact_opts[i].empty() ? 0 : 1);
        }
        assign.assign(cand.size(), -1);
        used.assign(ref.size(), 0);
    }

    static int count_chunks(const std::vector<int>& assignment) {
        int chunks = 0;
        int prev_i = -2;
        int prev_j = -2;
        for (size_t i = 0; i < assignment.size(); ++i) {
            if (assignment[i] < 0) continue;
            if (!(static_cast<int>(i) == prev_i + 1 && assignment[i] == prev_j + 1)) ++chunks;
            prev_i = static_cast<int>(i);
            prev_j = assignment[i];
        }
        return chunks;
    }

    void consider(const std::vector<int>& assignment, int exact, int total) {
        int chunks = count_chunks(assignment);
        if (exact > best_exact || (exact == best_exact && total > best_total) ||
            (exact == best_exact && total == best_total && chunks < best_chunks)) {
            best_exact = exact;
            best_total = total;
            best_chunks = chunks;
            best_assign = assignment;
        }
    }

    void seed_greedy() {
        std::vector<int> greedy(cand.size(), -1);
        std::vector<char> taken(ref.size(), 0);
        int exact = 0;
        int total = 0;
        int prev_j = -2;
        auto pick = [&](const std::vector<int>& opts) {
            int choice = -1;
            for (int j : opts) {
                if (taken[j]) continue;
                if (j == prev_j + 1) return j;  // continues the current chunk
                if (choice < 0) choice = j;
            }
            return choice;
        };
        for (size_t i = 0; i < cand.size(); ++i) {
            int j = pick(exact_opts[i]);
            bool is_exact = j >= 0;
            if (j < 0) j = pick(stem_opts[i]);
            if (j < 0) {
                prev_j = -2;
                continue;
            }
            greedy[i] = j;
            taken[j] = 1;
            prev_j = j;
            total += 1;
            exact += is_exact ? 1 : 0;
        }
        consider(greedy, exact, total);
    }

    void dfs(size_t i, int exact, int total, int chunks, int prev_i, int prev_j) {
        if (++nodes > kNodeCap) return;
        if (i == cand.size()) {
            if (exact > best_exact || (exact == best_exact && total > best_total) ||
                (exact == best_exact && total == best_total && chunks < best_chunks)) {
                best_exact = exact;
                best_total = total;
                best_chunks = chunks;
                best_assign = assign;
            }
            return;
        }
        int max_exact = exact + suffix_exact[i];
        int max_total = total + suffix_any[i];
        if (max_exact < best_exact) return;
        if (max_exact == best_exact && max_total < best_total) return;
        if (max_exact == best_exact && max_total == best_total && chunks >= best_chunks) return;

        auto try_pos = [&](int j, bool is_exact) {
            if (used[j]) return;
            used[j] = 1;
            assign[i] = j;
            bool extends = static_cast<int>(i) == prev_i + 1 && j == prev_j + 1;
            dfs(i + 1, exact + (is_exact ? 1 : 0), total + 1, chunks + (extends ? 0 : 1),
                static_cast<int>(i), j);
            assign[i] = -1;
            used[j] = 0;
        };
        for (int j : exact_opts[i]) try_pos(j, true);
        for (int j : stem_opts[i]) try_pos(j, false);
        dfs(i + 1, exact, total, chunks, prev_i, prev_j);
    }

    void run() {
        seed_greedy();
        dfs(0, 0, 0, 0, -2, -2);
    }
};

} // namespace

MetricScore meteor(const EvalPair& pair) {
    auto cand = tokenize(pair.candidate);
    auto ref = tokenize(pair.reference);
    MetricScore score;
    score.metric = Metric::METEOR;
    if (cand.empty() || ref.empty()) {
        score.detail = {{"m", 0.0}, {"chunks", 0.0}, {"penalty", 0.0}};
        return score;
    }
    MeteorAligner aligner(cand, ref);
    aligner.run();
    int m = aligner.best_total;
    int chunks = aligner.best_chunks;
    if (m <= 0) {
        score.detail = {{"m", 0.0}, {"chunks", 0.0}, {"penalty", 0.0}};
        return score;
    }
    double p = static_cast<double>(m) / static_cast<double>(cand.size());
    double r = static_cast<double>(m) / static_cast<double>(ref.size());
    double f_mean = 10.0 * p * r / (r + 9.0 * p);
    double frag = static_cast<double>(chunks) / static_cast<double>(m);
    double penalty = 0.5 * frag * frag * frag;
    score.value = 100.0 * f_mean * (1.0 - penalty);
    score.detail = {{"m", static_cast<double>(m)},
                    {"chunks", static_cast<double>(chunks)},
                    {"penalty", penalty},
                    {"p", p},
                    {"r", r},
                    {"f_mean", f_mean}};
    return score;
}

namespace {

bool is_space_codepoint(uint32_t cp) {
    switch (cp) {
        case 0x09:
        case 0x0A:
        case 0x0B:
        case 0x0C:
        case 0x0D:
        case 0x20:
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

std::vector<uint32_t> strip_whitespace_codepoints(const std::string& text) {
    std::vector<uint32_t> out;
    for (uint32_t cp : utf8_decode(text))
        if (!is_space_codepoint(cp)) out.push_back(cp);
    return out;
}

std::unordered_map<std::string, int> char_ngram_counts(const std::vector<uint32_t>& cps, int n) {
    std::unordered_map<std::string, int> counts;
    if (n <= 0 || cps.size() < static_cast<size_t>(n)) return counts;
    for (size_t i = 0; i + n <= cps.size(); ++i) {
        std::string key(static_cast<size_t>(n) * 4, '\0');
        std::memcpy(key.data(), cps.data() + i, static_cast<size_t>(n) * 4);
        ++counts[key];
    }
    return counts;
}

} // namespace

MetricScore chrf(const EvalPair& pair, double beta) {
    if (beta <= 0.0) throw UsageError("chrf beta must be > 0");
    auto cand = strip_whitespace_codepoints(pair.candidate);
    auto ref = strip_whitespace_codepoints(pair.reference);
    MetricScore score;
    score.metric = Metric::CHRF;
    score.detail["beta"] = beta;

    double p_sum = 0.0;
    double r_sum = 0.0;
    int orders = 0;
    for (int n = 1; n <= 6; ++n) {
        uint64_t cand_total = cand.size() >= static_cast<size_t>(n) ? cand.size() - n + 1 : 0;
        uint64_t ref_total = ref.size() >= static_cast<size_t>(n) ? ref.size() - n + 1 : 0;
        double p = 0.0;
        double r = 0.0;
        if (cand_total > 0 || ref_total > 0) {
            uint64_t matches = 0;
            if (cand_total > 0 && ref_total > 0) {
                auto cand_counts = char_ngram_counts(cand, n);
                auto ref_counts = char_ngram_counts(ref, n);
                for (const auto& [key, count] : cand_counts) {
                    auto it = ref_counts.find(key);
                    if (it != ref_counts.end())
                        matches += static_cast<uint64_t>(std::min(count, it->second));
                }
            }
            if (cand_total > 0) p = static_cast<double>(matches) / static_cast<double>(cand_total);
            if (ref_total > 0) r = static_cast<double>(matches) / static_cast<double>(ref_total);
            p_sum += p;
            r_sum += r;
            ++orders;
        }
        score.detail["p" + std::to_string(n)] = p;
        score.detail["r" + std::to_string(n)] = r;
    }
    score.detail["orders"] = orders;
    if (orders == 0) return score;
    double p_bar = p_sum / orders;
    double r_bar = r_sum / orders;
    double b2 = beta * beta;
    double denom = b2 * p_bar + r_bar;
    if (denom <= 0.0) return score;
    score.value = 100.0 * (1.0 + b2) * p_bar * r_bar / denom;
    score.detail["p_bar"] = p_bar;
    score.detail["r_bar"] = r_bar;
    return score;
}

MetricScore bertscore_greedy(const std::vector<std::vector<double>>& cand_vectors,
                             const std::vector<std::vector<double>>& ref_vectors) {
    if (cand_vectors.empty() || ref_vectors.empty())
        throw DataError("bertscore requires non-empty token matrices");
    size_t dim = cand_vectors.front().size();
    auto norms_of = [&](const std::vector<std::vector<double>>& rows) {
        std::vector<double> norms;
        norms.reserve(rows.size());
        for (const auto& row : rows) {
            if (row.size() != dim) throw DataError("bertscore dimension mismatch");
            double s = 0.0;
            for (double x : row) s += x * x;
            double norm = std::sqrt(s);
            if (norm < 1e-12) throw DataError("bertscore zero-norm row");
            norms.push_back(norm);
        }
        return norms;
    };
    auto cand_norms = norms_of(cand_vectors);
    auto ref_norms = norms_of(ref_vectors);

    std::vector<double> best_for_ref(ref_vectors.size(), -1.0);
    double p_sum = 0.0;
    for (size_t i = 0; i < cand_vectors.size(); ++i) {
        double best = -1.0;
        for (size_t j = 0; j < ref_vectors.size(); ++j) {
            double dot = 0.0;
            for (size_t k = 0; k < dim; ++k) dot += cand_vectors[i][k] * ref_vectors[j][k];
            double cos = dot / (cand_norms[i] * ref_norms[j]);
            best = std::max(best, cos);
            best_for_ref[j] = std::max(best_for_ref[j], cos);
        }
        p_sum += best;
    }
    double p = p_sum / static_cast<double>(cand_vectors.size());
    double r_sum = 0.0;
    for (double v : best_for_ref) r_sum += v;
    double r = r_sum / static_cast<double>(ref_vectors.size());

    double f1 = std::abs(p + r) < 1e-300 ? 0.0 : 2.0 * p * r / (p + r);
    MetricScore score;
    score.metric = Metric::BERTSCORE;
    score.value = std::clamp(100.0 * f1, 0.0, 100.0);
    score.detail = {{"p", p}, {"r", r}, {"f1", f1}};
    return score;
}

MetricScore bertscore_pair(const EvalPair& pair, const TokenEmbedder& embedder) {
    auto cand = tokenize(pair.candidate);
    auto ref = tokenize(pair.reference);
    if (cand.empty() || ref.empty()) {
        MetricScore score;
        score.metric = Metric::BERTSCORE;
        score.detail = {{"p", 0.0}, {"r", 0.0}, {"f1", 0.0}};
        return score;
    }
    std::vector<std::vector<double>> cand_vectors;
    cand_vectors.reserve(cand.size());
    for (const auto& t : cand) cand_vectors.push_back(embedder.embed(t));
    std::vector<std::vector<double>> ref_vectors;
    ref_vectors.reserve(ref.size());
    for (const auto& t : ref) ref_vectors.push_back(embedder.embed(t));
    return bertscore_greedy(cand_vectors, ref_vectors);
}

CorpusEvaluation evaluate_corpus(const std::vector<GeneratedQuestion>& questions,
                                 const std::vector<ContextRecord>& gold,
                                 const TokenEmbedder& embedder) {
    if (questions.empty()) throw DataError("no questions to evaluate");
    std::unordered_map<std::string, const ContextRecord*> by_id;
    by_id.reserve(gold.size());
    for (const auto& rec : gold) by_id[rec.id] = &rec;

    std::vector<EvalPair> pairs;
    pairs.reserve(questions.size());
    for (const auto& q : questions) {
        auto it = by_id.find(q.record_id);
        if (it == by_id.end())
            throw DataError("no gold record for generated question id '" + q.record_id + "'");
        pairs.push_back({q.question_text, it->second->question});
    }

    CorpusEvaluation eval;
    eval.corpus[Metric::BLEU4] = bleu4(pairs);

    double sums[4] = {0, 0, 0, 0};  // ROUGE-L, METEOR, ChRF, BERTScore
    eval.items.reserve(questions.size());
    for (size_t i = 0; i < questions.size(); ++i) {
        ItemScores item;
        item.record_id = questions[i].record_id;
        item.values[Metric::BLEU4] = bleu4_sentence(pairs[i]).value;
        double rl = rouge_l(pairs[i]).value;
        double mt = meteor(pairs[i]).value;
        double cf = chrf(pairs[i]).value;
        double bs = bertscore_pair(pairs[i], embedder).value;
        item.values[Metric::ROUGEL] = rl;
        item.values[Metric::METEOR] = mt;
        item.values[Metric::CHRF] = cf;
        item.values[Metric::BERTSCORE] = bs;
        sums[0] += rl;
        sums[1] += mt;
        sums[2] += cf;
        sums[3] += bs;
        eval.items.push_back(std::move(item));
    }
    double n = static_cast<double>(questions.size());
    Metric averaged[4] = {Metric::ROUGEL, Metric::METEOR, Metric::CHRF, Metric::BERTSCORE};
    for (int k = 0; k < 4; ++k) {
        MetricScore score;
        score.metric = averaged[k];
        score.value = sums[k] / n;
        score.detail = {{"items", n}};
        eval.corpus[averaged[k]] = score;
    }
    return eval;
}

namespace {

// Per-item BLEU rows carry the sentence-smoothed variant, labeled as such.
std::string item_metric_label(Metric m) {
    return m == Metric::BLEU4 ? "BLEU-4s" : metric_name(m);
}

} // namespace

std::string items_to_csv(const std::vector<ItemScores>& items) {
    std::string out = "record_id,metric,value\n";
    for (const auto& item : items) {
        for (const auto& [metric, value] : item.values) {
            out += csv_join({item.record_id, item_metric_label(metric), format_double(value)});
            out += '\n';
        }
    }
    return out;
}

std::vector<ItemScores> items_from_csv(const std::string& text, const std::string& source) {
    auto rows = parse_csv(text, source);
    if (rows.empty()) throw DataError(source + ": empty per-item score file");
    if (rows.front() != std::vector<std::string>{"record_id", "metric", "value"})
        throw DataError(source + ": expected header record_id,metric,value");
    std::vector<ItemScores> items;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        std::string where = source + ":row " + std::to_string(i + 1);
        if (row.size() != 3) throw DataError(where + ": expected 3 columns");
        Metric metric = parse_metric(row[1]);
        double value = 0.0;
        try {
            value = std::stod(row[2]);
        } catch (const std::exception&) {
            throw DataError(where + ": bad value '" + row[2] + "'");
        }
        if (items.empty() || items.back().record_id != row[0]) {
            ItemScores item;
            item.record_id = row[0];
            items.push_back(std::move(item));
        }
        items.back().values[metric] = value;
    }
    return items;
}

} // namespace aqg
