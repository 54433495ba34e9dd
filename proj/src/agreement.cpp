#include "aqg/agreement.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "aqg/csv.hpp"
#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Grammaticality: return "Grammaticality";
        case Criterion::Appropriateness: return "Appropriateness";
        case Criterion::Relevance: return "Relevance";
        case Criterion::Complexity: return "Complexity";
        case Criterion::Answerability: return "Answerability";
    }
    return "?";
}

Criterion parse_criterion(const std::string& name) {
    std::string key = to_lower_ascii(trim(name));
    if (key == "grammaticality") return Criterion::Grammaticality;
    if (key == "appropriateness") return Criterion::Appropriateness;
    if (key == "relevance") return Criterion::Relevance;
    if (key == "complexity") return Criterion::Complexity;
    if (key == "answerability") return Criterion::Answerability;
    throw DataError("unknown criterion: " + name);
}

void RatingRecord::validate() const {
    if (trim(rater_id).empty()) throw DataError("rating with empty rater_id");
    if (trim(item_id).empty()) throw DataError("rating with empty item_id");
    if (score < 1 || score > kScoreCategories)
        throw DataError("rating score " + std::to_string(score) + " for item '" + item_id +
                        "' out of range 1..5");
}

AgreementMatrix build_matrix(const std::vector<RatingRecord>& ratings, Criterion criterion) {
    // item -> rater -> score, insertion-ordered over items.
    std::vector<std::string> item_order;
    std::map<std::string, std::map<std::string, int>> by_item;
    std::set<std::string> raters;
    for (const auto& r : ratings) {
        r.validate();
        if (r.criterion != criterion) continue;
        auto [it, inserted] = by_item.try_emplace(r.item_id);
        if (inserted) item_order.push_back(r.item_id);
        if (!it->second.emplace(r.rater_id, r.score).second)
            throw DataError("duplicate rating: rater '" + r.rater_id + "', item '" + r.item_id +
                            "', criterion " + criterion_name(criterion));
        raters.insert(r.rater_id);
    }
    if (item_order.empty())
        throw DataError(std::string("no ratings for criterion ") + criterion_name(criterion));
    if (raters.size() < 2)
        throw DataError(std::string("criterion ") + criterion_name(criterion) +
                        " needs at least 2 raters, found " + std::to_string(raters.size()));

    std::string coverage_errors;
    for (const auto& item : item_order) {
        const auto& scores = by_item[item];
        for (const auto& rater : raters) {
            if (!scores.count(rater)) {
                if (!coverage_errors.empty()) coverage_errors += "; ";
                coverage_errors += "item '" + item + "' missing rater '" + rater + "'";
            }
        }
    }
    if (!coverage_errors.empty())
        throw DataError("unequal rater coverage for criterion " +
                        std::string(criterion_name(criterion)) + ": " + coverage_errors);

    AgreementMatrix matrix;
    matrix.n_raters = static_cast<int>(raters.size());
    matrix.item_ids = item_order;
    matrix.counts.reserve(item_order.size());
    for (const auto& item : item_order) {
        std::array<int, kScoreCategories> row{};
        for (const auto& [rater, score] : by_item[item]) ++row[score - 1];
        matrix.counts.push_back(row);
    }
    return matrix;
}

double fleiss_kappa(const AgreementMatrix& matrix) {
    if (matrix.counts.empty()) throw DataError("fleiss_kappa needs at least one item");
    if (matrix.n_raters < 2) throw DataError("fleiss_kappa needs at least 2 raters");
    double n = matrix.n_raters;
    double n_items = static_cast<double>(matrix.counts.size());

    double p_bar = 0.0;
    double category_totals[kScoreCategories] = {0, 0, 0, 0, 0};
    for (const auto& row : matrix.counts) {
        double sum_sq = 0.0;
        int row_total = 0;
        for (int j = 0; j < kScoreCategories; ++j) {
            sum_sq += static_cast<double>(row[j]) * row[j];
            category_totals[j] += row[j];
            row_total += row[j];
        }
        if (row_total != matrix.n_raters)
            throw DataError("agreement matrix row does not sum to n_raters");
        p_bar += (sum_sq - n) / (n * (n - 1.0));
    }
    p_bar /= n_items;

    double p_e = 0.0;
    for (double total : category_totals) {
        double p_j = total / (n * n_items);
        p_e += p_j * p_j;
    }
    if (p_e >= 1.0 - 1e-15)
        throw DataError("fleiss_kappa undefined: all ratings fall in a single category "
                        "(observed agreement 1, expected agreement 1)");
    return (p_bar - p_e) / (1.0 - p_e);
}

const char* kappa_band(double kappa) {
    if (kappa < 0.0) return "poor";
    if (kappa <= 0.20) return "slight";
    if (kappa <= 0.40) return "fair";
    if (kappa <= 0.60) return "moderate";
    if (kappa <= 0.80) return "substantial";
    return "almost perfect";
}

std::map<std::pair<std::string, Criterion>, double> mean_ratings(
    const std::vector<RatingRecord>& ratings) {
    std::map<std::pair<std::string, Criterion>, std::pair<double, int>> cells;
    for (const auto& r : ratings) {
        r.validate();
        auto slash = r.item_id.find('/');
        std::string method = slash == std::string::npos ? "all" : r.item_id.substr(0, slash);
        auto& cell = cells[{method, r.criterion}];
        cell.first += r.score;
        cell.second += 1;
    }
    std::map<std::pair<std::string, Criterion>, double> means;
    for (const auto& [key, cell] : cells) means[key] = cell.first / cell.second;
    return means;
}

std::vector<RatingRecord> parse_ratings_csv(const std::string& text, const std::string& source) {
    auto rows = parse_csv(text, source);
    if (rows.empty()) throw DataError(source + ": empty ratings file");
    if (rows.front() != std::vector<std::string>{"rater_id", "item_id", "criterion", "score"})
        throw DataError(source + ": expected header rater_id,item_id,criterion,score");
    std::vector<RatingRecord> out;
    std::set<std::tuple<std::string, std::string, Criterion>> seen;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        std::string where = source + ":row " + std::to_string(i + 1);
        if (row.size() != 4) throw DataError(where + ": expected 4 columns");
        RatingRecord r;
        r.rater_id = row[0];
        r.item_id = row[1];
        try {
            r.criterion = parse_criterion(row[2]);
            r.score = std::stoi(row[3]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        } catch (const std::exception&) {
            throw DataError(where + ": bad score '" + row[3] + "'");
        }
        try {
            r.validate();
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!seen.emplace(r.rater_id, r.item_id, r.criterion).second)
            throw DataError(where + ": duplicate (rater, item, criterion) triple");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RatingRecord> load_ratings_file(const std::string& path) {
    return parse_ratings_csv(read_file(path), path);
}

std::string ratings_to_csv(const std::vector<RatingRecord>& ratings) {
    std::string out = "rater_id,item_id,criterion,score\n";
    for (const auto& r : ratings) {
        out += csv_join({r.rater_id, r.item_id, criterion_name(r.criterion),
                         std::to_string(r.score)});
        out += '\n';
    }
    return out;
}

std::vector<std::pair<Criterion, double>> kappa_by_criterion(
    const std::vector<RatingRecord>& ratings) {
    std::vector<std::pair<Criterion, double>> out;
    for (int c = 0; c < kCriterionCount; ++c) {
        Criterion criterion = static_cast<Criterion>(c);
        out.emplace_back(criterion, fleiss_kappa(build_matrix(ratings, criterion)));
    }
    return out;
}

} // namespace aqg
