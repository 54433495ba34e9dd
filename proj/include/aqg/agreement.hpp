#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace aqg {

enum class Criterion { Grammaticality, Appropriateness, Relevance, Complexity, Answerability };

constexpr int kCriterionCount = 5;
constexpr int kScoreCategories = 5;

const char* criterion_name(Criterion c);
Criterion parse_criterion(const std::string& name);

struct RatingRecord {
    std::string rater_id;
    std::string item_id;  // generated-question id, "method/record_id" by convention
    Criterion criterion = Criterion::Grammaticality;
    int score = 0;  // 1..5

    void validate() const;
};

// Per-item counts over the five score categories, fixed rater count.
struct AgreementMatrix {
    std::vector<std::string> item_ids;
    std::vector<std::array<int, kScoreCategories>> counts;  // parallel to item_ids
    int n_raters = 0;
};

// Collects one criterion's ratings into the Fleiss count matrix. Every item
// must be covered by the same rater set; incomplete coverage and duplicate
// (rater, item, criterion) triples are data errors.
AgreementMatrix build_matrix(const std::vector<RatingRecord>& ratings, Criterion criterion);

// Fleiss's kappa. Degenerate inputs where expected agreement is 1 (all
// ratings in one category) are an error rather than 0/0.
double fleiss_kappa(const AgreementMatrix& matrix);

// Advisory interpretation label for a kappa value (Landis-Koch style bands).
const char* kappa_band(double kappa);

// Mean score per (method, criterion) cell, averaging over raters and items.
// The method is read from the item_id prefix before '/'; ids without a
// prefix group under "all".
std::map<std::pair<std::string, Criterion>, double> mean_ratings(
    const std::vector<RatingRecord>& ratings);

// CSV round trip, header: rater_id,item_id,criterion,score.
std::vector<RatingRecord> parse_ratings_csv(const std::string& text, const std::string& source);
std::vector<RatingRecord> load_ratings_file(const std::string& path);
std::string ratings_to_csv(const std::vector<RatingRecord>& ratings);

// Per-criterion kappa over all five criteria, as (criterion, kappa) rows.
std::vector<std::pair<Criterion, double>> kappa_by_criterion(
    const std::vector<RatingRecord>& ratings);

} // namespace aqg
