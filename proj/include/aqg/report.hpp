#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aqg/dataset.hpp"

namespace aqg {

enum class TableFormat { Markdown, Csv, Plain };

const char* table_format_name(TableFormat f);
TableFormat parse_table_format(const std::string& name);

// Comparison table in presentation order: one row per model, one column per
// metric or criterion. best marks the column-wise maximum (ties go to the
// first row); stars carry significance flags supplied by the stats layer.
struct ResultsTable {
    std::vector<std::string> columns;
    std::vector<std::pair<std::string, std::map<std::string, double>>> rows;
    std::map<std::pair<std::string, std::string>, bool> stars;  // (model, column)
    std::map<std::string, std::string> best;                    // column -> model
    std::vector<std::string> footnotes;

    bool operator==(const ResultsTable&) const = default;
};

ResultsTable build_table(
    const std::vector<std::string>& columns,
    const std::vector<std::pair<std::string, std::map<std::string, double>>>& rows,
    const std::map<std::pair<std::string, std::string>, bool>& stars = {});

// Deterministic text. Markdown bolds best cells and appends '*' to starred
// values, 2 decimals everywhere; csv emits full-precision values with star
// suffixes and parses back losslessly; plain is an aligned text table.
std::string render(const ResultsTable& table, TableFormat format);

// Inverse of render(..., Csv). best is recomputed, so a rendered table parses
// back equal (footnotes are not carried by CSV).
ResultsTable parse_results_csv(const std::string& text, const std::string& source);

// Qualitative sheet: per sampled record, the context, the gold question, and
// one generated question per method in the given order.
using MethodQuestions = std::vector<std::pair<std::string, std::map<std::string, std::string>>>;
std::string sample_sheet(const std::vector<ContextRecord>& records,
                         const MethodQuestions& questions);

// Deterministic sample of `count` records (document order preserved).
std::vector<ContextRecord> sample_records(const std::vector<ContextRecord>& records, size_t count,
                                          uint64_t seed);

} // namespace aqg
