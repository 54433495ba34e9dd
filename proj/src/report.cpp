#include "aqg/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "aqg/csv.hpp"
#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

const char* table_format_name(TableFormat f) {
    switch (f) {
        case TableFormat::Markdown: return "markdown";
        case TableFormat::Csv: return "csv";
        case TableFormat::Plain: return "plain";
    }
    return "?";
}

TableFormat parse_table_format(const std::string& name) {
    std::string key = to_lower_ascii(trim(name));
    if (key == "markdown" || key == "md") return TableFormat::Markdown;
    if (key == "csv") return TableFormat::Csv;
    if (key == "plain" || key == "text" || key == "txt") return TableFormat::Plain;
    throw UsageError("unknown table format: " + name);
}

ResultsTable build_table(
    const std::vector<std::string>& columns,
    const std::vector<std::pair<std::string, std::map<std::string, double>>>& rows,
    const std::map<std::pair<std::string, std::string>, bool>& stars) {
    if (columns.empty()) throw UsageError("results table needs at least one column");
    std::set<std::string> column_set(columns.begin(), columns.end());
    if (column_set.size() != columns.size()) throw UsageError("duplicate column names");
    for (const auto& [label, values] : rows) {
        if (values.size() != columns.size())
            throw UsageError("ragged row '" + label + "': expected " +
                             std::to_string(columns.size()) + " columns, got " +
                             std::to_string(values.size()));
        for (const auto& [col, value] : values)
            if (!column_set.count(col))
                throw UsageError("ragged row '" + label + "': unexpected column '" + col + "'");
    }

    ResultsTable table;
    table.columns = columns;
    table.rows = rows;
    table.stars = stars;
    for (const auto& col : columns) {
        const std::string* best_label = nullptr;
        double best_value = 0.0;
        for (const auto& [label, values] : rows) {
            double v = values.at(col);
            if (best_label == nullptr || v > best_value) {
                best_label = &label;
                best_value = v;
            }
        }
        if (best_label != nullptr) table.best[col] = *best_label;
    }
    return table;
}

namespace {

std::string two_decimals(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

bool is_starred(const ResultsTable& table, const std::string& label, const std::string& col) {
    auto it = table.stars.find({label, col});
    return it != table.stars.end() && it->second;
}

bool is_tie(const ResultsTable& table, const std::string& col, double best_value) {
    int hits = 0;
    for (const auto& [label, values] : table.rows)
        if (values.at(col) == best_value && ++hits > 1) return true;
    return false;
}

std::string display_cell(const ResultsTable& table, const std::string& label,
                         const std::string& col, bool markdown) {
    double value = 0.0;
    for (const auto& [row_label, values] : table.rows)
        if (row_label == label) value = values.at(col);
    std::string text = two_decimals(value);
    if (is_starred(table, label, col)) text += '*';
    auto best_it = table.best.find(col);
    if (best_it != table.best.end() && best_it->second == label) {
        if (is_tie(table, col, value)) text += " (tie)";
        if (markdown) text = "**" + text + "**";
    }
    return text;
}

std::string render_markdown(const ResultsTable& table) {
    std::string out = "| Model |";
    for (const auto& col : table.columns) out += " " + col + " |";
    out += "\n|---|";
    for (size_t i = 0; i < table.columns.size(); ++i) out += "---|";
    out += '\n';
    for (const auto& [label, values] : table.rows) {
        out += "| " + label + " |";
        for (const auto& col : table.columns) out += " " + display_cell(table, label, col, true) + " |";
        out += '\n';
    }
    for (const auto& note : table.footnotes) out += "\n" + note + "\n";
    return out;
}

std::string render_csv(const ResultsTable& table) {
    std::vector<std::string> header{"model"};
    header.insert(header.end(), table.columns.begin(), table.columns.end());
    std::string out = csv_join(header) + "\n";
    for (const auto& [label, values] : table.rows) {
        std::vector<std::string> cells{label};
        for (const auto& col : table.columns) {
            std::string cell = format_double(values.at(col));
            if (is_starred(table, label, col)) cell += '*';
            cells.push_back(std::move(cell));
        }
        out += csv_join(cells) + "\n";
    }
    return out;
}

std::string render_plain(const ResultsTable& table) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"Model"};
    header.insert(header.end(), table.columns.begin(), table.columns.end());
    grid.push_back(header);
    for (const auto& [label, values] : table.rows) {
        std::vector<std::string> row{label};
        for (const auto& col : table.columns) row.push_back(display_cell(table, label, col, false));
        grid.push_back(row);
    }
    std::vector<size_t> widths(header.size(), 0);
    for (const auto& row : grid)
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    std::string out;
    for (size_t r = 0; r < grid.size(); ++r) {
        for (size_t i = 0; i < grid[r].size(); ++i) {
            const std::string& cell = grid[r][i];
            if (i == 0) {
                out += cell + std::string(widths[i] - cell.size(), ' ');
            } else {
                out += "  " + std::string(widths[i] - cell.size(), ' ') + cell;
            }
        }
        out += '\n';
        if (r == 0) {
            size_t total = widths[0];
            for (size_t i = 1; i < widths.size(); ++i) total += widths[i] + 2;
            out += std::string(total, '-') + '\n';
        }
    }
    for (const auto& note : table.footnotes) out += "\n" + note + "\n";
    return out;
}

} // namespace

std::string render(const ResultsTable& table, TableFormat format) {
    if (table.columns.empty()) throw UsageError("cannot render a table with no columns");
    switch (format) {
        case TableFormat::Markdown: return render_markdown(table);
        case TableFormat::Csv: return render_csv(table);
        case TableFormat::Plain: return render_plain(table);
    }
    throw UsageError("unknown table format");
}

ResultsTable parse_results_csv(const std::string& text, const std::string& source) {
    auto rows = parse_csv(text, source);
    if (rows.empty()) throw DataError(source + ": empty results file");
    const auto& header = rows.front();
    if (header.size() < 2 || header[0] != "model")
        throw DataError(source + ": expected header starting with 'model'");
    std::vector<std::string> columns(header.begin() + 1, header.end());

    std::vector<std::pair<std::string, std::map<std::string, double>>> parsed_rows;
    std::map<std::pair<std::string, std::string>, bool> stars;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        std::string where = source + ":row " + std::to_string(i + 1);
        if (row.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " columns");
        std::map<std::string, double> values;
        for (size_t c = 0; c < columns.size(); ++c) {
            std::string cell = row[c + 1];
            bool starred = !cell.empty() && cell.back() == '*';
            if (starred) cell.pop_back();
            try {
                values[columns[c]] = std::stod(cell);
            } catch (const std::exception&) {
                throw DataError(where + ": bad value '" + row[c + 1] + "'");
            }
            if (starred) stars[{row[0], columns[c]}] = true;
        }
        parsed_rows.emplace_back(row[0], std::move(values));
    }
    return build_table(columns, parsed_rows, stars);
}

std::string sample_sheet(const std::vector<ContextRecord>& records,
                         const MethodQuestions& questions) {
    if (records.empty()) throw UsageError("sample sheet needs at least one record");
    if (questions.empty()) throw UsageError("sample sheet needs at least one method");
    for (const auto& rec : records)
        for (const auto& [method, by_record] : questions)
            if (!by_record.count(rec.id))
                throw DataError("method '" + method + "' has no question for sampled record '" +
                                rec.id + "'");

    std::string out;
    for (const auto& rec : records) {
        out += "## Sample " + rec.id + "\n\n";
        out += "**Context:** " + collapse_to_single_line(rec.context) + "\n\n";
        out += "**Gold question:** " + collapse_to_single_line(rec.question) + "\n\n";
        out += "| Model | Generated question |\n|---|---|\n";
        for (const auto& [method, by_record] : questions)
            out += "| " + method + " | " + collapse_to_single_line(by_record.at(rec.id)) + " |\n";
        out += '\n';
    }
    return out;
}

std::vector<ContextRecord> sample_records(const std::vector<ContextRecord>& records, size_t count,
                                          uint64_t seed) {
    if (count >= records.size()) return records;
    std::vector<size_t> indices(records.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    Rng rng(seed);
    rng.shuffle(indices);
    indices.resize(count);
    std::sort(indices.begin(), indices.end());
    std::vector<ContextRecord> out;
    out.reserve(count);
    for (size_t i : indices) out.push_back(records[i]);
    return out;
}

} // namespace aqg
