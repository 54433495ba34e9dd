#include "aqg/dataset.hpp"

#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

using json = nlohmann::json;

const char* subject_name(Subject s) {
    switch (s) {
    case Subject::History: return "History";
    case Subject::Geography: return "Geography";
    case Subject::Economics: return "Economics";
    case Subject::EnvironmentalStudies: return "EnvironmentalStudies";
    case Subject::Science: return "Science";
    case Subject::Other: return "Other";
    }
    return "Other";
}

Subject parse_subject(const std::string& label, std::vector<std::string>* warnings,
                      const std::string& where) {
    std::string norm = to_lower_ascii(trim(label));
    // Accept a few spellings seen in the wild for the same subject.
    if (norm == "history") return Subject::History;
    if (norm == "geography") return Subject::Geography;
    if (norm == "economics") return Subject::Economics;
    if (norm == "environmentalstudies" || norm == "environmental studies" ||
        norm == "environmental_studies")
        return Subject::EnvironmentalStudies;
    if (norm == "science") return Subject::Science;
    if (norm == "other" || norm.empty()) return Subject::Other;
    if (warnings) {
        warnings->push_back("unknown subject \"" + label + "\"" +
                            (where.empty() ? "" : " at " + where) + ", mapped to Other");
    }
    return Subject::Other;
}

std::vector<ContextRecord> parse_dataset(const std::string& raw, const std::string& source_name,
                                         std::vector<std::string>* warnings) {
    std::vector<ContextRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::istringstream in(raw);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        std::string where = source_name + ":" + std::to_string(line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where + ": malformed record: " + e.what());
        }
        if (!obj.is_object()) throw DataError(where + ": record is not an object");

        ContextRecord rec;
        for (const char* field : {"context", "question"}) {
            if (!obj.contains(field) || !obj[field].is_string())
                throw DataError(where + ": missing field \"" + field + "\"");
        }
        rec.context = obj["context"].get<std::string>();
        rec.question = obj["question"].get<std::string>();
        if (trim(rec.context).empty()) throw DataError(where + ": empty context");
        if (trim(rec.question).empty()) throw DataError(where + ": empty question");

        if (obj.contains("id") && obj["id"].is_string() &&
            !trim(obj["id"].get<std::string>()).empty()) {
            rec.id = obj["id"].get<std::string>();
        } else {
            rec.id = where;
        }
        if (!seen_ids.insert(rec.id).second)
            throw DataError(where + ": duplicate id \"" + rec.id + "\"");

        if (obj.contains("subject") && obj["subject"].is_string()) {
            rec.subject = parse_subject(obj["subject"].get<std::string>(), warnings, where);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<ContextRecord> load_dataset_file(const std::string& path,
                                             std::vector<std::string>* warnings) {
    return parse_dataset(read_file(path), path, warnings);
}

std::string serialize_dataset(const std::vector<ContextRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        json obj;
        obj["id"] = rec.id;
        obj["context"] = rec.context;
        obj["question"] = rec.question;
        obj["subject"] = subject_name(rec.subject);
        out += obj.dump();
        out.push_back('\n');
    }
    return out;
}

std::map<Subject, size_t> dataset_stats(const std::vector<ContextRecord>& records) {
    std::map<Subject, size_t> counts;
    for (Subject s : {Subject::History, Subject::Geography, Subject::Economics,
                      Subject::EnvironmentalStudies, Subject::Science, Subject::Other})
        counts[s] = 0;
    for (const auto& rec : records) ++counts[rec.subject];
    return counts;
}

} // namespace aqg
