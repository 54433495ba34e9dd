#pragma once

#include <map>
#include <string>
#include <vector>

namespace aqg {

enum class Subject {
    History,
    Geography,
    Economics,
    EnvironmentalStudies,
    Science,
    Other,
};

const char* subject_name(Subject s);

// Parses a subject label; unknown labels map to Other (a warning is appended
// to `warnings` when given) so the tool also works on non-EduProbe corpora.
Subject parse_subject(const std::string& label, std::vector<std::string>* warnings = nullptr,
                      const std::string& where = "");

// One dataset row: passage text, its gold question and a subject label.
struct ContextRecord {
    std::string id;
    std::string context;
    std::string question;
    Subject subject = Subject::Other;

    bool operator==(const ContextRecord&) const = default;
};

struct DatasetSplit {
    std::vector<ContextRecord> train;
    std::vector<ContextRecord> test;
};

// Parses UTF-8 line-delimited JSON records with fields `context`, `question`,
// optional `subject` and optional `id`. Missing ids become
// "<source_name>:<line_number>". Blank lines are skipped. EduProbe's
// long/short prompt fields are accepted and ignored.
//
// Errors carry the offending line number; duplicate ids are rejected.
std::vector<ContextRecord> parse_dataset(const std::string& raw, const std::string& source_name,
                                         std::vector<std::string>* warnings = nullptr);

std::vector<ContextRecord> load_dataset_file(const std::string& path,
                                             std::vector<std::string>* warnings = nullptr);

// One record per line, in list order, with explicit ids. Re-parsing the
// output yields an equal record list.
std::string serialize_dataset(const std::vector<ContextRecord>& records);

std::map<Subject, size_t> dataset_stats(const std::vector<ContextRecord>& records);

} // namespace aqg
