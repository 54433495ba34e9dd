#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqg/agreement.hpp"
#include "aqg/cache.hpp"
#include "aqg/csv.hpp"
#include "aqg/dataset.hpp"
#include "aqg/embedding.hpp"
#include "aqg/errors.hpp"
#include "aqg/generation.hpp"
#include "aqg/metrics.hpp"
#include "aqg/prompting.hpp"
#include "aqg/provider.hpp"
#include "aqg/report.hpp"
#include "aqg/retrieval.hpp"
#include "aqg/stats.hpp"
#include "aqg/text.hpp"

namespace {

using namespace aqg;

// Labels like "Hybrid (k=5, m=5)" contain '=', so the path starts after the last one.
std::pair<std::string, std::string> split_labeled(const std::string& arg, const char* flag) {
    auto eq = arg.rfind('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
        throw UsageError(std::string(flag) + " expects label=path, got '" + arg + "'");
    return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::string two_decimals(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// --- dataset stats ---

struct DatasetStatsOpts {
    std::string input;
};

void cmd_dataset_stats(const DatasetStatsOpts& opts) {
    std::vector<std::string> warnings;
    auto records = load_dataset_file(opts.input, &warnings);
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    auto stats = dataset_stats(records);
    std::printf("records: %zu\n", records.size());
    for (const auto& [subject, count] : stats)
        std::printf("%s: %zu\n", subject_name(subject), count);
}

// --- index ---

struct IndexOpts {
    std::string corpus_dir;
    std::string out;
    double k1 = 1.5;
    double b = 0.75;
    size_t max_chunk_tokens = 200;
};

void cmd_index(const IndexOpts& opts) {
    auto docs = load_corpus_dir(opts.corpus_dir, opts.max_chunk_tokens);
    LexicalIndex index = LexicalIndex::build(docs, Bm25Params{opts.k1, opts.b});
    save_index_file(index, opts.out);
    std::printf("indexed %zu documents -> %s\n", index.doc_count(), opts.out.c_str());
}

// --- generate ---

struct GenerateOpts {
    std::string test_path;
    std::string train_path;
    std::string index_path;
    std::string template_path;
    std::string method = "baseline";
    int icl_shots = 5;
    int retrieval_k = 5;
    int hybrid_shots = 5;
    uint64_t seed = 42;
    std::string selection = "stratified_random";
    bool mock = false;
    std::string provider_url;
    std::string model_name = "mock";
    double temperature = 0.0;
    int max_output_tokens = 128;
    std::string cache_dir;
    std::string out_dir;
    int max_in_flight = 4;
    double failure_threshold = 0.05;
    size_t token_budget = 3000;
};

void cmd_generate(const GenerateOpts& opts) {
    PipelineConfig config;
    config.method = parse_method(opts.method);
    config.icl_shots = config.method == Method::ICL ? opts.icl_shots : 0;
    config.retrieval_k =
        config.method == Method::RAG || config.method == Method::Hybrid ? opts.retrieval_k : 0;
    config.hybrid_shots = config.method == Method::Hybrid ? opts.hybrid_shots : 0;
    config.seed = opts.seed;
    config.selection_strategy = parse_selection_strategy(opts.selection);
    config.validate();

    bool needs_index = config.method == Method::RAG || config.method == Method::Hybrid;
    bool needs_train = config.method == Method::ICL || config.method == Method::Hybrid;
    if (needs_index && opts.index_path.empty())
        throw UsageError("--method " + opts.method + " requires --index");
    if (needs_train && opts.train_path.empty())
        throw UsageError("--method " + opts.method + " requires --train");
    if (opts.mock && !opts.provider_url.empty())
        throw UsageError("--mock and --provider-url are mutually exclusive");

    GenerationParams params;
    params.model_name = opts.model_name;
    params.temperature = opts.temperature;
    params.max_output_tokens = opts.max_output_tokens;
    params.validate();

    ExperimentContext ctx;
    auto test = load_dataset_file(opts.test_path);
    std::vector<ContextRecord> train;
    if (!opts.train_path.empty()) {
        train = load_dataset_file(opts.train_path);
        ctx.train = &train;
        ctx.train_hash = dataset_hash(train);
    }
    LexicalIndex index;
    if (!opts.index_path.empty()) {
        index = load_index_file(opts.index_path);
        ctx.index = &index;
    }
    ctx.tmpl = opts.template_path.empty() ? PromptTemplate::built_in()
                                          : PromptTemplate::from_file(opts.template_path);
    ctx.test_hash = dataset_hash(test);
    ctx.out_dir = opts.out_dir;
    ctx.max_in_flight = opts.max_in_flight;
    ctx.failure_threshold = opts.failure_threshold;
    ctx.token_budget = opts.token_budget;

    std::string cache_dir = opts.cache_dir.empty() ? opts.out_dir + "/cache" : opts.cache_dir;
    GenerationCache cache(cache_dir);
    ctx.cache = &cache;

    std::unique_ptr<Provider> provider;
    if (opts.provider_url.empty())
        provider = std::make_unique<MockProvider>();
    else
        provider = std::make_unique<HttpProvider>(opts.provider_url);

    ExperimentResult result = run_experiment(test, config, params, *provider, ctx);
    for (const auto& [id, err] : result.failures)
        std::fprintf(stderr, "record %s failed: %s\n", id.c_str(), err.c_str());
    std::printf("generated %zu questions (%zu failures) -> %s\n", result.questions.size(),
                result.failures.size(), result.questions_path.c_str());
}

// --- evaluate ---

struct EvaluateOpts {
    std::string questions_path;
    std::string test_path;
    std::string out_dir;
    size_t embed_dim = 64;
};

void cmd_evaluate(const EvaluateOpts& opts) {
    auto questions = load_questions_file(opts.questions_path);
    auto gold = load_dataset_file(opts.test_path);
    HashedEmbedder embedder(opts.embed_dim);
    CorpusEvaluation eval = evaluate_corpus(questions, gold, embedder);

    const Metric order[] = {Metric::BLEU4, Metric::ROUGEL, Metric::METEOR, Metric::CHRF,
                            Metric::BERTSCORE};
    std::string summary = "metric,value\n";
    for (Metric m : order) {
        const MetricScore& score = eval.corpus.at(m);
        summary += std::string(metric_name(m)) + "," + format_double(score.value) + "\n";
        std::printf("%-10s %8s\n", metric_name(m), two_decimals(score.value).c_str());
    }
    write_file(opts.out_dir + "/summary.csv", summary);
    write_file(opts.out_dir + "/per_item.csv", items_to_csv(eval.items));
    std::printf("wrote %s and %s\n", (opts.out_dir + "/summary.csv").c_str(),
                (opts.out_dir + "/per_item.csv").c_str());
}

// --- agreement ---

struct AgreementOpts {
    std::string ratings_path;
    std::string out_dir;
};

void cmd_agreement(const AgreementOpts& opts) {
    auto ratings = load_ratings_file(opts.ratings_path);
    auto kappas = kappa_by_criterion(ratings);
    std::string csv = "criterion,kappa,band\n";
    std::printf("%-16s %6s  %s\n", "criterion", "kappa", "band");
    for (const auto& [criterion, kappa] : kappas) {
        csv += csv_join({criterion_name(criterion), format_double(kappa), kappa_band(kappa)});
        csv += '\n';
        std::printf("%-16s %6s  %s\n", criterion_name(criterion), two_decimals(kappa).c_str(),
                    kappa_band(kappa));
    }
    if (!opts.out_dir.empty()) {
        write_file(opts.out_dir + "/kappa.csv", csv);
        std::printf("wrote %s\n", (opts.out_dir + "/kappa.csv").c_str());
    }
}

// --- report ---

struct ReportOpts {
    std::string results_path;                  // pre-built table CSV, rendered verbatim
    std::vector<std::string> summaries;        // label=summary.csv, row order as given
    std::vector<std::string> per_items;        // label=per_item.csv, for significance stars
    std::vector<std::string> baseline_labels;  // rows treated as baselines for stars
    std::string ratings_path;
    std::string sample_test_path;
    std::vector<std::string> sample_questions;  // label=questions.jsonl, row order as given
    size_t sample_count = 3;
    uint64_t sample_seed = 42;
    double alpha = 0.05;
    std::string out_dir;
};

std::map<std::string, double> read_summary_csv(const std::string& path) {
    auto rows = parse_csv(read_file(path), path);
    if (rows.empty() || rows.front() != std::vector<std::string>{"metric", "value"})
        throw DataError(path + ": expected header metric,value");
    std::map<std::string, double> out;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2)
            throw DataError(path + ":row " + std::to_string(i + 1) + ": expected 2 columns");
        try {
            out[rows[i][0]] = std::stod(rows[i][1]);
        } catch (const std::exception&) {
            throw DataError(path + ":row " + std::to_string(i + 1) + ": bad value '" +
                            rows[i][1] + "'");
        }
    }
    return out;
}

void write_table(const ResultsTable& table, const std::string& out_dir, const std::string& stem) {
    write_file(out_dir + "/reports/" + stem + ".md", render(table, TableFormat::Markdown));
    write_file(out_dir + "/reports/" + stem + ".csv", render(table, TableFormat::Csv));
    std::printf("%s\n", render(table, TableFormat::Plain).c_str());
}

void cmd_report(const ReportOpts& opts) {
    bool did_something = false;

    if (!opts.results_path.empty()) {
        ResultsTable table = parse_results_csv(read_file(opts.results_path), opts.results_path);
        write_table(table, opts.out_dir, "results");
        did_something = true;
    }

    if (!opts.summaries.empty()) {
        std::vector<std::string> columns;
        for (Metric m : {Metric::BLEU4, Metric::ROUGEL, Metric::METEOR, Metric::CHRF,
                         Metric::BERTSCORE})
            columns.push_back(metric_name(m));

        std::vector<std::pair<std::string, std::map<std::string, double>>> rows;
        for (const auto& arg : opts.summaries) {
            auto [label, path] = split_labeled(arg, "--summary");
            rows.emplace_back(label, read_summary_csv(path));
        }

        std::map<std::pair<std::string, std::string>, bool> stars;
        if (!opts.baseline_labels.empty() && !opts.per_items.empty()) {
            std::map<std::string, std::vector<ItemScores>> items_by_label;
            for (const auto& arg : opts.per_items) {
                auto [label, path] = split_labeled(arg, "--per-item");
                items_by_label[label] = items_from_csv(read_file(path), path);
            }
            std::set<std::string> baseline_set(opts.baseline_labels.begin(),
                                               opts.baseline_labels.end());
            for (const auto& label : baseline_set)
                if (!items_by_label.count(label))
                    throw UsageError("--baseline " + label + " has no matching --per-item");
            for (const auto& col : columns) {
                Metric metric = parse_metric(col);
                std::map<std::string, SampleVector> results, baselines;
                for (const auto& [label, items] : items_by_label) {
                    SampleVector sample;
                    sample.label = label;
                    for (const auto& item : items) {
                        auto it = item.values.find(metric);
                        if (it != item.values.end()) sample.values.push_back(it->second);
                    }
                    if (baseline_set.count(label))
                        baselines[label] = std::move(sample);
                    else
                        results[label] = std::move(sample);
                }
                for (const auto& [label, starred] : significance_stars(results, baselines,
                                                                       opts.alpha))
                    if (starred) stars[{label, col}] = true;
            }
        }

        ResultsTable table = build_table(columns, rows, stars);
        table.footnotes = {
            "ROUGE-L: sentence-level F1 (beta = 1), macro-averaged.",
            "METEOR-es: exact + Porter-stem stages only (no synonym stage).",
            "BLEU-4 is corpus-level; per-item BLEU samples (BLEU-4s) use "
            "epsilon-smoothed sentence BLEU.",
            "*: two-sided Student's t-test vs the weakest baseline, per-item samples, "
            "alpha = " + format_double(opts.alpha) + ".",
        };
        write_table(table, opts.out_dir, "results");
        did_something = true;
    }

    if (!opts.ratings_path.empty()) {
        auto ratings = load_ratings_file(opts.ratings_path);
        std::vector<std::string> method_order;
        for (const auto& r : ratings) {
            auto slash = r.item_id.find('/');
            std::string method = slash == std::string::npos ? "all" : r.item_id.substr(0, slash);
            if (std::find(method_order.begin(), method_order.end(), method) == method_order.end())
                method_order.push_back(method);
        }
        auto means = mean_ratings(ratings);
        std::vector<std::string> columns;
        for (int c = 0; c < kCriterionCount; ++c)
            columns.push_back(criterion_name(static_cast<Criterion>(c)));
        std::vector<std::pair<std::string, std::map<std::string, double>>> rows;
        for (const auto& method : method_order) {
            std::map<std::string, double> values;
            for (int c = 0; c < kCriterionCount; ++c) {
                Criterion criterion = static_cast<Criterion>(c);
                auto it = means.find({method, criterion});
                values[criterion_name(criterion)] = it == means.end() ? 0.0 : it->second;
            }
            rows.emplace_back(method, std::move(values));
        }
        ResultsTable table = build_table(columns, rows);
        table.footnotes = {"Mean ratings over per-item means across raters, scale 1 (worst) "
                           "to 5 (best)."};
        write_table(table, opts.out_dir, "human");
        did_something = true;
    }

    if (!opts.sample_test_path.empty()) {
        if (opts.sample_questions.empty())
            throw UsageError("--sample-test requires at least one --sample-questions label=path");
        auto records = load_dataset_file(opts.sample_test_path);
        auto sampled = sample_records(records, opts.sample_count, opts.sample_seed);
        MethodQuestions questions;
        for (const auto& arg : opts.sample_questions) {
            auto [label, path] = split_labeled(arg, "--sample-questions");
            std::map<std::string, std::string> by_record;
            for (const auto& q : load_questions_file(path)) by_record[q.record_id] = q.question_text;
            questions.emplace_back(label, std::move(by_record));
        }
        write_file(opts.out_dir + "/reports/samples.md", sample_sheet(sampled, questions));
        std::printf("wrote %s\n", (opts.out_dir + "/reports/samples.md").c_str());
        did_something = true;
    }

    if (!did_something)
        throw UsageError("report needs --results, --summary, --ratings, or --sample-test");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Question-generation experiments: ingest, index, generate, evaluate, report"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags take precedence");

    DatasetStatsOpts dataset_stats_opts;
    auto* dataset = app.add_subcommand("dataset", "Dataset utilities");
    dataset->require_subcommand(1);
    auto* stats = dataset->add_subcommand("stats", "Per-subject record counts");
    stats->add_option("--input", dataset_stats_opts.input, "Dataset JSONL")->required();
    stats->callback([&] { cmd_dataset_stats(dataset_stats_opts); });

    IndexOpts index_opts;
    auto* index = app.add_subcommand("index", "Build a BM25 index over a corpus directory");
    index->add_option("--corpus", index_opts.corpus_dir, "Directory of *.txt files")->required();
    index->add_option("--out", index_opts.out, "Index file to write")->required();
    index->add_option("--k1", index_opts.k1, "BM25 k1");
    index->add_option("--b", index_opts.b, "BM25 b");
    index->add_option("--max-chunk-tokens", index_opts.max_chunk_tokens,
                      "Chunk size limit in tokens");
    index->callback([&] { cmd_index(index_opts); });

    GenerateOpts generate_opts;
    auto* generate = app.add_subcommand("generate", "Run a generation experiment");
    generate->add_option("--test", generate_opts.test_path, "Test split JSONL")->required();
    generate->add_option("--train", generate_opts.train_path, "Train split JSONL (ICL/Hybrid)");
    generate->add_option("--index", generate_opts.index_path, "Index file (RAG/Hybrid)");
    generate->add_option("--template", generate_opts.template_path, "Prompt template file");
    generate->add_option("--method", generate_opts.method, "baseline|icl|rag|hybrid");
    generate->add_option("--icl-shots", generate_opts.icl_shots, "Few-shot count for ICL");
    generate->add_option("--retrieval-k", generate_opts.retrieval_k, "Retrieved docs (RAG/Hybrid)");
    generate->add_option("--hybrid-shots", generate_opts.hybrid_shots, "Few-shot count for Hybrid");
    generate->add_option("--seed", generate_opts.seed, "Run seed");
    generate->add_option("--selection", generate_opts.selection,
                         "stratified_random|similarity_top_m");
    generate->add_flag("--mock", generate_opts.mock, "Use the deterministic mock provider");
    generate->add_option("--provider-url", generate_opts.provider_url,
                         "Chat-completions endpoint (API key from AQG_API_KEY)");
    generate->add_option("--model", generate_opts.model_name, "Model name sent to the provider");
    generate->add_option("--temperature", generate_opts.temperature, "Sampling temperature");
    generate->add_option("--max-output-tokens", generate_opts.max_output_tokens,
                         "Completion token cap");
    generate->add_option("--cache-dir", generate_opts.cache_dir,
                         "Response cache (default <out-dir>/cache)");
    generate->add_option("--out-dir", generate_opts.out_dir, "Output directory")->required();
    generate->add_option("--max-in-flight", generate_opts.max_in_flight,
                         "Provider request concurrency");
    generate->add_option("--failure-threshold", generate_opts.failure_threshold,
                         "Tolerated failure fraction");
    generate->add_option("--token-budget", generate_opts.token_budget,
                         "Prompt token budget (0 = unlimited)");
    generate->callback([&] { cmd_generate(generate_opts); });

    EvaluateOpts evaluate_opts;
    auto* evaluate = app.add_subcommand("evaluate", "Score generated questions against gold");
    evaluate->add_option("--questions", evaluate_opts.questions_path, "questions.jsonl")
        ->required();
    evaluate->add_option("--test", evaluate_opts.test_path, "Test split JSONL")->required();
    evaluate->add_option("--out-dir", evaluate_opts.out_dir, "Output directory")->required();
    evaluate->add_option("--embed-dim", evaluate_opts.embed_dim, "Hashed embedder dimension");
    evaluate->callback([&] { cmd_evaluate(evaluate_opts); });

    AgreementOpts agreement_opts;
    auto* agreement = app.add_subcommand("agreement", "Fleiss kappa per criterion");
    agreement->add_option("--ratings", agreement_opts.ratings_path, "Ratings CSV")->required();
    agreement->add_option("--out-dir", agreement_opts.out_dir, "Output directory (optional)");
    agreement->callback([&] { cmd_agreement(agreement_opts); });

    ReportOpts report_opts;
    auto* report = app.add_subcommand("report", "Render comparison tables and sample sheets");
    report->add_option("--results", report_opts.results_path,
                       "Pre-built results CSV, rendered verbatim");
    report->add_option("--summary", report_opts.summaries,
                       "label=summary.csv (repeat; row order preserved)");
    report->add_option("--per-item", report_opts.per_items, "label=per_item.csv (repeat)");
    report->add_option("--baseline", report_opts.baseline_labels,
                       "Label treated as a baseline for stars (repeat)");
    report->add_option("--ratings", report_opts.ratings_path, "Ratings CSV for the human table");
    report->add_option("--sample-test", report_opts.sample_test_path,
                       "Test split JSONL for the sample sheet");
    report->add_option("--sample-questions", report_opts.sample_questions,
                       "label=questions.jsonl (repeat; row order preserved)");
    report->add_option("--sample-count", report_opts.sample_count, "Records in the sample sheet");
    report->add_option("--sample-seed", report_opts.sample_seed, "Sample selection seed");
    report->add_option("--alpha", report_opts.alpha, "Significance level for stars");
    report->add_option("--out-dir", report_opts.out_dir, "Output directory")->required();
    report->callback([&] { cmd_report(report_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const ProviderError& e) {
        std::fprintf(stderr, "provider error (after %d attempts): %s\n", e.attempts(), e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
