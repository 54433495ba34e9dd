#include "aqg/generation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

using ordered_json = nlohmann::ordered_json;

std::string extract_question(const std::string& raw, const std::string& record_id) {
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        std::string candidate = trim(line);
        if (candidate.empty()) continue;
        std::string lower = to_lower_ascii(candidate);
        if (lower.rfind("question:", 0) == 0) {
            candidate = trim(candidate.substr(9));
            // A bare label line means the question follows below.
            if (candidate.empty()) continue;
        }
        return candidate;
    }
    throw DataError("empty completion for record " + record_id);
}

GeneratedQuestion generate(const std::string& record_id, const PromptBundle& bundle,
                           const std::string& template_id, const GenerationParams& params,
                           Provider& provider, GenerationCache* cache) {
    params.validate();
    GeneratedQuestion q;
    q.record_id = record_id;
    q.method = bundle.method;
    q.prompt_hash = bundle.prompt_hash;
    q.provider_id = provider.id();
    q.template_id = template_id;

    std::string raw;
    if (cache != nullptr) {
        std::string key = GenerationCache::key_for(bundle, params, q.provider_id);
        if (auto hit = cache->get(key)) {
            raw = hit->response;
            q.timestamp = hit->created;
            q.from_cache = true;
        } else {
            raw = provider.complete(bundle.rendered_text, params);
            CacheEntry entry = cache->put(key, raw);
            q.timestamp = entry.created;
        }
    } else {
        raw = provider.complete(bundle.rendered_text, params);
        q.timestamp = now_unix_seconds();
    }
    q.question_text = extract_question(raw, record_id);
    return q;
}

GeneratedQuestion mock_generate(const PromptBundle& bundle, const std::string& record_id) {
    GeneratedQuestion q;
    q.record_id = record_id;
    q.method = bundle.method;
    q.prompt_hash = bundle.prompt_hash;
    q.provider_id = "mock";
    q.question_text = MockProvider::question_for_passage(bundle.target_passage);
    return q;
}

namespace {

int64_t parse_utc(const std::string& text, const std::string& where) {
    std::tm tm{};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ", &y, &mo, &d, &h, &mi, &s) != 6)
        throw DataError(where + ": bad timestamp '" + text + "'");
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    return static_cast<int64_t>(timegm(&tm));
}

uint64_t parse_hex64(const std::string& text, const std::string& where) {
    if (text.empty() || text.size() > 16 ||
        text.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw DataError(where + ": bad hash '" + text + "'");
    return std::stoull(text, nullptr, 16);
}

} // namespace

std::string serialize_question(const GeneratedQuestion& q) {
    ordered_json obj;
    obj["record_id"] = q.record_id;
    obj["method"] = method_name(q.method);
    obj["question_text"] = q.question_text;
    obj["prompt_hash"] = hex64(q.prompt_hash);
    obj["provider_id"] = q.provider_id;
    obj["template_id"] = q.template_id;
    obj["timestamp"] = format_utc(q.timestamp);
    return obj.dump();
}

std::string serialize_questions(const std::vector<GeneratedQuestion>& questions) {
    std::string out;
    for (const auto& q : questions) {
        out += serialize_question(q);
        out += '\n';
    }
    return out;
}

std::vector<GeneratedQuestion> parse_questions(const std::string& text, const std::string& source) {
    std::vector<GeneratedQuestion> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::string where = source + ":" + std::to_string(line_no);
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const ordered_json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        if (!obj.is_object()) throw DataError(where + ": expected a JSON object");
        try {
            GeneratedQuestion q;
            q.record_id = obj.at("record_id").get<std::string>();
            q.method = parse_method(obj.at("method").get<std::string>());
            q.question_text = obj.at("question_text").get<std::string>();
            q.prompt_hash = parse_hex64(obj.at("prompt_hash").get<std::string>(), where);
            q.provider_id = obj.at("provider_id").get<std::string>();
            q.template_id = obj.at("template_id").get<std::string>();
            q.timestamp = parse_utc(obj.at("timestamp").get<std::string>(), where);
            out.push_back(std::move(q));
        } catch (const ordered_json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    return out;
}

std::vector<GeneratedQuestion> load_questions_file(const std::string& path) {
    return parse_questions(read_file(path), path);
}

std::string dataset_hash(const std::vector<ContextRecord>& records) {
    uint64_t h = fnv1a64("");
    for (const auto& r : records) {
        h = fnv1a64_mix(h, r.id);
        h = fnv1a64_mix(h, "\x1f" + r.context);
        h = fnv1a64_mix(h, "\x1f" + r.question);
        h = fnv1a64_mix(h, std::string("\x1f") + subject_name(r.subject));
        h = fnv1a64_mix(h, "\x1e");
    }
    return hex64(h);
}

PromptBundle build_bundle(const ContextRecord& record, const PipelineConfig& config,
                          const ExperimentContext& ctx) {
    uint64_t seed = derive_record_seed(config.seed, record.id);
    PromptBundle bundle;
    switch (config.method) {
        case Method::Baseline:
            bundle = assemble_baseline_prompt(record.context, ctx.tmpl);
            break;
        case Method::ICL: {
            auto examples = select_examples(*ctx.train, config.icl_shots,
                                            config.selection_strategy, seed, record);
            bundle = assemble_icl_prompt(examples, record.context, ctx.tmpl);
            break;
        }
        case Method::RAG: {
            auto retrieved = ctx.index->retrieve(record.context, config.retrieval_k);
            bundle = assemble_rag_input(record.context, retrieved, ctx.tmpl);
            break;
        }
        case Method::Hybrid: {
            auto examples = select_examples(*ctx.train, config.hybrid_shots,
                                            config.selection_strategy, seed, record);
            auto retrieved = ctx.index->retrieve(record.context, config.retrieval_k);
            bundle = assemble_hybrid_prompt(record.context, retrieved, examples, ctx.tmpl);
            break;
        }
    }
    if (ctx.token_budget > 0) bundle = enforce_token_budget(std::move(bundle), ctx.tmpl, ctx.token_budget);
    return bundle;
}

namespace {

std::string experiment_manifest(const PipelineConfig& config, const GenerationParams& params,
                                const std::string& provider_id, const ExperimentContext& ctx,
                                size_t test_size, const ExperimentResult& result) {
    ordered_json m;
    m["method"] = method_name(config.method);
    m["config"] = {
        {"icl_shots", config.icl_shots},
        {"retrieval_k", config.retrieval_k},
        {"hybrid_shots", config.hybrid_shots},
        {"seed", config.seed},
        {"selection_strategy", selection_strategy_name(config.selection_strategy)},
        {"token_budget", ctx.token_budget},
    };
    m["params"] = {
        {"model_name", params.model_name},
        {"temperature", params.temperature},
        {"max_output_tokens", params.max_output_tokens},
        {"stop_marker", params.stop_marker ? ordered_json(*params.stop_marker) : ordered_json(nullptr)},
    };
    m["template_id"] = ctx.tmpl.id();
    m["provider_id"] = provider_id;
    m["dataset"] = {
        {"train_hash", ctx.train_hash},
        {"test_hash", ctx.test_hash},
        {"test_records", test_size},
    };
    m["generated"] = result.questions.size();
    ordered_json failures = ordered_json::array();
    for (const auto& [id, err] : result.failures)
        failures.push_back({{"record_id", id}, {"error", err}});
    m["failures"] = failures;
    return m.dump(2) + "\n";
}

} // namespace

ExperimentResult run_experiment(const std::vector<ContextRecord>& test,
                                const PipelineConfig& config, const GenerationParams& params,
                                Provider& provider, const ExperimentContext& ctx) {
    config.validate();
    params.validate();
    bool needs_examples = config.method == Method::ICL || config.method == Method::Hybrid;
    bool needs_index = config.method == Method::RAG || config.method == Method::Hybrid;
    if (needs_examples && (ctx.train == nullptr || ctx.train->empty()))
        throw UsageError(std::string(method_name(config.method)) +
                         " requires a non-empty training split for example selection");
    if (needs_index && ctx.index == nullptr)
        throw UsageError(std::string(method_name(config.method)) +
                         " requires a loaded corpus index");
    if (ctx.max_in_flight < 1) throw UsageError("max_in_flight must be >= 1");
    if (ctx.failure_threshold < 0.0 || ctx.failure_threshold > 1.0)
        throw UsageError("failure_threshold must be within [0,1]");

    std::string template_id = ctx.tmpl.id();
    std::vector<GeneratedQuestion> slots(test.size());
    std::vector<std::string> errors(test.size());
    std::vector<char> ok(test.size(), 0);
    std::atomic<size_t> next{0};
    std::atomic<bool> provider_failed{false};

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= test.size()) return;
            try {
                PromptBundle bundle = build_bundle(test[i], config, ctx);
                slots[i] = generate(test[i].id, bundle, template_id, params, provider, ctx.cache);
                ok[i] = 1;
            } catch (const ProviderError& e) {
                errors[i] = e.what();
                provider_failed.store(true);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    size_t n_threads = std::min<size_t>(static_cast<size_t>(ctx.max_in_flight), test.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    for (size_t i = 0; i < test.size(); ++i) {
        if (ok[i])
            result.questions.push_back(std::move(slots[i]));
        else
            result.failures.emplace_back(test[i].id, errors[i]);
    }

    if (!test.empty()) {
        double failure_fraction =
            static_cast<double>(result.failures.size()) / static_cast<double>(test.size());
        if (failure_fraction > ctx.failure_threshold) {
            std::string msg = "experiment failed: " + std::to_string(result.failures.size()) +
                              " of " + std::to_string(test.size()) +
                              " records failed (threshold " +
                              std::to_string(ctx.failure_threshold) +
                              "); first error: " + result.failures.front().second;
            if (provider_failed.load()) throw ProviderError(msg);
            throw DataError(msg);
        }
    }

    if (!ctx.out_dir.empty()) {
        result.questions_path = ctx.out_dir + "/questions.jsonl";
        result.manifest_path = ctx.out_dir + "/manifest.json";
        write_file(result.questions_path, serialize_questions(result.questions));
        write_file(result.manifest_path,
                   experiment_manifest(config, params, provider.id(), ctx, test.size(), result));
    }
    return result;
}

} // namespace aqg
