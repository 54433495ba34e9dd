#include "aqg/provider.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

using json = nlohmann::json;

void GenerationParams::validate() const {
    if (temperature < 0.0 || temperature > 2.0)
        throw UsageError("temperature must be in [0, 2]");
    if (max_output_tokens < 1) throw UsageError("max_output_tokens must be >= 1");
    if (model_name.empty()) throw UsageError("model_name must be non-empty");
}

std::string GenerationParams::fingerprint() const {
    std::ostringstream out;
    out << "model=" << model_name << ";temperature=" << temperature
        << ";max_tokens=" << max_output_tokens
        << ";stop=" << (stop_marker ? *stop_marker : "");
    return out.str();
}

// --- MockProvider ---

std::string MockProvider::question_for_passage(const std::string& passage) {
    auto tokens = tokenize(passage);
    if (tokens.size() > 4) tokens.resize(4);
    std::string subject_phrase;
    for (const auto& t : tokens) {
        if (!subject_phrase.empty()) subject_phrase.push_back(' ');
        subject_phrase += t;
    }
    if (subject_phrase.empty()) return "What does the passage say?";
    return "What does the passage say about " + subject_phrase + "?";
}

std::string MockProvider::complete(const std::string& prompt, const GenerationParams&) {
    // The target passage is the final Passage block of the rendered prompt.
    const std::string marker = "Passage: ";
    size_t start = prompt.rfind("\nPassage: ");
    if (start != std::string::npos) {
        start += 1 + marker.size();
    } else if (prompt.rfind(marker, 0) == 0) {
        start = marker.size();
    } else {
        start = 0;
    }
    size_t end = prompt.find("\nQuestion:", start);
    std::string passage =
        end == std::string::npos ? prompt.substr(start) : prompt.substr(start, end - start);
    return question_for_passage(passage);
}

// --- HttpProvider ---

struct HttpProvider::Impl {
    std::string url;
    std::string scheme;
    std::string host_port;
    std::string path;
    RetryPolicy retry;
};

namespace {

void split_url(const std::string& url, std::string& scheme, std::string& host_port,
               std::string& path) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw UsageError("provider url must start with http:// or https://: " + url);
    scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw UsageError("unsupported provider url scheme \"" + scheme + "\"");
    size_t host_start = scheme_end + 3;
    size_t path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        host_port = url.substr(host_start);
        path = "/";
    } else {
        host_port = url.substr(host_start, path_start - host_start);
        path = url.substr(path_start);
    }
    if (host_port.empty()) throw UsageError("provider url has no host: " + url);
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

std::string truncate_body(const std::string& body, size_t limit = 200) {
    if (body.size() <= limit) return body;
    return body.substr(0, limit) + "...";
}

} // namespace

HttpProvider::HttpProvider(std::string url, RetryPolicy retry) : impl_(new Impl) {
    impl_->url = std::move(url);
    impl_->retry = retry;
    split_url(impl_->url, impl_->scheme, impl_->host_port, impl_->path);
    if (impl_->scheme == "https")
        throw UsageError("https endpoints are not supported in this build; use http");
}

HttpProvider::~HttpProvider() = default;

std::string HttpProvider::id() const { return "http:" + impl_->host_port + impl_->path; }

std::string HttpProvider::complete(const std::string& prompt, const GenerationParams& params) {
    json body;
    body["model"] = params.model_name;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_output_tokens;
    if (params.stop_marker) body["stop"] = json::array({*params.stop_marker});
    std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv("AQG_API_KEY"); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 1; attempt <= impl_->retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            int delay = impl_->retry.base_delay_ms << (attempt - 2);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        httplib::Client client(impl_->host_port);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        auto res = client.Post(impl_->path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            try {
                json reply = json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception& e) {
                throw ProviderError("malformed provider response: " + std::string(e.what()) +
                                        "; body: " + truncate_body(res->body),
                                    attempt);
            }
        }
        last_error = "http status " + std::to_string(res->status) + ": " +
                     truncate_body(res->body);
        if (!retryable_status(res->status)) throw ProviderError(last_error, attempt);
    }
    throw ProviderError("provider unreachable after " +
                            std::to_string(impl_->retry.max_attempts) +
                            " attempts; last error: " + last_error,
                        impl_->retry.max_attempts);
}

} // namespace aqg
