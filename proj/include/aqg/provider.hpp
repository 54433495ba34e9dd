#pragma once

#include <memory>
#include <optional>
#include <string>

namespace aqg {

struct GenerationParams {
    std::string model_name = "mock";
    double temperature = 0.0; // reproducibility first
    int max_output_tokens = 128;
    std::optional<std::string> stop_marker;

    void validate() const;

    // Stable serialization used in cache keys.
    std::string fingerprint() const;
};

// A generation backend: returns the completion text for a prompt. Transport
// envelopes (HTTP bodies and the like) are unwrapped inside the provider;
// question extraction happens in the generation layer.
class Provider {
  public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    virtual std::string complete(const std::string& prompt, const GenerationParams& params) = 0;
};

// Deterministic stand-in for CI and desk-scale runs: answers with a question
// about the first four tokens of the final passage in the prompt.
class MockProvider : public Provider {
  public:
    std::string id() const override { return "mock"; }
    std::string complete(const std::string& prompt, const GenerationParams& params) override;

    // The mock rule applied to a raw passage (shared with mock_generate).
    static std::string question_for_passage(const std::string& passage);
};

struct RetryPolicy {
    int max_attempts = 3;
    int base_delay_ms = 1000; // 1s, 2s, 4s... doubling per retry
};

// Chat-completions-style HTTP POST: {model, messages, temperature,
// max_tokens}. Reads the API key from the AQG_API_KEY environment variable
// and sends it as a bearer token; the key is never logged or persisted.
// Retries transport errors, 429 and 5xx per the RetryPolicy.
class HttpProvider : public Provider {
  public:
    HttpProvider(std::string url, RetryPolicy retry = {});
    ~HttpProvider() override;

    std::string id() const override;
    std::string complete(const std::string& prompt, const GenerationParams& params) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace aqg
