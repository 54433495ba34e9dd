#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

#include "aqg/prompting.hpp"
#include "aqg/provider.hpp"

namespace aqg {

struct CacheEntry {
    std::string key;
    std::string response; // raw provider completion
    int64_t created = 0;  // unix seconds, UTC
};

// Content-addressed by prompt hash + generation params + provider id, so an
// unchanged experiment re-run performs zero provider calls. Files live under
// <cache_dir>/gen/<first-2-hash-chars>/<hash>. Concurrent readers are fine;
// writes are serialized.
class GenerationCache {
  public:
    explicit GenerationCache(std::string cache_dir) : dir_(std::move(cache_dir)) {}

    static std::string key_for(const PromptBundle& bundle, const GenerationParams& params,
                               const std::string& provider_id);

    std::optional<CacheEntry> get(const std::string& key) const;
    CacheEntry put(const std::string& key, const std::string& response);

    const std::string& dir() const { return dir_; }

  private:
    std::string path_for(const std::string& key) const;

    std::string dir_;
    mutable std::mutex write_mutex_;
};

} // namespace aqg
