#include "aqg/cache.hpp"

#include <filesystem>

#include <json.hpp>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

using json = nlohmann::json;

std::string GenerationCache::key_for(const PromptBundle& bundle, const GenerationParams& params,
                                     const std::string& provider_id) {
    uint64_t h = fnv1a64(hex64(bundle.prompt_hash));
    h = fnv1a64_mix(h, "\x1f" + params.fingerprint());
    h = fnv1a64_mix(h, "\x1f" + provider_id);
    return hex64(h);
}

std::string GenerationCache::path_for(const std::string& key) const {
    return dir_ + "/gen/" + key.substr(0, 2) + "/" + key;
}

std::optional<CacheEntry> GenerationCache::get(const std::string& key) const {
    std::string path = path_for(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
        json obj = json::parse(read_file(path));
        CacheEntry entry;
        entry.key = key;
        entry.response = obj.at("response").get<std::string>();
        entry.created = obj.at("created").get<int64_t>();
        return entry;
    } catch (const std::exception& e) {
        throw DataError("corrupt cache entry " + path + ": " + e.what());
    }
}

CacheEntry GenerationCache::put(const std::string& key, const std::string& response) {
    CacheEntry entry;
    entry.key = key;
    entry.response = response;
    entry.created = now_unix_seconds();
    json obj;
    obj["created"] = entry.created;
    obj["response"] = entry.response;
    std::lock_guard<std::mutex> lock(write_mutex_);
    write_file(path_for(key), obj.dump());
    return entry;
}

} // namespace aqg
