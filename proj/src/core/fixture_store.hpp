#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

namespace biasaudit {

// Append-only directory of JSON records keyed by content hash; file name is
// the hex key. Concurrent readers are fine; writes are serialized and land
// atomically (temp file + rename). Records are immutable once written.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    std::optional<nlohmann::json> get(const std::string& key) const;
    bool contains(const std::string& key) const;

    // No-op if the key already exists (records are immutable).
    void put(const std::string& key, const nlohmann::json& record);

    // key -> sha256 of file content, for every record read or written through
    // this instance; feeds the run manifest.
    std::map<std::string, std::string> used() const;

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::string> used_;
};

} // namespace biasaudit
