#include "core/fixture_store.hpp"

#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/sha256.hpp"

namespace biasaudit {

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path FixtureStore::path_for(const std::string& key) const {
    return dir_ / (key + ".json");
}

std::optional<nlohmann::json> FixtureStore::get(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string content = ss.str();
    auto doc = nlohmann::json::parse(content, nullptr, false);
    if (doc.is_discarded()) fail(errc::io, "corrupt fixture record: " + path_for(key).string());
    {
        std::lock_guard<std::mutex> lock(mutex_);
        used_[key] = sha256_hex(content);
    }
    return doc;
}

bool FixtureStore::contains(const std::string& key) const {
    return std::filesystem::exists(path_for(key));
}

void FixtureStore::put(const std::string& key, const nlohmann::json& record) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto target = path_for(key);
    if (std::filesystem::exists(target)) {
        // immutable: keep the stored bytes, hash what is actually on disk
        std::ifstream in(target, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        used_[key] = sha256_hex(ss.str());
        return;
    }
    std::string content = record.dump(2);
    content.push_back('\n');
    std::filesystem::create_directories(dir_);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io, "cannot write fixture record: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, target);
    used_[key] = sha256_hex(content);
}

std::map<std::string, std::string> FixtureStore::used() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return used_;
}

} // namespace biasaudit
