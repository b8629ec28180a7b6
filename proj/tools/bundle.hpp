#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include <json.hpp>

#include "heis/heisenberg.hpp"

namespace heis::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Output directory whose files are hashed into manifest.json.
class ReportBundle {
public:
    ReportBundle(std::filesystem::path dir, std::string command, nlohmann::json config);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path(const std::string& name) const { return dir_ / name; }

    void write_json(const std::string& name, const nlohmann::json& value);
    /// Registers a file written by a module writer.
    void add(const std::string& name);
    /// Writes manifest.json with status and per-file hashes.
    void finish(const std::string& status);

private:
    std::filesystem::path dir_;
    std::string command_;
    nlohmann::json config_;
    std::map<std::string, std::string> files_;
};

/// Binary cache of spectral tables under <dir>/cache, keyed by a content hash.
class TableCache {
public:
    TableCache(std::filesystem::path dir, std::string policy);

    /// Returns the cached table for `key_source` or builds and stores it.
    SpectralTable get(const nlohmann::json& key_source, const std::function<SpectralTable()>& build);

    static std::string key(const nlohmann::json& key_source);

private:
    std::filesystem::path dir_;
    std::string policy_;
};

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace heis::cli
