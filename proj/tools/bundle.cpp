#include "bundle.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace heis::cli {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

ReportBundle::ReportBundle(std::filesystem::path dir, std::string command, nlohmann::json config)
    : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)) {
    std::filesystem::create_directories(dir_);
}

void ReportBundle::write_json(const std::string& name, const nlohmann::json& value) {
    std::ofstream out(path(name));
    if (!out) throw std::runtime_error("cannot write " + path(name).string());
    out << value.dump(2) << '\n';
    out.close();
    add(name);
}

void ReportBundle::add(const std::string& name) { files_[name] = sha256_file(path(name)); }

void ReportBundle::finish(const std::string& status) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, hash] : files_)
        files.push_back({{"name", name}, {"sha256", hash}, {"bytes", std::filesystem::file_size(path(name))}});
    const nlohmann::json manifest{{"tool", "heis"},   {"version", kToolVersion}, {"command", command_},
                                  {"config", config_}, {"files", files},          {"status", status}};
    std::ofstream out(path("manifest.json"));
    if (!out) throw std::runtime_error("cannot write manifest");
    out << manifest.dump(2) << '\n';
}

TableCache::TableCache(std::filesystem::path dir, std::string policy)
    : dir_(std::move(dir)), policy_(std::move(policy)) {}

std::string TableCache::key(const nlohmann::json& key_source) {
    nlohmann::json keyed = key_source;
    keyed["tool_version"] = kToolVersion;
    return sha256_hex(keyed.dump());
}

SpectralTable TableCache::get(const nlohmann::json& key_source, const std::function<SpectralTable()>& build) {
    if (policy_ == "off") return build();
    const std::string k = key(key_source);
    const auto file = dir_ / (k + ".hst");
    SpectralTable table;
    if (policy_ == "use" && read_table_binary(file, k, table)) {
        std::cerr << "cache hit " << k.substr(0, 12) << '\n';
        return table;
    }
    table = build();
    std::filesystem::create_directories(dir_);
    write_table_binary(table, k, file);
    return table;
}

}  // namespace heis::cli
