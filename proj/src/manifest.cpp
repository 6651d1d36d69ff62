#include "primerace/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "primerace/errors.hpp"

namespace primerace {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex_of_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for digest");
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data.data(), data.size())));
    return buf;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::add_input(const std::string& path) {
    input_digests.emplace_back(path, fnv1a64_hex_of_file(path));
}

void RunManifest::write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["argv"] = argv;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["master_seed"] = master_seed;
    auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [p, d] : input_digests)
        inputs.push_back({{"path", p}, {"fnv1a64", d}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path);
    out << j.dump(2) << "\n";
}

RunManifest make_manifest(const std::string& command, int argc, char** argv,
                          std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    for (int i = 0; i < argc; ++i) m.argv.emplace_back(argv[i]);
    m.tool_version = "primerace 0.1.0";
    std::string canon;
    for (const auto& a : m.argv) {
        canon += a;
        canon.push_back('\0');
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon.data(), canon.size())));
    m.config_hash = buf;
    m.started_at = iso8601_now();
    m.master_seed = seed;
    return m;
}

}  // namespace primerace
