#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace primerace {

// Reproducibility record emitted next to every output artifact.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string tool_version;
    std::string config_hash;  // fnv1a64 over the canonicalized argument vector
    std::string started_at;   // ISO 8601 UTC
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> input_digests;  // path, fnv1a64
    std::uint64_t master_seed = 0;

    void add_input(const std::string& path);  // hashes the file
    void write(const std::string& path) const;
};

RunManifest make_manifest(const std::string& command, int argc, char** argv,
                          std::uint64_t seed);

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::string fnv1a64_hex_of_file(const std::string& path);
std::string iso8601_now();

}  // namespace primerace
