#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace walkforge {

// Replay metadata emitted with every artifact-producing run. The manifest
// carries the volatile facts (timestamps, wall time); artifacts themselves
// stay deterministic so a replay with the same parameters is byte-identical.
struct RunManifest {
    std::string subcommand;
    nlohmann::json parameters;
    std::uint64_t seed = 0;
    std::string code_version;
    std::map<std::string, std::string> input_digests;  // path -> sha256
    std::string started_at;
    std::string finished_at;
    double wall_seconds = 0;

    nlohmann::json to_json() const;
};

std::string sha256_file(const std::string& path);
std::string iso8601_utc_now();

// Writes via a temporary file + rename; no partial artifact survives a failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace walkforge
