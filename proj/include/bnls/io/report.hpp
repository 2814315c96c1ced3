#pragma once

#include <filesystem>
#include <map>
#include <string_view>
#include <string>
#include <vector>

#include "json.hpp"

#include "bnls/evolution.hpp"
#include "bnls/functionals.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/instability.hpp"
#include "bnls/io/config.hpp"

namespace bnls::io {

using nlohmann::json;

json to_json(const PhysicalParams& p);
json to_json(const FunctionalReport& r);
json to_json(const IdentityDefects& d);
json to_json(const GroundStateResult& r, const Certificate& c);
/// Outcome summary without the per-sample records (those go to the CSV series).
json to_json(const TrajectoryOutcome& t);
json to_json(const RateComparison& c);
json to_json(const InstabilityExperiment& e);
json to_json(const PropositionReport& r, bool with_samples = true);

void write_json(const json& j, const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes; IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct RunManifest {
    std::string tool_version;
    std::string timestamp;  // UTC, ISO 8601
    std::string command;
    std::map<std::string, std::string> config;
    std::vector<std::pair<std::string, std::string>> input_digests;  // (path, sha256)
    std::vector<std::string> outputs;
};

RunManifest make_manifest(const RunConfig& rc);
json to_json(const RunManifest& m);

std::string tool_version();

}  // namespace bnls::io
