#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bnls/evolution.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/instability.hpp"
#include "bnls/params.hpp"

namespace bnls::io {

/// Flat key = value pairs with dotted sections ("params.gamma = 1"). A "[section]" line
/// prefixes the keys that follow it. '#' and ';' start comments.
class ConfigMap {
public:
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return values_; }
    /// Values of `other` win.
    void merge(const ConfigMap& other);

private:
    std::map<std::string, std::string> values_;
};

/// ValidationError on malformed lines or duplicate keys.
ConfigMap parse_config_text(const std::string& text, const std::string& origin = "<text>");
/// IoError when unreadable.
ConfigMap parse_config_file(const std::filesystem::path& path);

struct KeySpec {
    std::string name;
    std::string help;
};

/// Every recognised key; the CLI exposes each as --<name>.
const std::vector<KeySpec>& known_keys();

struct InitialData {
    std::optional<std::filesystem::path> snapshot;
    std::string profile = "ground_state";  // ground_state | gaussian | sech
    double amplitude = 1.0;
    double width = 1.0;
    double lambda = 1.0;  // scaling applied to the profile
};

struct RunConfig {
    std::string command;
    PhysicalParams params;
    int grid_points = 0;
    double half_width = 0.0;
    SolverConfig solver;
    int multistart = 1;
    double identity_tol = 1e-6;
    EvolveConfig evolve;
    int snapshot_every = 0;  // in samples; 0 disables periodic snapshots
    InitialData initial;
    std::optional<std::filesystem::path> input_snapshot;
    InstabilityConfig instability;
    /// evolve: attach virial monitoring for instability.radii (set when virial.radii is given).
    bool monitor_virial = false;
    std::string preset;
    std::size_t proposition_samples = 200;
    std::uint64_t proposition_seed = 1;
    double proposition_tol = 1e-6;
    std::filesystem::path output_dir = "run";
    /// Every key with its final value, for the manifest.
    std::map<std::string, std::string> resolved;

    GridPtr grid() const;
};

/// Validates keys and values for a subcommand and builds the run configuration.
/// Unknown keys and missing required keys raise ValidationError (the message lists them).
RunConfig resolve_config(const std::string& command, const ConfigMap& m);

/// Keys that must be supplied for a subcommand (presets supply them for `instability`).
std::vector<std::string> required_keys(const std::string& command);

}  // namespace bnls::io
