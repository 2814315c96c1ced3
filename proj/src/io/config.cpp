#include "bnls/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "bnls/error.hpp"
#include "bnls/io/series.hpp"

namespace bnls::io {

void ConfigMap::set(const std::string& key, const std::string& value)
{
    values_[key] = value;
}

std::optional<std::string> ConfigMap::get(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void ConfigMap::merge(const ConfigMap& other)
{
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s)
{
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

ConfigMap parse_config_text(const std::string& text, const std::string& origin)
{
    ConfigMap m;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string at = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(at + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(at + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ValidationError(at + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (m.has(key)) throw ValidationError(at + ": duplicate key '" + key + "'");
        m.set(key, value);
    }
    return m;
}

ConfigMap parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config (" + path.string() + ")");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

const std::vector<KeySpec>& known_keys()
{
    static const std::vector<KeySpec> keys{
        {"params.gamma", "coefficient of the biharmonic term (> 0)"},
        {"params.mu", "coefficient of the Laplacian term (>= 0)"},
        {"params.omega", "standing-wave frequency (> 0)"},
        {"params.sigma", "nonlinearity exponent (> 0)"},
        {"params.dim", "spatial dimension N (1, 2 or 3)"},
        {"grid.points", "lattice points per axis (power of two)"},
        {"grid.half_width", "box half-width L; the box is [-L, L)^N"},
        {"solver.max_iters", "fixed-point iteration cap"},
        {"solver.residual_tol", "relative residual at which the solve stops"},
        {"solver.stabilizer_exponent", "stabilizer exponent theta (default (2 sigma + 1)/(2 sigma))"},
        {"solver.guess_width", "Gaussian initial guess width"},
        {"solver.guess_amplitude", "Gaussian initial guess amplitude"},
        {"solver.stagnation_window", "iterations without progress before giving up"},
        {"solver.multistart", "number of initial guesses; the least-action result is kept"},
        {"solver.identity_tol", "identity-defect tolerance of the certificate"},
        {"evolve.dt", "base time step"},
        {"evolve.t_end", "final time"},
        {"evolve.sample_every", "diagnostics cadence in accepted steps"},
        {"evolve.blowup_threshold", "relative growth of |Lap psi|_2 reported as blow-up"},
        {"evolve.dealias", "2/3-rule dealiasing of the nonlinear substep (true/false)"},
        {"evolve.adapt", "step-doubling adaptive step size (true/false)"},
        {"evolve.local_error_tol", "relative local error tolerance for adaptive steps"},
        {"evolve.dt_underflow_factor", "step collapse when dt falls below dt * factor"},
        {"evolve.grow_after", "accepted steps before dt is doubled back"},
        {"evolve.snapshot_every", "write a snapshot every this many samples (0 = off)"},
        {"initial.snapshot", "initial data snapshot path"},
        {"initial.profile", "analytic initial data: ground_state, gaussian or sech"},
        {"initial.amplitude", "amplitude of the analytic profile"},
        {"initial.width", "width of the analytic profile"},
        {"initial.lambda", "apply u -> u_lambda to the initial data"},
        {"input.snapshot", "profile snapshot for identities / proposition"},
        {"instability.preset", "named parameter set"},
        {"instability.lambda", "perturbation strength (> 1)"},
        {"instability.perturbation", "scaling or amplitude"},
        {"instability.sign_tol", "relative tolerance of the sign checks"},
        {"virial.radii", "comma-separated cutoff radii"},
        {"virial.calibration_t_end", "length of the standing-wave slack calibration run"},
        {"virial.resolved_fraction", "fraction of the lattice |Lap u| ceiling used for comparison"},
        {"proposition.samples", "number of random profiles"},
        {"proposition.seed", "base seed"},
        {"proposition.tol_rel", "relative tolerance below the ground-state action"},
        {"output.dir", "run directory"},
    };
    return keys;
}

namespace {

const std::set<std::string>& known_set()
{
    static const std::set<std::string> s = [] {
        std::set<std::string> out;
        for (const auto& k : known_keys()) out.insert(k.name);
        return out;
    }();
    return s;
}

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"groundstate", "evolve", "instability", "identities",
                                            "proposition"};
    return c;
}

double to_double(const std::string& key, const std::string& s)
{
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError(key + ": expected a number, got '" + s + "'");
    }
    return v;
}

long long to_int(const std::string& key, const std::string& s)
{
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError(key + ": expected an integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ValidationError(key + ": expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ValidationError(key + ": expected a comma-separated list");
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

class Reader {
public:
    explicit Reader(const ConfigMap& m) : m_(m) {}

    void num(const char* key, double& target)
    {
        if (auto v = m_.get(key)) target = to_double(key, *v);
    }
    void integer(const char* key, int& target)
    {
        if (auto v = m_.get(key)) target = static_cast<int>(to_int(key, *v));
    }
    void boolean(const char* key, bool& target)
    {
        if (auto v = m_.get(key)) target = to_bool(key, *v);
    }
    std::optional<std::string> str(const char* key) const { return m_.get(key); }

private:
    const ConfigMap& m_;
};

bool is_command(const std::string& c)
{
    return std::find(commands().begin(), commands().end(), c) != commands().end();
}

}  // namespace

std::vector<std::string> required_keys(const std::string& command)
{
    std::vector<std::string> keys{"params.gamma", "params.mu",   "params.omega",    "params.sigma",
                                  "params.dim",   "grid.points", "grid.half_width"};
    if (command == "evolve") {
        keys.push_back("evolve.dt");
        keys.push_back("evolve.t_end");
    }
    if (command == "identities") return {"input.snapshot"};
    return keys;
}

GridPtr RunConfig::grid() const
{
    return Grid::create(params.dim, grid_points, half_width);
}

RunConfig resolve_config(const std::string& command, const ConfigMap& m)
{
    if (!is_command(command)) throw ValidationError("unknown subcommand '" + command + "'");
    std::vector<std::string> unknown;
    for (const auto& [k, v] : m.entries()) {
        if (!known_set().count(k)) unknown.push_back(k);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown configuration keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ValidationError(msg);
    }

    RunConfig rc;
    rc.command = command;
    Reader r(m);

    const auto preset_name = r.str("instability.preset");
    if (preset_name && command != "instability") {
        throw ValidationError("instability.preset applies to the instability subcommand only");
    }
    if (preset_name) {
        rc.preset = *preset_name;
        rc.instability = preset(*preset_name);
        rc.params = rc.instability.params;
        rc.grid_points = rc.instability.solver.grid->points_per_axis();
        rc.half_width = rc.instability.solver.grid->half_width();
        rc.solver = rc.instability.solver;
        rc.evolve = rc.instability.evolve;
    } else {
        std::vector<std::string> missing;
        for (const auto& k : required_keys(command)) {
            if (!m.has(k)) missing.push_back(k);
        }
        if (!missing.empty()) {
            std::string msg = "missing required keys for '" + command + "':";
            for (const auto& k : missing) msg += " " + k;
            throw ValidationError(msg);
        }
    }

    if (auto v = r.str("input.snapshot")) rc.input_snapshot = *v;
    r.num("params.gamma", rc.params.gamma);
    r.num("params.mu", rc.params.mu);
    r.num("params.omega", rc.params.omega);
    r.num("params.sigma", rc.params.sigma);
    r.integer("params.dim", rc.params.dim);
    r.integer("grid.points", rc.grid_points);
    r.num("grid.half_width", rc.half_width);

    r.integer("solver.max_iters", rc.solver.max_iters);
    r.num("solver.residual_tol", rc.solver.residual_tol);
    if (auto v = r.str("solver.stabilizer_exponent")) {
        rc.solver.stabilizer_exponent = to_double("solver.stabilizer_exponent", *v);
    }
    GaussianGuess guess;
    r.num("solver.guess_width", guess.width);
    r.num("solver.guess_amplitude", guess.amplitude);
    rc.solver.initial_guess = guess;
    r.integer("solver.stagnation_window", rc.solver.stagnation_window);
    r.integer("solver.multistart", rc.multistart);
    r.num("solver.identity_tol", rc.identity_tol);

    r.num("evolve.dt", rc.evolve.dt);
    r.num("evolve.t_end", rc.evolve.t_end);
    r.integer("evolve.sample_every", rc.evolve.sample_every);
    r.num("evolve.blowup_threshold", rc.evolve.blowup_threshold);
    r.boolean("evolve.dealias", rc.evolve.dealias);
    r.boolean("evolve.adapt", rc.evolve.adapt);
    r.num("evolve.local_error_tol", rc.evolve.local_error_tol);
    r.num("evolve.dt_underflow_factor", rc.evolve.dt_underflow_factor);
    r.integer("evolve.grow_after", rc.evolve.grow_after);
    r.integer("evolve.snapshot_every", rc.snapshot_every);

    if (auto v = r.str("initial.snapshot")) rc.initial.snapshot = *v;
    if (auto v = r.str("initial.profile")) rc.initial.profile = *v;
    r.num("initial.amplitude", rc.initial.amplitude);
    r.num("initial.width", rc.initial.width);
    r.num("initial.lambda", rc.initial.lambda);

    r.num("instability.lambda", rc.instability.lambda);
    if (auto v = r.str("instability.perturbation")) {
        rc.instability.perturbation = perturbation_from_string(*v);
    }
    r.num("instability.sign_tol", rc.instability.sign_tol);
    if (auto v = r.str("virial.radii")) {
        rc.instability.radii = to_list("virial.radii", *v);
        rc.monitor_virial = true;
    }
    r.num("virial.calibration_t_end", rc.instability.calibration_t_end);
    r.num("virial.resolved_fraction", rc.instability.resolved_fraction);

    if (auto v = r.str("proposition.samples")) {
        const auto n = to_int("proposition.samples", *v);
        if (n < 1) throw ValidationError("proposition.samples must be >= 1");
        rc.proposition_samples = static_cast<std::size_t>(n);
    }
    if (auto v = r.str("proposition.seed")) {
        const auto s = to_int("proposition.seed", *v);
        if (s < 0) throw ValidationError("proposition.seed must be >= 0");
        rc.proposition_seed = static_cast<std::uint64_t>(s);
    }
    r.num("proposition.tol_rel", rc.proposition_tol);
    if (auto v = r.str("output.dir")) rc.output_dir = *v;

    // Validation, delegated to each module's types.
    const bool from_snapshot_only = command == "identities";
    if (!from_snapshot_only || m.has("params.sigma")) rc.params.validate();
    if (!from_snapshot_only) {
        rc.solver.grid = rc.grid();
        rc.solver.validate();
        if (rc.params.dim != rc.solver.grid->dim()) throw ValidationError("grid dim mismatch");
    }
    if (rc.multistart < 1) throw ValidationError("solver.multistart must be >= 1");
    if (!(rc.identity_tol > 0.0)) throw ValidationError("solver.identity_tol must be positive");
    if (command == "evolve") {
        rc.evolve.validate();
        if (rc.snapshot_every < 0) throw ValidationError("evolve.snapshot_every must be >= 0");
        const auto& prof = rc.initial.profile;
        if (prof != "ground_state" && prof != "gaussian" && prof != "sech") {
            throw ValidationError("initial.profile must be ground_state, gaussian or sech");
        }
        if (!(rc.initial.lambda > 0.0)) throw ValidationError("initial.lambda must be positive");
    }
    if (command == "instability") {
        rc.instability.params = rc.params;
        rc.instability.solver = rc.solver;
        rc.instability.evolve = rc.evolve;
        rc.instability.validate();
    }
    if (command == "proposition" && !(rc.proposition_tol >= 0.0)) {
        throw ValidationError("proposition.tol_rel must be >= 0");
    }

    auto& o = rc.resolved;
    o["params.gamma"] = format_double(rc.params.gamma);
    o["params.mu"] = format_double(rc.params.mu);
    o["params.omega"] = format_double(rc.params.omega);
    o["params.sigma"] = format_double(rc.params.sigma);
    o["params.dim"] = std::to_string(rc.params.dim);
    if (!from_snapshot_only) {
        o["grid.points"] = std::to_string(rc.grid_points);
        o["grid.half_width"] = format_double(rc.half_width);
        o["solver.max_iters"] = std::to_string(rc.solver.max_iters);
        o["solver.residual_tol"] = format_double(rc.solver.residual_tol);
        o["solver.stabilizer_exponent"] =
            format_double(rc.solver.stabilizer_exponent.value_or((2.0 * rc.params.sigma + 1.0) / (2.0 * rc.params.sigma)));
        o["solver.guess_width"] = format_double(guess.width);
        o["solver.guess_amplitude"] = format_double(guess.amplitude);
        o["solver.stagnation_window"] = std::to_string(rc.solver.stagnation_window);
        o["solver.multistart"] = std::to_string(rc.multistart);
    }
    o["solver.identity_tol"] = format_double(rc.identity_tol);
    if (command == "evolve" || command == "instability") {
        o["evolve.dt"] = format_double(rc.evolve.dt);
        o["evolve.t_end"] = format_double(rc.evolve.t_end);
        o["evolve.sample_every"] = std::to_string(rc.evolve.sample_every);
        o["evolve.blowup_threshold"] = format_double(rc.evolve.blowup_threshold);
        o["evolve.dealias"] = rc.evolve.dealias ? "true" : "false";
        o["evolve.adapt"] = rc.evolve.adapt ? "true" : "false";
        o["evolve.local_error_tol"] = format_double(rc.evolve.local_error_tol);
        o["evolve.dt_underflow_factor"] = format_double(rc.evolve.dt_underflow_factor);
        o["evolve.grow_after"] = std::to_string(rc.evolve.grow_after);
    }
    if (command == "evolve") {
        o["evolve.snapshot_every"] = std::to_string(rc.snapshot_every);
        if (rc.initial.snapshot) o["initial.snapshot"] = rc.initial.snapshot->string();
        o["initial.profile"] = rc.initial.profile;
        o["initial.amplitude"] = format_double(rc.initial.amplitude);
        o["initial.width"] = format_double(rc.initial.width);
        o["initial.lambda"] = format_double(rc.initial.lambda);
        if (rc.monitor_virial) o["virial.radii"] = join(rc.instability.radii);
    }
    if (rc.input_snapshot) o["input.snapshot"] = rc.input_snapshot->string();
    if (command == "instability") {
        if (!rc.preset.empty()) o["instability.preset"] = rc.preset;
        o["instability.lambda"] = format_double(rc.instability.lambda);
        o["instability.perturbation"] = to_string(rc.instability.perturbation);
        o["instability.sign_tol"] = format_double(rc.instability.sign_tol);
        o["virial.radii"] = join(rc.instability.radii);
        o["virial.calibration_t_end"] = format_double(rc.instability.calibration_t_end);
        o["virial.resolved_fraction"] = format_double(rc.instability.resolved_fraction);
    }
    if (command == "proposition") {
        o["proposition.samples"] = std::to_string(rc.proposition_samples);
        o["proposition.seed"] = std::to_string(rc.proposition_seed);
        o["proposition.tol_rel"] = format_double(rc.proposition_tol);
    }
    o["output.dir"] = rc.output_dir.string();
    return rc;
}

}  // namespace bnls::io
