// Command-line driver: groundstate, evolve, instability, identities, proposition.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bnls/error.hpp"
#include "bnls/evolution.hpp"
#include "bnls/functionals.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/instability.hpp"
#include "bnls/io/config.hpp"
#include "bnls/io/report.hpp"
#include "bnls/io/series.hpp"
#include "bnls/io/snapshot.hpp"
#include "bnls/log.hpp"
#include "bnls/virial.hpp"

namespace fs = std::filesystem;
using namespace bnls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitFalsifying = 3;
constexpr int kExitNumerical = 4;

struct Invocation {
    std::string config_path;
    std::map<std::string, std::string> flags;
};

void add_key_options(CLI::App* sub, Invocation& inv)
{
    sub->add_option("-c,--config", inv.config_path, "key = value configuration file");
    for (const auto& k : io::known_keys()) {
        sub->add_option_function<std::string>(
            "--" + k.name, [&inv, name = k.name](const std::string& v) { inv.flags[name] = v; }, k.help);
    }
}

io::RunConfig resolve(const std::string& command, const Invocation& inv)
{
    io::ConfigMap m;
    if (!inv.config_path.empty()) m = io::parse_config_file(inv.config_path);
    io::ConfigMap overrides;
    for (const auto& [k, v] : inv.flags) overrides.set(k, v);
    m.merge(overrides);
    return io::resolve_config(command, m);
}

class RunDir {
public:
    explicit RunDir(io::RunConfig rc) : rc_(std::move(rc)), manifest_(io::make_manifest(rc_))
    {
        fs::create_directories(rc_.output_dir);
    }

    fs::path path(const std::string& name)
    {
        manifest_.outputs.push_back(name);
        return rc_.output_dir / name;
    }

    void finish()
    {
        manifest_.outputs.push_back("manifest.json");
        io::write_json(io::to_json(manifest_), rc_.output_dir / "manifest.json");
    }

    const io::RunConfig& config() const { return rc_; }

private:
    io::RunConfig rc_;
    io::RunManifest manifest_;
};

GroundStateResult solve_ground_state(const io::RunConfig& rc)
{
    if (rc.multistart > 1) {
        return solve_multistart(rc.params, rc.solver, default_multistart_guesses(rc.multistart));
    }
    return solve(rc.params, rc.solver);
}

int cmd_groundstate(const io::RunConfig& rc)
{
    RunDir dir(rc);
    const GroundStateResult gs = solve_ground_state(rc);
    std::cout << "regime: " << rc.params.describe() << "\n";
    std::printf("converged=%s iterations=%d residual=%.3e action=%.17g\n", gs.converged ? "yes" : "no",
                gs.iterations, gs.residual, gs.report.action);
    io::write_snapshot(gs.profile, rc.params, dir.path("profile.bin"));
    if (!gs.converged) {
        io::write_json(io::json{{"converged", false},
                                {"iterations", gs.iterations},
                                {"residual", gs.residual},
                                {"report", io::to_json(gs.report)}},
                       dir.path("certificate.json"));
        dir.finish();
        std::cerr << "error: ground-state iteration did not converge\n";
        return kExitNumerical;
    }
    const Certificate cert = certify(gs, rc.params, rc.identity_tol);
    io::write_json(io::to_json(gs, cert), dir.path("certificate.json"));
    dir.finish();
    std::printf("certificate accepted=%s max identity defect=%.3e\n", cert.accepted ? "yes" : "no",
                cert.defects.max());
    return cert.accepted ? kExitOk : kExitNumerical;
}

Field initial_data(const io::RunConfig& rc)
{
    Field psi0 = [&]() -> Field {
        if (rc.initial.snapshot) {
            Field f = io::read_snapshot(*rc.initial.snapshot);
            if (f.grid().dim() != rc.params.dim) throw ValidationError("initial snapshot dim != params.dim");
            return f;
        }
        const GridPtr grid = rc.solver.grid;
        const double A = rc.initial.amplitude;
        const double w = rc.initial.width;
        if (rc.initial.profile == "gaussian") {
            return Field::from_radial(grid, [=](double r) { return A * std::exp(-r * r / (2.0 * w * w)); });
        }
        if (rc.initial.profile == "sech") {
            return Field::from_radial(grid, [=](double r) { return A / std::cosh(r / w); });
        }
        const GroundStateResult gs = solve_ground_state(rc);
        if (!gs.converged) throw PreconditionError("ground-state initial data did not converge");
        return gs.profile.scaled(A);
    }();
    if (rc.initial.lambda != 1.0) psi0 = rescale(psi0, rc.initial.lambda);
    return psi0;
}

int cmd_evolve(const io::RunConfig& rc, bool with_virial)
{
    RunDir dir(rc);
    const Field psi0 = initial_data(rc);
    std::vector<double> radii;
    std::vector<VirialCutoff> cutoffs;
    if (with_virial) {
        radii = rc.instability.radii;
        for (double R : radii) cutoffs.push_back(build_cutoff(R, psi0.grid()));
    }
    const SampleHook virial_columns = with_virial ? virial_hook(cutoffs, rc.params) : SampleHook{};
    int sample_index = 0;
    std::vector<std::string> snapshot_names;
    SampleHook hook = [&](const Field& f, DiagnosticsRecord& rec) {
        if (virial_columns) virial_columns(f, rec);
        if (rc.snapshot_every > 0 && sample_index % rc.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%06d.bin", sample_index);
            io::write_snapshot(f, rc.params, dir.path(name));
        }
        ++sample_index;
    };
    TrajectoryOutcome out = evolve(psi0, rc.params, rc.evolve, hook);
    if (with_virial && out.samples.size() >= 3) {
        try {
            fill_virial_rate_fd(out.samples, 0.01 / rc.params.omega);
        } catch (const PreconditionError& e) {
            warn(e.what());
        }
    }
    io::write_series(out.samples, radii, dir.path("series.csv"));
    if (out.final_state) io::write_snapshot(*out.final_state, rc.params, dir.path("final.bin"));
    io::write_json(io::to_json(out), dir.path("outcome.json"));
    dir.finish();
    std::printf("verdict=%s reason=%s t_final=%.6g mass_rel=%.3e energy_rel=%.3e growth=%.3f\n",
                to_string(out.verdict).c_str(), out.reason.c_str(), out.t_final,
                out.conservation_defects.mass_rel, out.conservation_defects.energy_rel,
                out.final_lap_growth);
    return out.verdict == Verdict::Poisoned ? kExitNumerical : kExitOk;
}

void write_rate_tables(RunDir& dir, const InstabilityExperiment& ex)
{
    const auto& samples = ex.trajectory.samples;
    const auto& cmp = ex.virial_comparison;
    for (std::size_t j = 0; j < ex.config.radii.size(); ++j) {
        const double R = ex.config.radii[j];
        char name[64];
        std::snprintf(name, sizeof name, "virial_R%g.csv", R);
        std::string text = "t,M,dMdt_fd,dMdt,eight_Q,defect,slack,resolved\n";
        for (const auto& s : samples) {
            const double eightQ = 8.0 * s.report.virial;
            const double rate = j < s.virial_rate.size() ? s.virial_rate[j] : NAN;
            const double slack = cmp.slack_constant * slack_shape(R, s.grad_norm, ex.config.params);
            text += io::format_double(s.t) + ',' +
                    io::format_double(j < s.virial_M.size() ? s.virial_M[j] : NAN) + ',' +
                    io::format_double(j < s.virial_rate_fd.size() ? s.virial_rate_fd[j] : NAN) + ',' +
                    io::format_double(rate) + ',' + io::format_double(eightQ) + ',' +
                    io::format_double(rate - eightQ) + ',' + io::format_double(slack) + ',' +
                    (s.lap_norm <= cmp.resolved_lap_limit ? "1" : "0") + '\n';
        }
        std::FILE* f = std::fopen(dir.path(name).c_str(), "wb");
        if (!f) throw IoError(std::string("cannot open ") + name);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    }
}

int cmd_instability(const io::RunConfig& rc)
{
    RunDir dir(rc);
    const InstabilityExperiment ex = run_instability(rc.instability, rc.preset);
    io::write_json(io::to_json(ex), dir.path("experiment.json"));
    io::write_series(ex.trajectory.samples, ex.config.radii, dir.path("series.csv"));
    write_rate_tables(dir, ex);
    dir.finish();
    std::cout << "regime: " << rc.params.describe() << "\n";
    std::printf("status=%s verdict=%s t_final=%.6g growth=%.3f gap a=%.4g bound=%.4g\n",
                ex.status.c_str(), to_string(ex.trajectory.verdict).c_str(), ex.trajectory.t_final,
                ex.trajectory.final_lap_growth, ex.gap.measured, ex.gap.bound);
    return ex.falsifying() ? kExitFalsifying : kExitOk;
}

int cmd_identities(const io::RunConfig& rc_in, const Invocation& inv)
{
    io::RunConfig rc = rc_in;
    const io::Snapshot snap = io::read_snapshot_with_params(*rc.input_snapshot);
    PhysicalParams p = snap.params;
    auto override = [&](const char* key, double& target) {
        if (auto it = inv.flags.find(key); it != inv.flags.end()) target = std::stod(it->second);
    };
    override("params.gamma", p.gamma);
    override("params.mu", p.mu);
    override("params.omega", p.omega);
    override("params.sigma", p.sigma);
    p.validate();
    rc.params = p;
    RunDir dir(rc);
    const Field& u = snap.field;
    GroundStateResult r{u, stationary_residual(u, p), evaluate_all(u, p), {}, 0, true, {}};
    r.identity_defects = identity_defects(r.report, p);
    const Certificate cert = certify(r, p, rc.identity_tol);
    io::write_json(io::json{{"params", io::to_json(p)},
                            {"stationary_residual", r.residual},
                            {"report", io::to_json(r.report)},
                            {"identity_defects", io::to_json(r.identity_defects)},
                            {"certificate", io::to_json(r, cert)["certificate"]}},
                   dir.path("identities.json"));
    dir.finish();
    std::printf("nehari=%.3e pohozaev=%.3e virial=%.3e accepted=%s\n", r.identity_defects.nehari,
                r.identity_defects.pohozaev, r.identity_defects.virial, cert.accepted ? "yes" : "no");
    return kExitOk;
}

int cmd_proposition(const io::RunConfig& rc)
{
    RunDir dir(rc);
    const Field u_star = [&]() -> Field {
        if (rc.input_snapshot) return io::read_snapshot(*rc.input_snapshot);
        const GroundStateResult gs = solve_ground_state(rc);
        if (!gs.converged) throw PreconditionError("ground-state solve did not converge");
        return gs.profile;
    }();
    const PropositionReport rep =
        sample_check_proposition(u_star, rc.params, rc.proposition_samples, rc.proposition_seed, rc.proposition_tol);
    io::write_json(io::to_json(rep), dir.path("proposition.json"));
    dir.finish();
    std::printf("drawn=%zu kept=%zu violations=%zu d_proxy=%.17g min_kept=%.17g\n", rep.drawn, rep.kept,
                rep.violations, rep.d_proxy, rep.min_kept_action);
    return rep.violations > 0 ? kExitFalsifying : kExitOk;
}

int exit_code_for(const Error& e)
{
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
        dynamic_cast<const RegimeError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const FormatError*>(&e) || dynamic_cast<const IoError*>(&e)) {
        return kExitValidation;
    }
    return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Biharmonic NLS ground states, evolution and instability experiments"};
    app.set_version_flag("--version", io::tool_version());
    app.require_subcommand(1);

    std::map<std::string, Invocation> inv;
    std::map<std::string, CLI::App*> subs;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"groundstate", "solve for a ground-state profile and certify it"},
        {"evolve", "integrate the time-dependent equation"},
        {"instability", "perturb a ground state and monitor the collapse"},
        {"identities", "evaluate all functionals and identity defects on a snapshot"},
        {"proposition", "sample the constrained minimisation characterisation"},
    };
    for (const auto& [name, help] : commands) {
        subs[name] = app.add_subcommand(name, help);
        add_key_options(subs[name], inv[name]);
    }
    Invocation& ii = inv["instability"];
    subs["instability"]->add_option_function<std::string>(
        "--preset", [&ii](const std::string& v) { ii.flags["instability.preset"] = v; },
        "named parameter set (alias of --instability.preset)");
    subs["instability"]->add_option_function<std::string>(
        "--lambda", [&ii](const std::string& v) { ii.flags["instability.lambda"] = v; },
        "perturbation strength (alias of --instability.lambda)");
    subs["instability"]->add_option_function<std::string>(
        "--radii", [&ii](const std::string& v) { ii.flags["virial.radii"] = v; },
        "cutoff radii (alias of --virial.radii)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        for (const auto& [name, sub] : subs) {
            if (!sub->parsed()) continue;
            const io::RunConfig rc = resolve(name, inv[name]);
            if (name == "groundstate") return cmd_groundstate(rc);
            if (name == "evolve") return cmd_evolve(rc, rc.monitor_virial);
            if (name == "instability") return cmd_instability(rc);
            if (name == "identities") return cmd_identities(rc, inv[name]);
            if (name == "proposition") return cmd_proposition(rc);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitValidation;
}
