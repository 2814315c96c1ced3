#include "bnls/instability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnls/error.hpp"
#include "bnls/log.hpp"

namespace bnls {

std::string to_string(Perturbation p)
{
    return p == Perturbation::Scaling ? "scaling" : "amplitude";
}

Perturbation perturbation_from_string(const std::string& s)
{
    if (s == "scaling") return Perturbation::Scaling;
    if (s == "amplitude") return Perturbation::Amplitude;
    throw ValidationError("perturbation must be 'scaling' or 'amplitude', got '" + s + "'");
}

namespace {

// Largest sample spacing the finite-difference rate accepts, in units of the phase period 1/omega.
double max_sample_spacing(const PhysicalParams& p)
{
    return 0.01 / p.omega;
}

}  // namespace

void InstabilityConfig::validate() const
{
    params.validate();
    if (!(lambda > 1.0)) {
        throw PreconditionError("instability: lambda must exceed 1 (lambda = 1 is the unperturbed ground state)");
    }
    if (params.sigma_n() < 4.0 - 1e-12) {
        throw PreconditionError("instability: requires sigma*N >= 4");
    }
    if (radii.empty()) throw ValidationError("virial.radii must not be empty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw ValidationError("virial.radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw ValidationError("virial.radii must increase");
    }
    solver.validate();
    evolve.validate();
    if (evolve.sample_every * evolve.dt > max_sample_spacing(params) * (1.0 + 1e-9)) {
        throw ValidationError("evolve.sample_every * evolve.dt must not exceed 0.01/omega for the virial rate");
    }
    if (!(calibration_t_end > 0.0)) throw ValidationError("virial.calibration_t_end must be positive");
    if (!(sign_tol >= 0.0)) throw ValidationError("instability.sign_tol must be >= 0");
    if (!(resolved_fraction > 0.0 && resolved_fraction <= 1.0)) {
        throw ValidationError("virial.resolved_fraction must lie in (0, 1]");
    }
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"thm1-critical",  "thm1-supercritical",
                                                "thm1-mu0",       "thm1-mu0-supercritical",
                                                "thm2-critical-mu0", "thm2-sigma-gt4"};
    return names;
}

InstabilityConfig preset(const std::string& name)
{
    InstabilityConfig c;
    c.params = PhysicalParams{1.0, 1.0, 1.0, 2.0, 2};
    c.solver.grid = Grid::create(2, 128, 16.0);
    c.evolve.dt = 1e-3;
    c.evolve.t_end = 20.0;
    c.evolve.sample_every = 10;
    c.evolve.blowup_threshold = 10.0;
    if (name == "thm1-critical") {
        c.params.sigma = 2.0;
    } else if (name == "thm1-supercritical") {
        c.params.sigma = 3.0;
    } else if (name == "thm1-mu0" || name == "thm1-mu0-supercritical") {
        c.params.sigma = 3.0;
        c.params.mu = 0.0;
    } else if (name == "thm2-critical-mu0") {
        c.params.sigma = 2.0;
        c.params.mu = 0.0;
        // The dilation u_lambda of a mass-critical mu = 0 ground state is again a ground state.
        c.perturbation = Perturbation::Amplitude;
    } else if (name == "thm2-sigma-gt4") {
        c.params.sigma = 4.5;
    } else {
        std::ostringstream msg;
        msg << "unknown preset '" << name << "'; expected one of:";
        for (const auto& n : preset_names()) msg << ' ' << n;
        throw ValidationError(msg.str());
    }
    return c;
}

Field perturb(const Field& u, Perturbation kind, double lambda)
{
    if (kind == Perturbation::Amplitude) return u.scaled(lambda);
    return rescale(u, lambda);
}

namespace {

InitialSigns initial_signs(const FunctionalReport& ru, const FunctionalReport& rv,
                           const PhysicalParams& p, double tol)
{
    InitialSigns s;
    s.action_u = ru.action;
    s.action_v = rv.action;
    s.virial_v = rv.virial;
    s.nehari_v = rv.nehari;
    const double su = ru.quadratic_scale(p);
    const double sv = rv.quadratic_scale(p);
    s.action_below = rv.action < ru.action - tol * su;
    s.virial_negative = rv.virial < -tol * sv;
    s.nehari_negative = rv.nehari < -tol * sv;
    return s;
}

SignPersistence sign_persistence(const std::vector<DiagnosticsRecord>& samples)
{
    SignPersistence s;
    s.max_virial = -std::numeric_limits<double>::infinity();
    s.max_nehari = -std::numeric_limits<double>::infinity();
    for (const auto& rec : samples) {
        s.max_virial = std::max(s.max_virial, rec.report.virial);
        s.max_nehari = std::max(s.max_nehari, rec.report.nehari);
        if (!(rec.report.virial < 0.0)) ++s.virial_violations;
        if (!(rec.report.nehari < 0.0)) ++s.nehari_violations;
    }
    return s;
}

DichotomyLog dichotomy(const std::vector<DiagnosticsRecord>& samples, const FunctionalReport& rv,
                       const PhysicalParams& p)
{
    DichotomyLog d;
    const double sn = p.sigma_n();
    const double N = p.dim;
    if (p.mu > 0.0) {
        d.quantity = "grad_norm_sq";
        d.threshold = 4.0 * N * p.sigma * rv.energy0 / (p.mu * (sn - 2.0));
    } else if (sn > 4.0) {
        d.quantity = "lap_norm_sq";
        d.threshold = 4.0 * N * p.sigma * rv.energy0 / ((sn - 4.0) * p.gamma);
    } else {
        return d;
    }
    for (const auto& rec : samples) {
        const double q = d.quantity == "grad_norm_sq" ? rec.report.grad_norm_sq : rec.report.lap_norm_sq;
        if (q <= d.threshold) {
            ++d.below;
        } else {
            ++d.above;
        }
    }
    return d;
}

bool verdict_expected(Verdict v, InstabilityClass c)
{
    if (c == InstabilityClass::FiniteTime) return v == Verdict::BlowupDetected;
    return v == Verdict::BlowupDetected || v == Verdict::GrowthUnbounded;
}

}  // namespace

InstabilityExperiment run_instability(const InstabilityConfig& cfg, const std::string& preset_name)
{
    cfg.validate();
    const PhysicalParams& p = cfg.params;
    const InstabilityClass cls = p.instability_class();
    if (cls == InstabilityClass::NotCovered) {
        throw ValidationError("instability: no blow-up result covers " + p.describe());
    }

    GroundStateResult gs = solve(p, cfg.solver);
    if (!gs.converged) {
        std::ostringstream msg;
        msg << "instability: ground-state solve did not converge (residual " << gs.residual
            << " after " << gs.iterations << " iterations)";
        throw PreconditionError(msg.str());
    }
    InstabilityExperiment ex(cfg, std::move(gs));
    ex.preset = preset_name;
    ex.expected = cls;
    ex.certificate = certify(ex.ground_state, p);
    if (!ex.certificate.accepted) ex.notes.push_back("ground-state certificate not accepted");

    const Field v = perturb(ex.ground_state.profile, cfg.perturbation, cfg.lambda);
    const FunctionalReport rv = evaluate_all(v, p);
    const FunctionalReport& ru = ex.ground_state.report;
    ex.initial = initial_signs(ru, rv, p, cfg.sign_tol);
    const bool degenerate = !ex.initial.all();
    if (degenerate) {
        std::ostringstream msg;
        msg << "perturbation '" << to_string(cfg.perturbation) << "' does not produce E_w(v) < E_w(u), "
            << "Q(v) < 0, I_w(v) < 0 (dE = " << rv.action - ru.action << ", Q = " << rv.virial
            << ", I = " << rv.nehari << ")";
        warn("instability: " + msg.str());
        ex.notes.push_back(msg.str());
    }

    const Grid& grid = ex.ground_state.profile.grid();
    std::vector<VirialCutoff> cutoffs;
    for (double R : cfg.radii) cutoffs.push_back(build_cutoff(R, grid));

    // Slack constant from the unperturbed standing wave, where dM/dt and Q both vanish.
    EvolveConfig cal = cfg.evolve;
    cal.t_end = cfg.calibration_t_end;
    const TrajectoryOutcome cal_run = evolve(ex.ground_state.profile, p, cal, virial_hook(cutoffs, p));
    const double C = calibrate_slack_constant(cal_run.samples, cfg.radii, p);

    ex.trajectory = evolve(v, p, cfg.evolve, virial_hook(cutoffs, p));
    auto& samples = ex.trajectory.samples;
    if (samples.size() >= 3) fill_virial_rate_fd(samples, max_sample_spacing(p));

    ex.persistence = sign_persistence(samples);
    ex.q_gap_measured = -ex.persistence.max_virial;

    ex.gap.measured = ex.q_gap_measured;
    ex.gap.bound = ru.action - rv.action;
    ex.gap.tolerance = 1e-6 * std::abs(ru.action) +
                       ex.trajectory.conservation_defects.energy_rel * std::abs(rv.action);
    ex.gap.consistent = ex.gap.measured >= ex.gap.bound - ex.gap.tolerance;
    ex.gap.caveat =
        "d_w is estimated by E_w of the computed profile, which may be an excited state; "
        "a shortfall is reported, not enforced";

    ex.dichotomy = dichotomy(samples, rv, p);

    const double limit = resolvable_lap_limit(grid, rv.mass, cfg.resolved_fraction);
    ex.virial_comparison = virial_rate_check(samples, cfg.radii, p, C, limit);
    {
        std::ostringstream msg;
        msg << "standing-wave run over [0, " << cfg.calibration_t_end << "] with "
            << cal_run.samples.size() << " samples";
        ex.virial_comparison.calibration = msg.str();
    }
    if (ex.virial_comparison.excluded_unresolved > 0) {
        std::ostringstream msg;
        msg << ex.virial_comparison.excluded_unresolved << " samples with |Lap u|_2 > " << limit
            << " exceed the lattice resolution and are left out of the rate comparison";
        ex.notes.push_back(msg.str());
    }

    if (degenerate) {
        ex.status = "degenerate_perturbation";
    } else if (!ex.persistence.holds()) {
        ex.status = "FALSIFYING";
        warn("instability: sign persistence violated along the perturbed trajectory");
    } else if (verdict_expected(ex.trajectory.verdict, cls)) {
        ex.status = "consistent";
    } else {
        ex.status = "inconclusive";
    }
    for (const auto& n : ex.trajectory.notes) ex.notes.push_back(n);
    return ex;
}

}  // namespace bnls
