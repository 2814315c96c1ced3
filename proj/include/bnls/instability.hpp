#pragma once

#include <string>
#include <vector>

#include "bnls/evolution.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/params.hpp"
#include "bnls/virial.hpp"

namespace bnls {

/// How the ground state u is pushed off the standing-wave orbit.
///   Scaling:   v = u_lambda = lambda^{N/4} u(sqrt(lambda) x)
///   Amplitude: v = lambda u
enum class Perturbation { Scaling, Amplitude };
std::string to_string(Perturbation p);
Perturbation perturbation_from_string(const std::string& s);

struct InstabilityConfig {
    PhysicalParams params;
    double lambda = 1.05;
    Perturbation perturbation = Perturbation::Scaling;
    std::vector<double> radii{8.0, 16.0, 32.0};
    SolverConfig solver;
    EvolveConfig evolve;
    /// Length of the standing-wave run the slack constant is calibrated on.
    double calibration_t_end = 0.5;
    /// Q(v) and I_w(v) must lie below -sign_tol * scale to count as negative initial signs.
    /// Along the trajectory any sample with Q >= 0 or I_w >= 0 is a violation.
    double sign_tol = 1e-8;
    /// Fraction of the lattice ceiling on |Lap u|_2 below which samples enter the rate comparison.
    double resolved_fraction = 0.05;

    void validate() const;
};

/// Named parameter sets; ValidationError for unknown names.
InstabilityConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

struct InitialSigns {
    double action_v = 0.0;
    double action_u = 0.0;
    double virial_v = 0.0;
    double nehari_v = 0.0;
    bool action_below = false;  // E_w(v) < E_w(u)
    bool virial_negative = false;
    bool nehari_negative = false;
    bool all() const { return action_below && virial_negative && nehari_negative; }
};

struct SignPersistence {
    double max_virial = 0.0;  // max_t Q(phi(t))
    double max_nehari = 0.0;  // max_t I_w(phi(t))
    std::size_t virial_violations = 0;
    std::size_t nehari_violations = 0;
    bool holds() const { return virial_violations == 0 && nehari_violations == 0; }
};

struct GapCheck {
    double measured = 0.0;  // a = -max_t Q(phi(t))
    double bound = 0.0;     // d_proxy - E_w(v)
    double tolerance = 0.0;
    bool consistent = false;
    std::string caveat;
};

/// Dichotomy diagnostic of the collapse argument: per sample, is |grad phi|^2 (mu > 0) or
/// |Lap phi|^2 (mu = 0) below the energy threshold?
struct DichotomyLog {
    std::string quantity;    // "grad_norm_sq" or "lap_norm_sq"; empty when undefined
    double threshold = 0.0;
    std::size_t below = 0;
    std::size_t above = 0;
};

struct InstabilityExperiment {
    InstabilityExperiment(InstabilityConfig c, GroundStateResult gs)
        : config(std::move(c)), ground_state(std::move(gs))
    {
    }

    InstabilityConfig config;
    std::string preset;
    InstabilityClass expected = InstabilityClass::NotCovered;
    GroundStateResult ground_state;
    Certificate certificate;
    InitialSigns initial;
    TrajectoryOutcome trajectory;
    SignPersistence persistence;
    GapCheck gap;
    DichotomyLog dichotomy;
    RateComparison virial_comparison;
    double q_gap_measured = 0.0;
    /// "consistent", "inconclusive", "degenerate_perturbation" or "FALSIFYING".
    std::string status;
    std::vector<std::string> notes;

    bool falsifying() const { return status == "FALSIFYING"; }
};

/// Solve, perturb, evolve with virial monitoring, and check every sign and rate claim.
/// PreconditionError for lambda <= 1 or sigma N < 4; ValidationError when no blow-up
/// result covers the parameters; DegenerateFixedPointError/PreconditionError when the
/// ground-state solve fails.
InstabilityExperiment run_instability(const InstabilityConfig& cfg, const std::string& preset_name = {});

/// v built from u according to the perturbation kind.
Field perturb(const Field& u, Perturbation kind, double lambda);

}  // namespace bnls
