#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bnls/field.hpp"
#include "bnls/functionals.hpp"
#include "bnls/params.hpp"

namespace bnls {

struct GaussianGuess {
    double width = 1.0;
    double amplitude = 1.0;
};

struct SolverConfig {
    int max_iters = 2000;
    /// Relative residual |L u - |u|^{2 sigma} u|_2 / |L u|_2 at which iteration stops.
    double residual_tol = 1e-10;
    /// Stabilizer exponent theta; (2 sigma + 1)/(2 sigma) when unset.
    std::optional<double> stabilizer_exponent;
    std::variant<GaussianGuess, Field> initial_guess = GaussianGuess{};
    GridPtr grid;
    /// Iterations without a 1% improvement of the best residual before giving up.
    int stagnation_window = 50;

    void validate() const;
};

struct IdentityDefects {
    double nehari = 0.0;
    double pohozaev = 0.0;
    double virial = 0.0;
    double max() const;
};

struct GroundStateResult {
    Field profile;
    double residual = 0.0;
    FunctionalReport report;
    /// |I_w|, |P_w|, |Q| each divided by gamma |Lap u|^2 + omega |u|^2.
    IdentityDefects identity_defects;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;
};

IdentityDefects identity_defects(const FunctionalReport& r, const PhysicalParams& p);

/// Stabilized spectral fixed-point iteration for
///   gamma Lap^2 u - mu Lap u + omega u = |u|^{2 sigma} u
/// on real profiles:
///   u_{n+1}^ = M_n^theta F[|u_n|^{2 sigma} u_n] / (gamma |k|^4 + mu |k|^2 + omega),
///   M_n = <L u_n, u_n> / <|u_n|^{2 sigma} u_n, u_n>.
/// Throws DegenerateFixedPointError when the iterate collapses to zero.
GroundStateResult solve(const PhysicalParams& p, const SolverConfig& cfg);

/// Runs one solve per guess and returns the converged result of least action
/// (or the last result when none converged).
GroundStateResult solve_multistart(const PhysicalParams& p, const SolverConfig& cfg,
                                   const std::vector<GaussianGuess>& guesses);

/// Guesses used by the CLI for a multi-start of `count` runs.
std::vector<GaussianGuess> default_multistart_guesses(int count);

/// One application of the fixed-point map (exposed for the re-insertion check).
Field fixed_point_map(const Field& u, const PhysicalParams& p, double theta);

/// Relative residual of the stationary equation for a real or complex profile.
double stationary_residual(const Field& u, const PhysicalParams& p);

struct Certificate {
    IdentityDefects defects;
    double identity_tolerance = 0.0;
    double energy0 = 0.0;
    /// ((sigma N - 4) gamma / (2 sigma N)) |Lap u|^2 + ((sigma N - 2) mu / (2 sigma N)) |grad u|^2
    double energy0_decomposition = 0.0;
    /// |E_0 - decomposition| relative to |decomposition| (to gamma |Lap u|^2 when it vanishes).
    double decomposition_residual = 0.0;
    /// sigma N = 4 and mu = 0, where the decomposition predicts E_0 = 0.
    bool exceptional_case = false;
    /// sigma N >= 4: E_0 > 0, or |E_0| <= 1e-6 gamma |Lap u|^2 in the exceptional case.
    bool energy0_sign_ok = false;
    bool energy0_sign_applicable = false;
    double radial_symmetry_defect = 0.0;
    double ground_state_energy_estimate = 0.0;
    bool accepted = false;
    std::vector<std::string> notes;
};

/// PreconditionError when !r.converged.
Certificate certify(const GroundStateResult& r, const PhysicalParams& p, double identity_tol = 1e-6);

/// max over the lattice symmetry group (axis permutations and reflections) of
/// max|u(g x) - u(x)| / max|u|.
double radial_symmetry_defect(const Field& u);

}  // namespace bnls
