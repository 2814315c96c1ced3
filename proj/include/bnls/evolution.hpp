#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bnls/field.hpp"
#include "bnls/functionals.hpp"
#include "bnls/params.hpp"

namespace bnls {

struct EvolveConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    int sample_every = 10;
    /// Relative growth of |Lap psi|_2 over its initial value that ends a run as blow-up.
    double blowup_threshold = 1e3;
    bool dealias = true;
    bool adapt = true;
    /// Step-doubling tolerance on |psi_dt - psi_{dt/2,dt/2}|_2 / |psi|_2.
    double local_error_tol = 1e-7;
    /// A rejected step below dt * dt_underflow_factor counts as step collapse.
    double dt_underflow_factor = 1e-8;
    /// Accepted steps in a row before the step size is doubled back toward dt.
    int grow_after = 20;

    void validate() const;
};

/// Test hooks: switch either substep off.
struct StepOptions {
    bool linear = true;
    bool nonlinear = true;
    bool dealias = true;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double dt = 0.0;  // step size in use when the sample was taken
    FunctionalReport report;
    double lap_norm = 0.0;
    double grad_norm = 0.0;
    /// Localized virial per attached cutoff radius.
    std::vector<double> virial_M;
    /// Central finite difference in time of virial_M (filled after the run).
    std::vector<double> virial_rate_fd;
    /// Instantaneous d/dt virial_M from the equation's right-hand side.
    std::vector<double> virial_rate;
};

enum class Verdict { Completed, BlowupDetected, GrowthUnbounded, Poisoned };
std::string to_string(Verdict v);

struct ConservationDefects {
    double mass_rel = 0.0;
    double energy_rel = 0.0;
};

struct TrajectoryOutcome {
    Verdict verdict = Verdict::Completed;
    /// "threshold", "step_collapse", "nan", "t_end".
    std::string reason;
    double t_final = 0.0;
    std::vector<DiagnosticsRecord> samples;
    ConservationDefects conservation_defects;
    double blowup_threshold = 0.0;
    double dt_underflow_factor = 0.0;
    double initial_lap_norm = 0.0;
    double final_lap_growth = 0.0;
    double min_dt = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
    std::optional<Field> final_state;
    std::vector<std::string> notes;
};

/// Called on every sampled state; may fill the virial columns of the record.
using SampleHook = std::function<void(const Field&, DiagnosticsRecord&)>;

/// Strang splitting for i psi_t = gamma Lap^2 psi - mu Lap psi - |psi|^{2 sigma} psi:
/// half linear step exp(-i dt/2 (gamma |k|^4 + mu |k|^2)), full nonlinear phase rotation
/// psi exp(i dt |psi|^{2 sigma}), half linear step. Consecutive half steps are fused.
/// Holds FFT scratch space: one instance per thread.
class SplitStepPropagator {
public:
    SplitStepPropagator(GridPtr grid, const PhysicalParams& p, StepOptions opt = {});

    /// Advances lattice values by n steps of size dt (dt may be negative).
    /// Returns |Lap psi|_2 of the result (NaN if the state was poisoned).
    double advance(std::vector<cplx>& state, int n, double dt);

    const Grid& grid() const { return *grid_; }

private:
    const std::vector<cplx>& half_multiplier(double dt);
    void nonlinear_phase(std::vector<cplx>& state, double dt) const;

    GridPtr grid_;
    PhysicalParams params_;
    StepOptions opt_;
    std::vector<double> dispersion_;  // gamma |k|^4 + mu |k|^2
    std::vector<unsigned char> keep_;
    std::vector<std::pair<double, std::vector<cplx>>> cache_;
};

/// One Strang step. PoisonedStateError if NaN/Inf appears.
Field step(const Field& psi, const PhysicalParams& p, double dt, StepOptions opt = {});
Field advance(const Field& psi, const PhysicalParams& p, double dt, int steps, StepOptions opt = {});

/// Integrates to cfg.t_end or until blow-up evidence appears.
TrajectoryOutcome evolve(const Field& psi0, const PhysicalParams& p, const EvolveConfig& cfg,
                         const SampleHook& hook = {});

}  // namespace bnls
