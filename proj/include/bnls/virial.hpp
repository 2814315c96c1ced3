#pragma once

#include <string>
#include <vector>

#include "bnls/evolution.hpp"
#include "bnls/field.hpp"
#include "bnls/params.hpp"

namespace bnls {

/// Degree-11 polynomial step on [0, 1]: S(0) = 0, S(1) = 1, first five derivatives zero at both ends.
double smoothstep5(double x);
double smoothstep5_derivative(double x);

struct CutoffCertificate {
    double max_phi_second = 0.0;  // audited max of phi'' on [0, 12]
    int audit_points = 0;
    int smoothness_order = 5;     // derivatives of the taper vanishing at each joint
};

/// Radial weight phi_R(r) = R^2 phi(r/R) with phi(r) = r^2/2 for r <= 1,
/// phi'(r) = r (1 - S((r-1)/9)) on [1, 10], and phi constant for r >= 10.
class VirialCutoff {
public:
    /// DomainError for R <= 0. Audits phi'' <= 1 on 1e5 points.
    VirialCutoff(double R);

    double radius() const { return R_; }
    double phi(double r) const;
    double phi_prime(double r) const;
    double phi_second(double r) const;
    /// phi_R'(r) / r, i.e. grad phi_R = weight(|x|) x.
    double weight(double r) const;
    const CutoffCertificate& certificate() const { return cert_; }

    /// Unscaled profile phi on [0, inf).
    static double base_phi(double s);
    static double base_phi_prime(double s);
    static double base_phi_second(double s);

private:
    double R_;
    CutoffCertificate cert_;
};

/// Builds the cutoff and warns when 10R exceeds 0.9 L of the grid.
VirialCutoff build_cutoff(double R, const Grid& grid);

/// M[u] = 2 Im int conj(u) grad(phi_R) . grad(u) dx with spectral gradients.
double virial(const Field& u, const VirialCutoff& c);

/// 2 Im int conj(u) V . grad(u) dx for a lattice vector field V (one component per axis).
double virial_along(const Field& u, const std::vector<std::vector<double>>& field);

/// d/dt M[u(t)] evaluated from the equation's right-hand side at the state u.
double virial_rate(const Field& u, const VirialCutoff& c, const PhysicalParams& p);

/// Sample hook filling virial_M and virial_rate for each cutoff.
SampleHook virial_hook(std::vector<VirialCutoff> cutoffs, const PhysicalParams& p);

/// Fills virial_rate_fd in place by 3-point differences on the (non-uniform) sample times.
/// PreconditionError when fewer than three samples exist or the spacing is too coarse.
void fill_virial_rate_fd(std::vector<DiagnosticsRecord>& samples, double max_spacing);

/// R-dependent part of the error budget for the rate comparison.
/// Standard case: R^-4 + |grad u|^2 R^-2 + |grad u|^sigma R^{-sigma(N-1)} + mu R^-2.
/// mu = 0 with sigma N = 4: min over eta in etas of 1/(eta R^2) + eta^{1/2}.
double slack_shape(double R, double grad_norm, const PhysicalParams& p);
const std::vector<double>& critical_etas();

struct RateComparisonRow {
    double R = 0.0;
    double max_abs_defect = 0.0;    // max_t |dM/dt - 8Q|
    double max_signed_defect = 0.0; // max_t (dM/dt - 8Q)
    double max_abs_defect_fd = 0.0; // same with the finite-difference rate
    double slack_max = 0.0;         // largest slack(R) over the compared samples
    std::size_t violations = 0;     // samples with dM/dt > 8Q + slack(R)
    std::size_t compared = 0;
    double best_eta = 0.0;          // mu = 0, sigma N = 4 only
};

struct RateComparison {
    double slack_constant = 0.0;
    std::string calibration;
    std::vector<RateComparisonRow> rows;
    bool defect_decreasing = false;  // max_abs_defect strictly decreasing in R
    bool slack_decreasing = false;
    bool inequality_holds = false;
    /// Samples with |Lap u|_2 above this are beyond grid resolution and are not compared.
    double resolved_lap_limit = 0.0;
    std::size_t excluded_unresolved = 0;
};

/// Smallest C with |dM/dt - 8Q| <= C slack_shape on every sample and radius of a reference run.
double calibrate_slack_constant(const std::vector<DiagnosticsRecord>& samples,
                                const std::vector<double>& radii, const PhysicalParams& p);

/// Compares recorded virial rates against 8Q per radius. Samples must carry virial columns
/// in the order of `radii`.
RateComparison virial_rate_check(const std::vector<DiagnosticsRecord>& samples,
                                 const std::vector<double>& radii, const PhysicalParams& p,
                                 double slack_constant, double resolved_lap_limit);

/// |Lap u|_2 bound beyond which the lattice cannot represent the state:
/// (2/3 k_max)^2 |u|_2 scaled by `fraction`.
double resolvable_lap_limit(const Grid& grid, double mass, double fraction = 0.25);

}  // namespace bnls
