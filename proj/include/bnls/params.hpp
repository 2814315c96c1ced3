#pragma once

#include <limits>
#include <string>

namespace bnls {

/// Position of sigma*N relative to the mass-critical exponent 4.
enum class Regime { MassSubcritical, MassCritical, MassSupercritical };

/// Which blow-up statement, if any, covers a parameter set.
enum class InstabilityClass {
    FiniteTime,           // radial ground states blow up in finite time
    FiniteOrInfiniteTime, // blow-up in finite or infinite time
    NotCovered,
};

std::string to_string(Regime r);
std::string to_string(InstabilityClass c);

/// Model coefficients of
///   i psi_t - gamma Lap^2 psi + mu Lap psi + |psi|^{2 sigma} psi = 0
/// together with the standing-wave frequency omega and the spatial dimension N.
struct PhysicalParams {
    double gamma = 1.0;
    double mu = 1.0;
    double omega = 1.0;
    double sigma = 2.0;
    int dim = 2;

    /// Throws ValidationError naming the violated hypothesis.
    void validate() const;

    double sigma_n() const { return sigma * dim; }

    /// 4N/(N-4) for N >= 5, +inf otherwise.
    double sobolev_exponent() const;

    Regime regime() const;
    InstabilityClass instability_class() const;

    /// Human-readable regime label, e.g. "mass-critical, mu=0 (finite-or-infinite-time instability regime)".
    std::string describe() const;

    /// Power 2 sigma + 2 of the potential term.
    double potential_power() const { return 2.0 * sigma + 2.0; }

    /// Relative tolerance used when deciding sigma*N == 4.
    static constexpr double kCriticalTol = 1e-12;
    bool is_mass_critical() const;
};

bool operator==(const PhysicalParams& a, const PhysicalParams& b);

}  // namespace bnls
