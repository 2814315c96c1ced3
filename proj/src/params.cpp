#include "bnls/params.hpp"

#include <cmath>
#include <sstream>

#include "bnls/error.hpp"

namespace bnls {

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::MassSubcritical: return "mass-subcritical";
    case Regime::MassCritical: return "mass-critical";
    case Regime::MassSupercritical: return "mass-supercritical";
    }
    return "unknown";
}

std::string to_string(InstabilityClass c)
{
    switch (c) {
    case InstabilityClass::FiniteTime: return "finite-time instability regime";
    case InstabilityClass::FiniteOrInfiniteTime: return "finite-or-infinite-time instability regime";
    case InstabilityClass::NotCovered: return "no instability statement";
    }
    return "unknown";
}

double PhysicalParams::sobolev_exponent() const
{
    if (dim <= 4) return std::numeric_limits<double>::infinity();
    return 4.0 * dim / (dim - 4.0);
}

bool PhysicalParams::is_mass_critical() const
{
    return std::abs(sigma_n() - 4.0) <= kCriticalTol * 4.0;
}

void PhysicalParams::validate() const
{
    std::ostringstream msg;
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        msg << "gamma must be positive (hypothesis gamma > 0), got " << gamma;
    } else if (!(omega > 0.0) || !std::isfinite(omega)) {
        msg << "omega must be positive (hypothesis omega > 0), got " << omega;
    } else if (!(mu >= 0.0) || !std::isfinite(mu)) {
        msg << "mu must be nonnegative (hypothesis mu >= 0), got " << mu;
    } else if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        msg << "sigma must be positive, got " << sigma;
    } else if (dim < 1) {
        msg << "dimension N must be >= 1, got " << dim;
    } else if (!(sigma_n() < sobolev_exponent())) {
        msg << "sigma*N < 4N/(N-4) violated: sigma*N = " << sigma_n()
            << " >= " << sobolev_exponent() << " for N = " << dim;
    } else {
        return;
    }
    throw ValidationError(msg.str());
}

Regime PhysicalParams::regime() const
{
    if (is_mass_critical()) return Regime::MassCritical;
    return sigma_n() < 4.0 ? Regime::MassSubcritical : Regime::MassSupercritical;
}

InstabilityClass PhysicalParams::instability_class() const
{
    const bool critical = is_mass_critical();
    const bool super = !critical && sigma_n() > 4.0;
    const bool below_sobolev = sigma_n() < sobolev_exponent();
    if (dim >= 2 && sigma <= 4.0 && below_sobolev) {
        if (mu > 0.0 && (critical || super)) return InstabilityClass::FiniteTime;
        if (mu == 0.0 && super) return InstabilityClass::FiniteTime;
    }
    if (mu == 0.0 && critical && dim >= 2) return InstabilityClass::FiniteOrInfiniteTime;
    if (dim >= 2 && dim <= 4 && sigma > 4.0) return InstabilityClass::FiniteOrInfiniteTime;
    return InstabilityClass::NotCovered;
}

std::string PhysicalParams::describe() const
{
    std::ostringstream s;
    s << to_string(regime()) << ", mu" << (mu == 0.0 ? "=0" : ">0") << " ("
      << to_string(instability_class()) << ")";
    return s.str();
}

bool operator==(const PhysicalParams& a, const PhysicalParams& b)
{
    return a.gamma == b.gamma && a.mu == b.mu && a.omega == b.omega && a.sigma == b.sigma &&
           a.dim == b.dim;
}

}  // namespace bnls
