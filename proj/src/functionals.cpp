#include "bnls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bnls/error.hpp"
#include "bnls/log.hpp"
#include "bnls/spectral.hpp"

namespace bnls {

double FunctionalReport::quadratic_scale(const PhysicalParams& p) const
{
    return p.gamma * lap_norm_sq + p.omega * mass;
}

FunctionalReport report_from_norms(double mass, double grad_norm_sq, double lap_norm_sq,
                                   double potential, const PhysicalParams& p)
{
    const double n = p.dim;
    const double pw = p.potential_power();
    FunctionalReport r;
    r.mass = mass;
    r.grad_norm_sq = grad_norm_sq;
    r.lap_norm_sq = lap_norm_sq;
    r.potential = potential;
    r.energy0 = 0.5 * p.gamma * lap_norm_sq + 0.5 * p.mu * grad_norm_sq - potential / pw;
    r.action = r.energy0 + 0.5 * p.omega * mass;
    r.nehari = p.gamma * lap_norm_sq + p.mu * grad_norm_sq + p.omega * mass - potential;
    r.pohozaev = 0.5 * (n - 4.0) * p.gamma * lap_norm_sq + 0.5 * (n - 2.0) * p.mu * grad_norm_sq +
                 0.5 * n * p.omega * mass - n / pw * potential;
    r.virial = p.gamma * lap_norm_sq + 0.5 * p.mu * grad_norm_sq -
               p.sigma * n / (2.0 * pw) * potential;
    return r;
}

FunctionalReport evaluate_all(const Field& u, const PhysicalParams& p)
{
    u.require_finite("evaluate_all");
    const auto& g = u.grid();
    if (g.dim() != p.dim) {
        throw StructuralError("evaluate_all: grid dimension " + std::to_string(g.dim()) +
                              " differs from model dimension " + std::to_string(p.dim));
    }
    std::vector<cplx> c(u.values().begin(), u.values().end());
    transform_for(g).forward_inplace(c);
    const auto& k2 = g.k_squared();
    double grad = 0.0;
    double lap = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = std::norm(c[i]);
        grad += k2[i] * w;
        lap += k2[i] * k2[i] * w;
    }
    const double spec_scale = g.cell_volume() / static_cast<double>(g.cell_count());

    double mass = 0.0;
    double pot = 0.0;
    const double half_power = p.sigma + 1.0;
    for (const auto& z : u.values()) {
        const double a2 = std::norm(z);
        mass += a2;
        pot += std::pow(a2, half_power);
    }
    return report_from_norms(mass * g.cell_volume(), grad * spec_scale, lap * spec_scale,
                             pot * g.cell_volume(), p);
}

namespace {

// Applies a dense per-axis matrix (rows: output lattice index, cols: input frequency index)
// to every line of `data` along `axis`.
void contract_axis(const Grid& g, std::vector<cplx>& data, int axis, const std::vector<cplx>& matrix)
{
    const std::size_t m = static_cast<std::size_t>(g.points_per_axis());
    const std::size_t stride = g.stride(axis);
    std::vector<cplx> line(m);
    std::vector<cplx> out(m);
    for (std::size_t base = 0; base < data.size(); ++base) {
        if (g.axis_index(base, axis) != 0) continue;
        for (std::size_t j = 0; j < m; ++j) line[j] = data[base + j * stride];
        for (std::size_t i = 0; i < m; ++i) {
            cplx acc{0.0, 0.0};
            const cplx* row = &matrix[i * m];
            for (std::size_t j = 0; j < m; ++j) acc += row[j] * line[j];
            out[i] = acc;
        }
        for (std::size_t i = 0; i < m; ++i) data[base + i * stride] = out[i];
    }
}

}  // namespace

Field rescale(const Field& u, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("rescale: lambda must be positive, got " + std::to_string(lambda));
    }
    if (lambda == 1.0) return u;
    u.require_finite("rescale");

    const auto& g = u.grid();
    const int m = g.points_per_axis();
    const double s = std::sqrt(lambda);
    const double L = g.half_width();

    if (s > 1.0) {
        // Samples u(s x) wrap around the box for |x| > L/s.
        double outside = 0.0;
        for (std::size_t idx = 0; idx < u.size(); ++idx) {
            for (int a = 0; a < g.dim(); ++a) {
                if (std::abs(g.coordinate(g.axis_index(idx, a))) * s >= L) {
                    outside = std::max(outside, std::abs(u[idx]));
                }
            }
        }
        const double mx = u.max_abs();
        if (mx > 0.0 && outside > kBoundaryWarnRatio * mx) {
            std::ostringstream msg;
            msg << "rescale: lambda=" << lambda << " maps the box edge inside the support of u ("
                << outside / mx << " relative amplitude beyond L/sqrt(lambda))";
            warn(msg.str());
        }
    }

    // Trigonometric interpolant p(y) = (1/M^d) sum_m c_m b_m(y + L) evaluated at y = s x_i;
    // the Nyquist basis function is the real cosine so that real data stays real.
    std::vector<cplx> matrix(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        const double y = s * g.coordinate(i) + L;
        for (int j = 0; j < m; ++j) {
            const double k = g.k_even(j);
            const double ph = k * y;
            matrix[static_cast<std::size_t>(i) * m + j] =
                (g.frequency(j) == -m / 2) ? cplx{std::cos(ph), 0.0} : cplx{std::cos(ph), std::sin(ph)};
        }
    }

    std::vector<cplx> c(u.values().begin(), u.values().end());
    transform_for(g).forward_inplace(c);
    for (int a = 0; a < g.dim(); ++a) contract_axis(g, c, a, matrix);

    const double factor = std::pow(lambda, g.dim() / 4.0) / static_cast<double>(g.cell_count());
    for (auto& z : c) z *= factor;
    Field out(u.grid_ptr(), std::move(c));

    if (s < 1.0 && boundary_ratio(out) > kBoundaryWarnRatio) {
        std::ostringstream msg;
        msg << "rescale: lambda=" << lambda << " spreads u_lambda to the box edge (boundary ratio "
            << boundary_ratio(out) << ")";
        warn(msg.str());
    }
    return out;
}

Field rescale(GridPtr grid, const RadialProfile& profile, double lambda, int dim)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("rescale: lambda must be positive, got " + std::to_string(lambda));
    }
    const double amp = std::pow(lambda, dim / 4.0);
    const double s = std::sqrt(lambda);
    return Field::from_radial(std::move(grid), [&](double r) { return amp * profile(s * r); });
}

ScalingExpansion::ScalingExpansion(const FunctionalReport& base, const PhysicalParams& p)
    : base_(base), params_(p)
{
}

double ScalingExpansion::action(double lambda) const
{
    const auto& p = params_;
    const double a = 0.5 * p.sigma_n();
    return 0.5 * p.gamma * lambda * lambda * base_.lap_norm_sq + 0.5 * lambda * p.mu * base_.grad_norm_sq +
           0.5 * p.omega * base_.mass - std::pow(lambda, a) * base_.potential / p.potential_power();
}

double ScalingExpansion::action_derivative(double lambda) const
{
    const auto& p = params_;
    const double a = 0.5 * p.sigma_n();
    return p.gamma * lambda * base_.lap_norm_sq + 0.5 * p.mu * base_.grad_norm_sq -
           a * std::pow(lambda, a - 1.0) * base_.potential / p.potential_power();
}

double ScalingExpansion::action_second_derivative(double lambda) const
{
    const auto& p = params_;
    const double a = 0.5 * p.sigma_n();
    return p.gamma * base_.lap_norm_sq -
           a * (a - 1.0) * std::pow(lambda, a - 2.0) * base_.potential / p.potential_power();
}

double ScalingExpansion::virial(double lambda) const
{
    const auto& p = params_;
    const double a = 0.5 * p.sigma_n();
    return p.gamma * lambda * lambda * base_.lap_norm_sq + 0.5 * p.mu * lambda * base_.grad_norm_sq -
           a * std::pow(lambda, a) * base_.potential / p.potential_power();
}

double ScalingExpansion::nehari(double lambda) const
{
    const auto& p = params_;
    return p.gamma * lambda * lambda * base_.lap_norm_sq + p.mu * lambda * base_.grad_norm_sq +
           p.omega * base_.mass - std::pow(lambda, 0.5 * p.sigma_n()) * base_.potential;
}

double ScalingExpansion::energy0(double lambda) const
{
    return action(lambda) - 0.5 * params_.omega * base_.mass;
}

FunctionalReport ScalingExpansion::report(double lambda) const
{
    return report_from_norms(base_.mass, lambda * base_.grad_norm_sq,
                             lambda * lambda * base_.lap_norm_sq,
                             std::pow(lambda, 0.5 * params_.sigma_n()) * base_.potential, params_);
}

ActionAlongScaling action_along_scaling(const FunctionalReport& base, const PhysicalParams& p,
                                        double lambda)
{
    if (!(lambda > 0.0)) throw DomainError("action_along_scaling: lambda must be positive");
    ScalingExpansion e(base, p);
    return {e.action(lambda), e.action_derivative(lambda)};
}

ActionAlongScaling action_along_scaling(const Field& u, const PhysicalParams& p, double lambda)
{
    if (!(lambda > 0.0)) throw DomainError("action_along_scaling: lambda must be positive");
    return action_along_scaling(evaluate_all(u, p), p, lambda);
}

double find_lambda0(const ScalingExpansion& e)
{
    const auto& p = e.params();
    const auto& b = e.base();
    if (p.sigma_n() < 4.0 && !p.is_mass_critical()) {
        throw RegimeError("find_lambda0 requires sigma*N >= 4, got " + std::to_string(p.sigma_n()));
    }
    const double scale = b.quadratic_scale(p);
    const double q1 = e.virial(1.0);
    if (q1 > 1e-8 * scale) {
        std::ostringstream msg;
        msg << "find_lambda0 requires Q(u) <= 0, got Q = " << q1;
        throw PreconditionError(msg.str());
    }
    if (q1 >= -1e-12 * p.gamma * b.lap_norm_sq) return 1.0;
    if (p.mu == 0.0 && p.is_mass_critical()) {
        throw RegimeError("find_lambda0: for mu = 0 and sigma*N = 4 the virial scales as lambda^2, "
                          "so Q(u) < 0 has no root along the scaling family");
    }

    double lo = 1e-8;
    while (e.virial(lo) <= 0.0) {
        lo *= 1e-2;
        if (lo < 1e-300) throw RegimeError("find_lambda0: no sign change of Q along u_lambda");
    }
    double hi = 1.0;
    for (int it = 0; it < 2000; ++it) {
        const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (e.virial(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(e.virial(lo)) < std::abs(e.virial(hi)) ? lo : hi;
}

double find_lambda0(const Field& u, const PhysicalParams& p)
{
    return find_lambda0(ScalingExpansion(evaluate_all(u, p), p));
}

bool in_M_omega(const FunctionalReport& r, const PhysicalParams& p, double tol)
{
    if (r.mass == 0.0) throw DomainError("in_M_omega: the zero field is excluded from M_omega");
    const double scale = r.quadratic_scale(p);
    return std::abs(r.virial) <= tol * scale && r.nehari <= tol * scale;
}

bool in_M_omega(const Field& u, const PhysicalParams& p, double tol)
{
    if (u.max_abs() == 0.0) throw DomainError("in_M_omega: the zero field is excluded from M_omega");
    return in_M_omega(evaluate_all(u, p), p, tol);
}

namespace {

constexpr double kMembershipTol = 1e-8;

FunctionalReport scale_amplitude(const FunctionalReport& r, double amp, const PhysicalParams& p)
{
    const double a2 = amp * amp;
    return report_from_norms(r.mass * a2, r.grad_norm_sq * a2, r.lap_norm_sq * a2,
                             r.potential * std::pow(amp, p.potential_power()), p);
}

// Amplitude at which Q(A f) = 0.
double critical_amplitude(const FunctionalReport& r, const PhysicalParams& p)
{
    const double c = p.sigma_n() / (2.0 * p.potential_power());
    const double quad = p.gamma * r.lap_norm_sq + 0.5 * p.mu * r.grad_norm_sq;
    return std::pow(quad / (c * r.potential), 1.0 / (2.0 * p.sigma));
}

PropositionSample project(const FunctionalReport& raw, const PhysicalParams& p, double overshoot,
                          double d_proxy, double tol)
{
    PropositionSample s;
    const double scale = raw.quadratic_scale(p);
    if (overshoot > 0.0) {
        s.amplitude = critical_amplitude(raw, p) * (1.0 + overshoot);
    } else if (raw.virial > kMembershipTol * scale) {
        s.amplitude = critical_amplitude(raw, p);
    }
    const auto scaled = scale_amplitude(raw, s.amplitude, p);
    ScalingExpansion e(scaled, p);
    try {
        s.lambda0 = find_lambda0(e);
    } catch (const Error&) {
        return s;
    }
    const auto at = e.report(s.lambda0);
    s.action = at.action;
    s.nehari = at.nehari;
    s.kept = in_M_omega(at, p, kMembershipTol);
    s.violation = s.kept && s.action < d_proxy - tol;
    return s;
}

void finish(PropositionReport& rep)
{
    rep.drawn = rep.samples.size();
    rep.kept = 0;
    rep.violations = 0;
    rep.min_kept_action = std::numeric_limits<double>::infinity();
    for (const auto& s : rep.samples) {
        if (!s.kept) continue;
        ++rep.kept;
        rep.violations += s.violation ? 1 : 0;
        rep.min_kept_action = std::min(rep.min_kept_action, s.action);
    }
    rep.inconclusive = rep.kept == 0;
    rep.caveat = "d_omega is estimated by E_omega of the computed ground state, an upper "
                 "estimate of the true ground-state level";
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index + 0x632be59bd9b4e019ULL)));
}

}  // namespace

PropositionReport check_proposition_samples(const Field& u_star, const PhysicalParams& p,
                                            std::span<const Field> samples, double tol_rel)
{
    const auto star = evaluate_all(u_star, p);
    PropositionReport rep;
    rep.d_proxy = star.action;
    rep.tolerance = tol_rel * std::abs(star.action);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto raw = evaluate_all(samples[i], p);
        if (raw.mass == 0.0) continue;
        auto s = project(raw, p, 0.0, rep.d_proxy, rep.tolerance);
        s.index = i;
        rep.samples.push_back(s);
    }
    finish(rep);
    return rep;
}

RadialProfile random_radial_profile(std::uint64_t seed, std::uint64_t index)
{
    auto eng = sample_engine(seed, index);
    std::uniform_int_distribution<int> terms(1, 3);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> width(0.6, 2.0);
    std::uniform_real_distribution<double> ring(0.0, 0.4);
    struct Term {
        double a, w, b;
    };
    std::vector<Term> t(static_cast<std::size_t>(terms(eng)));
    for (auto& x : t) {
        x.a = amp(eng);
        x.w = width(eng);
        x.b = ring(eng);
    }
    return [t](double r) {
        double v = 0.0;
        for (const auto& x : t) {
            const double q = r * r / (x.w * x.w);
            v += x.a * (1.0 + x.b * q) * std::exp(-0.5 * q);
        }
        return v;
    };
}

PropositionReport sample_check_proposition(const Field& u_star, const PhysicalParams& p,
                                           std::size_t n_samples, std::uint64_t seed, double tol_rel)
{
    const auto star = evaluate_all(u_star, p);
    PropositionReport rep;
    rep.d_proxy = star.action;
    rep.tolerance = tol_rel * std::abs(star.action);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const auto profile = random_radial_profile(seed, i);
        const auto raw = evaluate_all(Field::from_radial(u_star.grid_ptr(), profile), p);
        auto eng = sample_engine(seed ^ 0x5bd1e995ULL, i);
        const double overshoot = std::uniform_real_distribution<double>(1e-3, 0.3)(eng);
        auto s = project(raw, p, overshoot, rep.d_proxy, rep.tolerance);
        s.index = i;
        rep.samples.push_back(s);
    }
    finish(rep);
    return rep;
}

}  // namespace bnls
