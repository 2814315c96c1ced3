#include "bnls/virial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bnls/error.hpp"
#include "bnls/log.hpp"
#include "bnls/spectral.hpp"

namespace bnls {

namespace {

constexpr int kDegree = 11;
constexpr int kAuditPoints = 100000;

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Monomial coefficients of S(x) = x^6 sum_{k=0}^{5} C(5+k, k) (1-x)^k.
std::array<double, kDegree + 1> smoothstep_coefficients()
{
    std::array<double, kDegree + 1> c{};
    for (int k = 0; k <= 5; ++k) {
        const double a = binomial(5 + k, k);
        for (int j = 0; j <= k; ++j) {
            c[6 + j] += a * binomial(k, j) * ((j % 2) ? -1.0 : 1.0);
        }
    }
    return c;
}

const std::array<double, kDegree + 1>& S_coeffs()
{
    static const auto c = smoothstep_coefficients();
    return c;
}

// Coefficients of the antiderivative of 9 (1 + 9x)(1 - S(x)), vanishing at x = 0.
const std::array<double, kDegree + 3>& transition_antiderivative()
{
    static const auto a = [] {
        std::array<double, kDegree + 2> g{};  // 9 (1 + 9x)(1 - S(x))
        std::array<double, kDegree + 1> one_minus_s{};
        for (int i = 0; i <= kDegree; ++i) one_minus_s[i] = -S_coeffs()[i];
        one_minus_s[0] += 1.0;
        for (int i = 0; i <= kDegree; ++i) {
            g[i] += 9.0 * one_minus_s[i];
            g[i + 1] += 81.0 * one_minus_s[i];
        }
        std::array<double, kDegree + 3> out{};
        for (int i = 0; i <= kDegree + 1; ++i) out[i + 1] = g[i] / (i + 1);
        return out;
    }();
    return a;
}

// Antiderivative of 9 (10 - 9y) S(y), vanishing at y = 0: the integrand above with x = 1 - y.
const std::array<double, kDegree + 3>& tail_antiderivative()
{
    static const auto a = [] {
        std::array<double, kDegree + 2> g{};
        for (int i = 0; i <= kDegree; ++i) {
            g[i] += 90.0 * S_coeffs()[i];
            g[i + 1] -= 81.0 * S_coeffs()[i];
        }
        std::array<double, kDegree + 3> out{};
        for (int i = 0; i <= kDegree + 1; ++i) out[i + 1] = g[i] / (i + 1);
        return out;
    }();
    return a;
}

template <std::size_t K>
double horner(const std::array<double, K>& c, double x)
{
    double r = 0.0;
    for (std::size_t i = K; i-- > 0;) r = r * x + c[i];
    return r;
}

double transition_integral(double x)
{
    if (x <= 0.5) return horner(transition_antiderivative(), x);
    static const double total = horner(transition_antiderivative(), 1.0);
    return total - horner(tail_antiderivative(), 1.0 - x);
}

}  // namespace

double smoothstep5(double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x > 0.5) return 1.0 - horner(S_coeffs(), 1.0 - x);
    return horner(S_coeffs(), x);
}

double smoothstep5_derivative(double x)
{
    if (x <= 0.0 || x >= 1.0) return 0.0;
    // S'(x) = 11!/(5! 5!) x^5 (1-x)^5
    const double y = x * (1.0 - x);
    return 2772.0 * y * y * y * y * y;
}

double VirialCutoff::base_phi_prime(double s)
{
    if (s <= 1.0) return s;
    if (s >= 10.0) return 0.0;
    return s * (1.0 - smoothstep5((s - 1.0) / 9.0));
}

double VirialCutoff::base_phi_second(double s)
{
    if (s <= 1.0) return 1.0;
    if (s >= 10.0) return 0.0;
    const double x = (s - 1.0) / 9.0;
    return (1.0 - smoothstep5(x)) - s * smoothstep5_derivative(x) / 9.0;
}

double VirialCutoff::base_phi(double s)
{
    if (s <= 1.0) return 0.5 * s * s;
    const double x = std::min((s - 1.0) / 9.0, 1.0);
    return 0.5 + transition_integral(x);
}

VirialCutoff::VirialCutoff(double R) : R_(R)
{
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("build_cutoff: R must be positive");
    cert_.audit_points = kAuditPoints;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kAuditPoints; ++i) {
        const double s = 12.0 * i / (kAuditPoints - 1);
        worst = std::max(worst, base_phi_second(s));
    }
    cert_.max_phi_second = worst;
    if (worst > 1.0 + 1e-12) throw StructuralError("build_cutoff: audited phi'' exceeds 1");
}

double VirialCutoff::phi(double r) const { return R_ * R_ * base_phi(r / R_); }
double VirialCutoff::phi_prime(double r) const { return R_ * base_phi_prime(r / R_); }
double VirialCutoff::phi_second(double r) const { return base_phi_second(r / R_); }

double VirialCutoff::weight(double r) const
{
    const double s = r / R_;
    if (s <= 1.0) return 1.0;
    if (s >= 10.0) return 0.0;
    return 1.0 - smoothstep5((s - 1.0) / 9.0);
}

VirialCutoff build_cutoff(double R, const Grid& grid)
{
    VirialCutoff c(R);
    if (10.0 * R > 0.9 * grid.half_width()) {
        std::ostringstream msg;
        msg << "build_cutoff: 10R = " << 10.0 * R << " exceeds 0.9 L = " << 0.9 * grid.half_width()
            << "; the flat outer region lies outside the box";
        warn(msg.str());
    }
    return c;
}

namespace {

// x . grad f for lattice values, with spectral derivatives.
std::vector<cplx> dilation_derivative(const Grid& g, std::span<const cplx> f_hat)
{
    auto& tr = transform_for(g);
    std::vector<cplx> out(g.cell_count(), 0.0);
    std::vector<cplx> tmp(g.cell_count());
    for (int axis = 0; axis < g.dim(); ++axis) {
        for (std::size_t i = 0; i < tmp.size(); ++i) {
            tmp[i] = f_hat[i] * cplx{0.0, g.k_odd(g.axis_index(i, axis))};
        }
        tr.inverse_inplace(tmp);
        for (std::size_t i = 0; i < tmp.size(); ++i) {
            out[i] += g.coordinate(g.axis_index(i, axis)) * tmp[i];
        }
    }
    return out;
}

// 2 Im sum conj(a) w (x . grad b) h^N
double weighted_pairing(const Grid& g, std::span<const cplx> a, std::span<const cplx> xgrad_b,
                        const VirialCutoff& c)
{
    const auto& r = g.radius();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = c.weight(r[i]);
        if (w == 0.0) continue;
        s += w * std::imag(std::conj(a[i]) * xgrad_b[i]);
    }
    return 2.0 * s * g.cell_volume();
}

struct RateTerms {
    std::vector<cplx> u;
    std::vector<cplx> ut;
    std::vector<cplx> xgrad_u;
    std::vector<cplx> xgrad_ut;
};

RateTerms rate_terms(const Field& u, const PhysicalParams& p)
{
    const Grid& g = u.grid();
    auto& tr = transform_for(g);
    RateTerms t;
    t.u.assign(u.values().begin(), u.values().end());
    std::vector<cplx> u_hat(t.u);
    tr.forward_inplace(u_hat);
    t.xgrad_u = dilation_derivative(g, u_hat);

    // u_t = -i (gamma Lap^2 u - mu Lap u - |u|^{2 sigma} u)
    const auto& k2 = g.k_squared();
    std::vector<cplx> lin(u_hat.size());
    for (std::size_t i = 0; i < lin.size(); ++i) {
        lin[i] = (p.gamma * k2[i] * k2[i] + p.mu * k2[i]) * u_hat[i];
    }
    tr.inverse_inplace(lin);
    t.ut.resize(lin.size());
    for (std::size_t i = 0; i < lin.size(); ++i) {
        const double a = std::pow(std::norm(t.u[i]), p.sigma);
        t.ut[i] = cplx{0.0, -1.0} * (lin[i] - a * t.u[i]);
    }
    std::vector<cplx> ut_hat(t.ut);
    tr.forward_inplace(ut_hat);
    t.xgrad_ut = dilation_derivative(g, ut_hat);
    return t;
}

double rate_from_terms(const Grid& g, const RateTerms& t, const VirialCutoff& c)
{
    return weighted_pairing(g, t.ut, t.xgrad_u, c) + weighted_pairing(g, t.u, t.xgrad_ut, c);
}

}  // namespace

double virial(const Field& u, const VirialCutoff& c)
{
    u.require_finite("virial");
    const Grid& g = u.grid();
    std::vector<cplx> u_hat(u.values().begin(), u.values().end());
    transform_for(g).forward_inplace(u_hat);
    const auto xg = dilation_derivative(g, u_hat);
    return weighted_pairing(g, u.values(), xg, c);
}

double virial_rate(const Field& u, const VirialCutoff& c, const PhysicalParams& p)
{
    u.require_finite("virial_rate");
    const auto t = rate_terms(u, p);
    return rate_from_terms(u.grid(), t, c);
}

double virial_along(const Field& u, const std::vector<std::vector<double>>& field)
{
    u.require_finite("virial_along");
    const Grid& g = u.grid();
    if (field.size() != static_cast<std::size_t>(g.dim())) {
        throw StructuralError("virial_along: expected one component per axis");
    }
    double s = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
        if (field[axis].size() != u.size()) throw StructuralError("virial_along: component size mismatch");
        const Field d = partial(u, axis);
        for (std::size_t i = 0; i < u.size(); ++i) {
            s += field[axis][i] * std::imag(std::conj(u[i]) * d[i]);
        }
    }
    return 2.0 * s * g.cell_volume();
}

SampleHook virial_hook(std::vector<VirialCutoff> cutoffs, const PhysicalParams& p)
{
    return [cutoffs = std::move(cutoffs), p](const Field& u, DiagnosticsRecord& rec) {
        const auto t = rate_terms(u, p);
        const Grid& g = u.grid();
        rec.virial_M.clear();
        rec.virial_rate.clear();
        for (const auto& c : cutoffs) {
            rec.virial_M.push_back(weighted_pairing(g, t.u, t.xgrad_u, c));
            rec.virial_rate.push_back(rate_from_terms(g, t, c));
        }
    };
}

void fill_virial_rate_fd(std::vector<DiagnosticsRecord>& s, double max_spacing)
{
    if (s.size() < 3) throw PreconditionError("virial rate: need at least three samples");
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double h = s[i].t - s[i - 1].t;
        if (!(h > 0.0)) throw PreconditionError("virial rate: sample times must increase strictly");
        if (h > max_spacing * (1.0 + 1e-9)) {
            std::ostringstream msg;
            msg << "virial rate: sample spacing " << h << " exceeds " << max_spacing
                << "; sample more densely";
            throw PreconditionError(msg.str());
        }
        if (s[i].virial_M.size() != s[0].virial_M.size()) {
            throw StructuralError("virial rate: inconsistent virial columns");
        }
    }
    const std::size_t n = s.size();
    const std::size_t nr = s[0].virial_M.size();
    for (auto& rec : s) rec.virial_rate_fd.assign(nr, 0.0);
    for (std::size_t j = 0; j < nr; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            // Three-point stencil on (possibly non-uniform) times; one-sided at the ends.
            const std::size_t a = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
            const double t0 = s[a].t, t1 = s[a + 1].t, t2 = s[a + 2].t, t = s[i].t;
            const double w0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
            const double w1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
            const double w2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
            s[i].virial_rate_fd[j] =
                w0 * s[a].virial_M[j] + w1 * s[a + 1].virial_M[j] + w2 * s[a + 2].virial_M[j];
        }
    }
}

const std::vector<double>& critical_etas()
{
    static const std::vector<double> etas{1e-2, 1e-4};
    return etas;
}

namespace {

bool critical_mu0(const PhysicalParams& p)
{
    return p.mu == 0.0 && p.is_mass_critical();
}

double best_eta(double R)
{
    double best = 0.0, val = std::numeric_limits<double>::infinity();
    for (double eta : critical_etas()) {
        const double v = 1.0 / (eta * R * R) + std::sqrt(eta);
        if (v < val) {
            val = v;
            best = eta;
        }
    }
    return best;
}

}  // namespace

double slack_shape(double R, double grad_norm, const PhysicalParams& p)
{
    if (critical_mu0(p)) {
        const double eta = best_eta(R);
        return 1.0 / (eta * R * R) + std::sqrt(eta);
    }
    const double N = p.dim;
    return std::pow(R, -4.0) + grad_norm * grad_norm / (R * R) +
           std::pow(grad_norm, p.sigma) * std::pow(R, -p.sigma * (N - 1.0)) + p.mu / (R * R);
}

double calibrate_slack_constant(const std::vector<DiagnosticsRecord>& samples,
                                const std::vector<double>& radii, const PhysicalParams& p)
{
    double C = 0.0;
    for (const auto& s : samples) {
        if (s.virial_rate.size() != radii.size()) {
            throw StructuralError("calibrate_slack_constant: samples lack virial columns");
        }
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double defect = std::abs(s.virial_rate[j] - 8.0 * s.report.virial);
            C = std::max(C, defect / slack_shape(radii[j], s.grad_norm, p));
        }
    }
    return C;
}

RateComparison virial_rate_check(const std::vector<DiagnosticsRecord>& samples,
                                 const std::vector<double>& radii, const PhysicalParams& p,
                                 double slack_constant, double resolved_lap_limit)
{
    RateComparison out;
    out.slack_constant = slack_constant;
    out.resolved_lap_limit = resolved_lap_limit;
    out.rows.resize(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) {
        out.rows[j].R = radii[j];
        out.rows[j].max_signed_defect = -std::numeric_limits<double>::infinity();
        if (critical_mu0(p)) out.rows[j].best_eta = best_eta(radii[j]);
    }
    for (const auto& s : samples) {
        if (s.virial_rate.size() != radii.size()) {
            throw StructuralError("virial_rate_check: samples lack virial columns");
        }
        if (s.lap_norm > resolved_lap_limit) {
            ++out.excluded_unresolved;
            continue;
        }
        for (std::size_t j = 0; j < radii.size(); ++j) {
            auto& row = out.rows[j];
            const double defect = s.virial_rate[j] - 8.0 * s.report.virial;
            const double slack = slack_constant * slack_shape(radii[j], s.grad_norm, p);
            row.max_abs_defect = std::max(row.max_abs_defect, std::abs(defect));
            row.max_signed_defect = std::max(row.max_signed_defect, defect);
            if (j < s.virial_rate_fd.size()) {
                row.max_abs_defect_fd =
                    std::max(row.max_abs_defect_fd, std::abs(s.virial_rate_fd[j] - 8.0 * s.report.virial));
            }
            row.slack_max = std::max(row.slack_max, slack);
            if (defect > slack) ++row.violations;
            ++row.compared;
        }
    }
    out.defect_decreasing = true;
    out.slack_decreasing = true;
    out.inequality_holds = true;
    for (std::size_t j = 0; j < out.rows.size(); ++j) {
        if (out.rows[j].violations > 0 || out.rows[j].compared == 0) out.inequality_holds = false;
        if (j == 0) continue;
        if (!(out.rows[j].max_abs_defect < out.rows[j - 1].max_abs_defect)) out.defect_decreasing = false;
        if (!(out.rows[j].slack_max < out.rows[j - 1].slack_max)) out.slack_decreasing = false;
    }
    return out;
}

double resolvable_lap_limit(const Grid& grid, double mass, double fraction)
{
    const double kmax = M_PI / grid.spacing();
    const double kd = 2.0 / 3.0 * kmax;
    return fraction * kd * kd * std::sqrt(mass);
}

}  // namespace bnls
