#include "bnls/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bnls/error.hpp"
#include "bnls/log.hpp"
#include "bnls/spectral.hpp"

namespace bnls {

void SolverConfig::validate() const
{
    if (max_iters < 1) throw ValidationError("solver.max_iters must be >= 1");
    if (!(residual_tol > 0.0)) throw ValidationError("solver.residual_tol must be positive");
    if (stabilizer_exponent && !(*stabilizer_exponent > 0.0)) {
        throw ValidationError("solver.stabilizer_exponent must be positive");
    }
    if (!grid) throw ValidationError("solver config has no grid");
    if (stagnation_window < 1) throw ValidationError("solver.stagnation_window must be >= 1");
}

double IdentityDefects::max() const { return std::max({nehari, pohozaev, virial}); }

IdentityDefects identity_defects(const FunctionalReport& r, const PhysicalParams& p)
{
    const double s = r.quadratic_scale(p);
    if (!(s > 0.0)) return {0.0, 0.0, 0.0};
    return {std::abs(r.nehari) / s, std::abs(r.pohozaev) / s, std::abs(r.virial) / s};
}

namespace {

std::vector<double> linear_symbol(const Grid& g, const PhysicalParams& p)
{
    const auto& k2 = g.k_squared();
    std::vector<double> s(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) s[i] = p.gamma * k2[i] * k2[i] + p.mu * k2[i] + p.omega;
    return s;
}

double power_nonlinearity(double u, double sigma)
{
    return std::pow(u * u, sigma) * u;
}

struct Iterate {
    std::vector<cplx> u_hat;
    std::vector<cplx> n_hat;
    double lin_inner;  // <L u, u>
    double nl_inner;   // <|u|^{2 sigma} u, u>
    double residual;
};

Iterate analyse(const std::vector<double>& u, const std::vector<double>& symbol, const Grid& g,
                double sigma)
{
    auto& tr = transform_for(g);
    Iterate it;
    it.u_hat.assign(u.begin(), u.end());
    it.n_hat.resize(u.size());
    double nl = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double nv = power_nonlinearity(u[i], sigma);
        it.n_hat[i] = nv;
        nl += nv * u[i];
    }
    tr.forward_inplace(it.u_hat);
    tr.forward_inplace(it.n_hat);
    double lin = 0.0;
    double res = 0.0;
    double lu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const cplx l = symbol[i] * it.u_hat[i];
        lin += symbol[i] * std::norm(it.u_hat[i]);
        res += std::norm(l - it.n_hat[i]);
        lu += std::norm(l);
    }
    it.lin_inner = lin * g.cell_volume() / static_cast<double>(g.cell_count());
    it.nl_inner = nl * g.cell_volume();
    it.residual = lu > 0.0 ? std::sqrt(res / lu) : std::numeric_limits<double>::infinity();
    return it;
}

std::vector<double> initial_profile(const SolverConfig& cfg)
{
    const auto& g = *cfg.grid;
    if (const auto* gg = std::get_if<GaussianGuess>(&cfg.initial_guess)) {
        std::vector<double> u(g.cell_count());
        const auto& r = g.radius();
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double q = r[i] / gg->width;
            u[i] = gg->amplitude * std::exp(-0.5 * q * q);
        }
        return u;
    }
    const auto& f = std::get<Field>(cfg.initial_guess);
    require_same_grid(g, f.grid(), "solve: initial guess");
    f.require_finite("solve: initial guess");
    return f.real_part();
}

double l2(const std::vector<double>& u)
{
    return std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
}

std::size_t center_index(const Grid& g)
{
    std::size_t idx = 0;
    for (int a = 0; a < g.dim(); ++a) idx += static_cast<std::size_t>(g.points_per_axis() / 2) * g.stride(a);
    return idx;
}

}  // namespace

Field fixed_point_map(const Field& u, const PhysicalParams& p, double theta)
{
    const auto& g = u.grid();
    const auto symbol = linear_symbol(g, p);
    const auto it = analyse(u.real_part(), symbol, g, p.sigma);
    if (!(it.nl_inner > 0.0)) throw DegenerateFixedPointError("fixed_point_map: <N(u), u> <= 0");
    const double m = std::pow(it.lin_inner / it.nl_inner, theta);
    std::vector<cplx> next(it.n_hat.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = m * it.n_hat[i] / symbol[i];
    transform_for(g).inverse_inplace(next);
    for (auto& z : next) z = cplx{z.real(), 0.0};
    return Field(u.grid_ptr(), std::move(next));
}

double stationary_residual(const Field& u, const PhysicalParams& p)
{
    const auto& g = u.grid();
    const auto symbol = linear_symbol(g, p);
    auto& tr = transform_for(g);
    std::vector<cplx> uh(u.values().begin(), u.values().end());
    std::vector<cplx> nh(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) nh[i] = std::pow(std::norm(u[i]), p.sigma) * u[i];
    tr.forward_inplace(uh);
    tr.forward_inplace(nh);
    double res = 0.0;
    double lu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const cplx l = symbol[i] * uh[i];
        res += std::norm(l - nh[i]);
        lu += std::norm(l);
    }
    return lu > 0.0 ? std::sqrt(res / lu) : std::numeric_limits<double>::infinity();
}

GroundStateResult solve(const PhysicalParams& p, const SolverConfig& cfg)
{
    p.validate();
    cfg.validate();
    const auto& g = *cfg.grid;
    if (g.dim() != p.dim) throw StructuralError("solve: grid dimension differs from model dimension");

    if (p.mu >= 2.0 * std::sqrt(p.gamma * p.omega)) {
        note("mu >= 2 sqrt(gamma omega): every ground state is radially symmetric in this regime");
    }

    const double theta = cfg.stabilizer_exponent.value_or((2.0 * p.sigma + 1.0) / (2.0 * p.sigma));
    const auto symbol = linear_symbol(g, p);
    auto& tr = transform_for(g);

    std::vector<double> u = initial_profile(cfg);
    const double norm0 = l2(u);
    if (!(norm0 > 0.0)) {
        throw DegenerateFixedPointError("solve: zero initial guess is a trivial fixed point");
    }

    std::vector<double> history;
    double best = std::numeric_limits<double>::infinity();
    int best_iter = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    std::vector<cplx> next(u.size());

    for (iter = 0; iter < cfg.max_iters; ++iter) {
        const auto it = analyse(u, symbol, g, p.sigma);
        residual = it.residual;
        history.push_back(residual);
        if (!std::isfinite(residual)) throw PoisonedStateError("solve: residual became non-finite");
        if (residual <= cfg.residual_tol) {
            converged = true;
            break;
        }
        if (residual < 0.99 * best) {
            best = residual;
            best_iter = iter;
        } else if (iter - best_iter >= cfg.stagnation_window) {
            break;
        }
        if (!(it.nl_inner > 0.0)) {
            throw DegenerateFixedPointError("solve: iterate has no nonlinear content");
        }
        const double m = std::pow(it.lin_inner / it.nl_inner, theta);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = m * it.n_hat[i] / symbol[i];
        tr.inverse_inplace(next);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = next[i].real();
        if (l2(u) < 1e-12 * norm0) {
            throw DegenerateFixedPointError("solve: iterate collapsed to the zero solution");
        }
    }

    if (u[center_index(g)] < 0.0) {
        for (auto& v : u) v = -v;
    }
    Field profile = Field::from_real(cfg.grid, u);
    const auto report = evaluate_all(profile, p);
    const double br = boundary_ratio(profile);
    if (br > kBoundaryWarnRatio) {
        std::ostringstream msg;
        msg << "solve: profile boundary amplitude is " << br
            << " of its maximum; enlarge half_width for whole-space accuracy";
        warn(msg.str());
    }
    return GroundStateResult{.profile = std::move(profile),
                             .residual = residual,
                             .report = report,
                             .identity_defects = identity_defects(report, p),
                             .iterations = iter,
                             .converged = converged,
                             .residual_history = std::move(history)};
}

std::vector<GaussianGuess> default_multistart_guesses(int count)
{
    static constexpr std::array<GaussianGuess, 6> base{
        GaussianGuess{1.0, 1.0}, GaussianGuess{0.7, 1.5}, GaussianGuess{1.5, 0.8},
        GaussianGuess{2.0, 0.5}, GaussianGuess{0.5, 2.0}, GaussianGuess{1.2, 1.2}};
    std::vector<GaussianGuess> out;
    for (int i = 0; i < count; ++i) {
        auto g = base[static_cast<std::size_t>(i) % base.size()];
        g.width *= 1.0 + 0.1 * static_cast<double>(i / static_cast<int>(base.size()));
        out.push_back(g);
    }
    return out;
}

GroundStateResult solve_multistart(const PhysicalParams& p, const SolverConfig& cfg,
                                   const std::vector<GaussianGuess>& guesses)
{
    if (guesses.empty()) return solve(p, cfg);
    std::optional<GroundStateResult> best;
    std::optional<GroundStateResult> last;
    for (const auto& guess : guesses) {
        auto c = cfg;
        c.initial_guess = guess;
        GroundStateResult r = solve(p, c);
        if (r.converged && (!best || r.report.action < best->report.action)) {
            best = r;
        }
        last = std::move(r);
    }
    return best ? std::move(*best) : std::move(*last);
}

double radial_symmetry_defect(const Field& u)
{
    const auto& g = u.grid();
    const int d = g.dim();
    const int m = g.points_per_axis();
    const double mx = u.max_abs();
    if (mx == 0.0) return 0.0;
    std::array<int, 3> perm{0, 1, 2};
    double worst = 0.0;
    do {
        for (int mask = 0; mask < (1 << d); ++mask) {
            for (std::size_t idx = 0; idx < u.size(); ++idx) {
                std::size_t image = 0;
                for (int a = 0; a < d; ++a) {
                    int i = g.axis_index(idx, perm[static_cast<std::size_t>(a)]);
                    if (mask & (1 << a)) i = (m - i) % m;
                    image += static_cast<std::size_t>(i) * g.stride(a);
                }
                worst = std::max(worst, std::abs(u[image] - u[idx]));
            }
        }
    } while (std::next_permutation(perm.begin(), perm.begin() + d));
    return worst / mx;
}

Certificate certify(const GroundStateResult& r, const PhysicalParams& p, double identity_tol)
{
    if (!r.converged) throw PreconditionError("certify: ground-state result did not converge");
    Certificate c;
    c.defects = r.identity_defects;
    c.identity_tolerance = identity_tol;
    const double sn = p.sigma_n();
    const auto& rep = r.report;
    c.energy0 = rep.energy0;
    c.energy0_decomposition = (sn - 4.0) * p.gamma / (2.0 * sn) * rep.lap_norm_sq +
                              (sn - 2.0) * p.mu / (2.0 * sn) * rep.grad_norm_sq;
    c.exceptional_case = p.is_mass_critical() && p.mu == 0.0;
    const double lap_scale = p.gamma * rep.lap_norm_sq;
    const double denom = c.exceptional_case ? lap_scale : std::abs(c.energy0_decomposition);
    c.decomposition_residual = denom > 0.0 ? std::abs(c.energy0 - c.energy0_decomposition) / denom : 0.0;
    c.energy0_sign_applicable = sn >= 4.0 || p.is_mass_critical();
    if (c.energy0_sign_applicable) {
        c.energy0_sign_ok = c.exceptional_case ? std::abs(c.energy0) <= 1e-6 * lap_scale : c.energy0 > 0.0;
    }
    c.radial_symmetry_defect = radial_symmetry_defect(r.profile);
    c.ground_state_energy_estimate = rep.action;
    c.notes.push_back("ground-state energy estimate: E_omega of the computed profile; the solver "
                      "cannot certify global minimality among critical points");
    if (p.mu >= 2.0 * std::sqrt(p.gamma * p.omega)) {
        c.notes.push_back("mu >= 2 sqrt(gamma omega): every ground state is radially symmetric");
    }
    if (!c.energy0_sign_applicable) {
        c.notes.push_back("sigma N < 4: positivity of E_0 is not asserted");
    }
    c.accepted = c.defects.max() <= identity_tol && c.decomposition_residual <= std::max(identity_tol, 1e-7) &&
                 (!c.energy0_sign_applicable || c.energy0_sign_ok);
    return c;
}

}  // namespace bnls
