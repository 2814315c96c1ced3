#include "bnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnls/error.hpp"
#include "bnls/log.hpp"
#include "bnls/spectral.hpp"

namespace bnls {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Completed: return "completed";
    case Verdict::BlowupDetected: return "blowup_detected";
    case Verdict::GrowthUnbounded: return "growth_unbounded";
    case Verdict::Poisoned: return "poisoned";
    }
    return "unknown";
}

void EvolveConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("evolve.dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("evolve.t_end must be >= 0");
    if (sample_every < 1) throw ValidationError("evolve.sample_every must be >= 1");
    if (!(blowup_threshold > 1.0)) throw ValidationError("evolve.blowup_threshold must exceed 1");
    if (!(local_error_tol > 0.0)) throw ValidationError("evolve.local_error_tol must be positive");
    if (!(dt_underflow_factor > 0.0 && dt_underflow_factor < 1.0)) {
        throw ValidationError("evolve.dt_underflow_factor must lie in (0, 1)");
    }
    if (grow_after < 1) throw ValidationError("evolve.grow_after must be >= 1");
}

namespace {

// |psi|^{2 sigma} from |psi|^2, with a multiplication fast path for integer sigma.
double pow_sigma(double a2, double sigma, int int_sigma)
{
    if (int_sigma > 0) {
        double r = a2;
        for (int i = 1; i < int_sigma; ++i) r *= a2;
        return r;
    }
    return std::pow(a2, sigma);
}

// Plain complex product; std::complex operator* takes the slow Annex G path under GCC.
inline void mul_inplace(cplx& z, const cplx& w)
{
    const double re = z.real() * w.real() - z.imag() * w.imag();
    const double im = z.real() * w.imag() + z.imag() * w.real();
    z = cplx{re, im};
}

int integer_sigma(double sigma)
{
    const double r = std::round(sigma);
    return (r == sigma && r >= 1.0 && r <= 16.0) ? static_cast<int>(r) : 0;
}

double l2_distance(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

double l2_norm(const std::vector<cplx>& a)
{
    double s = 0.0;
    for (const auto& z : a) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

SplitStepPropagator::SplitStepPropagator(GridPtr grid, const PhysicalParams& p, StepOptions opt)
    : grid_(std::move(grid)), params_(p), opt_(opt)
{
    const auto& k2 = grid_->k_squared();
    dispersion_.resize(k2.size());
    keep_.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) {
        dispersion_[i] = p.gamma * k2[i] * k2[i] + p.mu * k2[i];
        keep_[i] = grid_->dealias_keep(i) ? 1 : 0;
    }
}

const std::vector<cplx>& SplitStepPropagator::half_multiplier(double dt)
{
    for (const auto& [key, mult] : cache_) {
        if (key == dt) return mult;
    }
    if (cache_.size() >= 8) cache_.erase(cache_.begin());
    std::vector<cplx> m(dispersion_.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double ph = -0.5 * dt * dispersion_[i];
        m[i] = cplx{std::cos(ph), std::sin(ph)};
    }
    cache_.emplace_back(dt, std::move(m));
    return cache_.back().second;
}

void SplitStepPropagator::nonlinear_phase(std::vector<cplx>& state, double dt) const
{
    const int is = integer_sigma(params_.sigma);
    for (auto& z : state) {
        const double ph = dt * pow_sigma(std::norm(z), params_.sigma, is);
        mul_inplace(z, cplx{std::cos(ph), std::sin(ph)});
    }
}

double SplitStepPropagator::advance(std::vector<cplx>& state, int n, double dt)
{
    if (state.size() != grid_->cell_count()) throw StructuralError("advance: state size mismatch");
    auto& tr = transform_for(*grid_);
    tr.forward_inplace(state);
    if (opt_.linear) {
        const auto& h = half_multiplier(dt);
        for (std::size_t i = 0; i < state.size(); ++i) mul_inplace(state[i], h[i]);
    }
    for (int s = 0; s < n; ++s) {
        if (opt_.nonlinear) {
            tr.inverse_inplace(state);
            nonlinear_phase(state, dt);
            tr.forward_inplace(state);
            if (opt_.dealias) {
                for (std::size_t i = 0; i < state.size(); ++i) {
                    if (!keep_[i]) state[i] = 0.0;
                }
            }
        }
        if (opt_.linear) {
            // Closing half step, fused with the next opening half step when one follows.
            const auto& h = half_multiplier(s + 1 < n ? 2.0 * dt : dt);
            for (std::size_t i = 0; i < state.size(); ++i) mul_inplace(state[i], h[i]);
        }
    }
    const auto& k2 = grid_->k_squared();
    double lap = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) lap += k2[i] * k2[i] * std::norm(state[i]);
    lap *= grid_->cell_volume() / static_cast<double>(grid_->cell_count());
    tr.inverse_inplace(state);
    return std::sqrt(lap);
}

Field advance(const Field& psi, const PhysicalParams& p, double dt, int steps, StepOptions opt)
{
    psi.require_finite("step");
    if (steps < 0) throw DomainError("advance: negative step count");
    SplitStepPropagator prop(psi.grid_ptr(), p, opt);
    std::vector<cplx> v(psi.values().begin(), psi.values().end());
    const double lap = prop.advance(v, steps, dt);
    if (!std::isfinite(lap)) throw PoisonedStateError("step: NaN/Inf appeared during the step");
    return Field(psi.grid_ptr(), std::move(v));
}

Field step(const Field& psi, const PhysicalParams& p, double dt, StepOptions opt)
{
    return advance(psi, p, dt, 1, opt);
}

namespace {

DiagnosticsRecord take_sample(const Field& f, const PhysicalParams& p, double t, double dt,
                              const SampleHook& hook)
{
    DiagnosticsRecord rec;
    rec.t = t;
    rec.dt = dt;
    rec.report = evaluate_all(f, p);
    rec.lap_norm = std::sqrt(rec.report.lap_norm_sq);
    rec.grad_norm = std::sqrt(rec.report.grad_norm_sq);
    if (hook) hook(f, rec);
    return rec;
}

// Least-squares slope of log(lap_norm) over the final third of the samples.
double late_log_slope(const std::vector<DiagnosticsRecord>& s)
{
    if (s.size() < 3) return 0.0;
    const std::size_t start = s.size() - std::max<std::size_t>(3, s.size() / 3);
    double st = 0, sy = 0, stt = 0, sty = 0;
    double n = 0;
    for (std::size_t i = start; i < s.size(); ++i) {
        const double t = s[i].t;
        const double y = std::log(std::max(s[i].lap_norm, 1e-300));
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        n += 1;
    }
    const double den = n * stt - st * st;
    return den > 0.0 ? (n * sty - st * sy) / den : 0.0;
}

}  // namespace

TrajectoryOutcome evolve(const Field& psi0, const PhysicalParams& p, const EvolveConfig& cfg,
                         const SampleHook& hook)
{
    cfg.validate();
    p.validate();
    psi0.require_finite("evolve: initial data");
    const double br = boundary_ratio(psi0);
    TrajectoryOutcome out;
    out.blowup_threshold = cfg.blowup_threshold;
    out.dt_underflow_factor = cfg.dt_underflow_factor;
    if (br > kBoundaryWarnRatio) {
        std::ostringstream msg;
        msg << "evolve: initial boundary amplitude " << br << " of maximum exceeds "
            << kBoundaryWarnRatio << "; periodic images may interact";
        warn(msg.str());
        out.notes.push_back(msg.str());
    }

    const GridPtr& grid = psi0.grid_ptr();
    SplitStepPropagator prop(grid, p, StepOptions{true, true, cfg.dealias});
    std::vector<cplx> state(psi0.values().begin(), psi0.values().end());

    double t = 0.0;
    out.samples.push_back(take_sample(psi0, p, t, cfg.dt, hook));
    const double lap0 = out.samples.front().lap_norm;
    out.initial_lap_norm = lap0;
    {
        const double kd = 2.0 / 3.0 * M_PI / grid->spacing();
        const double ceiling = kd * kd * std::sqrt(out.samples.front().report.mass);
        if (lap0 > 0.0 && cfg.blowup_threshold * lap0 > 0.25 * ceiling) {
            std::ostringstream msg;
            msg << "evolve: blowup_threshold " << cfg.blowup_threshold << " asks for |Lap psi|_2 = "
                << cfg.blowup_threshold * lap0 << ", beyond a quarter of what the lattice resolves ("
                << 0.25 * ceiling << "); refine the grid or lower the threshold";
            warn(msg.str());
            out.notes.push_back(msg.str());
        }
    }
    double lap = lap0;
    double dt_cur = cfg.dt;
    double min_dt = cfg.dt;
    int streak = 0;
    int since_sample = 0;
    bool running = true;
    const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);

    auto sample_now = [&](double dt_used) {
        out.samples.push_back(take_sample(Field(grid, state), p, t, dt_used, hook));
        since_sample = 0;
    };

    while (running && cfg.t_end - t > t_eps) {
        double h = std::min(dt_cur, cfg.t_end - t);
        int n = 1;
        if (cfg.adapt) {
            std::vector<cplx> big(state);
            std::vector<cplx> small(state);
            const double lap_big = prop.advance(big, 1, h);
            const double lap_small = prop.advance(small, 2, 0.5 * h);
            if (!std::isfinite(lap_big) || !std::isfinite(lap_small)) {
                out.verdict = Verdict::Poisoned;
                out.reason = "nan";
                break;
            }
            const double err = l2_distance(big, small) / std::max(l2_norm(small), 1e-300);
            if (err > cfg.local_error_tol) {
                ++out.rejected_steps;
                streak = 0;
                dt_cur = 0.5 * h;
                if (dt_cur < cfg.dt * cfg.dt_underflow_factor) {
                    out.verdict = Verdict::BlowupDetected;
                    out.reason = "step_collapse";
                    sample_now(dt_cur);
                    running = false;
                }
                continue;
            }
            state.swap(small);
            lap = lap_small;
            if (++streak >= cfg.grow_after && dt_cur < cfg.dt) {
                dt_cur = std::min(2.0 * dt_cur, cfg.dt);
                streak = 0;
            }
        } else {
            // Fixed step: fuse every step up to the next sample point.
            const double remaining = cfg.t_end - t;
            const long full = static_cast<long>(std::floor(remaining / cfg.dt * (1.0 + 1e-12)));
            n = static_cast<int>(std::min<long>(cfg.sample_every - since_sample, std::max<long>(full, 1)));
            h = full >= 1 ? cfg.dt : remaining;
            lap = prop.advance(state, n, h);
            if (!std::isfinite(lap)) {
                out.verdict = Verdict::Poisoned;
                out.reason = "nan";
                break;
            }
        }
        out.accepted_steps += n;
        since_sample += n;
        t += n * h;
        if (cfg.t_end - t <= t_eps) t = cfg.t_end;
        min_dt = std::min(min_dt, h);

        if (lap >= cfg.blowup_threshold * lap0) {
            out.verdict = Verdict::BlowupDetected;
            out.reason = "threshold";
            sample_now(h);
            running = false;
        } else if (since_sample >= cfg.sample_every || t >= cfg.t_end) {
            sample_now(h);
        }
    }

    out.t_final = t;
    out.min_dt = min_dt;
    if (out.verdict != Verdict::Poisoned) out.final_state = Field(grid, state);
    if (running && out.verdict == Verdict::Completed) {
        out.reason = "t_end";
        const double growth = lap / lap0;
        if (growth >= std::sqrt(cfg.blowup_threshold) && late_log_slope(out.samples) > 0.0) {
            out.verdict = Verdict::GrowthUnbounded;
        }
    }
    out.final_lap_growth = lap0 > 0.0 ? lap / lap0 : 0.0;

    const auto& first = out.samples.front().report;
    for (const auto& s : out.samples) {
        out.conservation_defects.mass_rel = std::max(
            out.conservation_defects.mass_rel, std::abs(s.report.mass - first.mass) / first.mass);
        out.conservation_defects.energy_rel =
            std::max(out.conservation_defects.energy_rel,
                     std::abs(s.report.action - first.action) / std::max(std::abs(first.action), 1e-300));
    }
    return out;
}

}  // namespace bnls
