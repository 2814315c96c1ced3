#include <cmath>
#include <vector>

#include "bnls/error.hpp"
#include "bnls/evolution.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/spectral.hpp"
#include "doctest.h"

using namespace bnls;

namespace {

Field bump(const GridPtr& g, double A = 1.0)
{
    return Field::from_radial(g, [A](double r) { return A * std::exp(-r * r / 2.0); });
}

double rel_l2(const Field& a, const Field& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("evolution")
{
    TEST_CASE("linear substep reproduces the exact propagator")
    {
        auto g = Grid::create(2, 64, 8.0);
        PhysicalParams p{1.0, 0.7, 1.0, 2.0, 2};
        const Field psi = bump(g);
        const double dt = 1e-2;
        const int n = 50;
        const Field num = advance(psi, p, dt, n, StepOptions{true, false, false});

        auto& tr = transform_for(*g);
        std::vector<cplx> v(psi.values().begin(), psi.values().end());
        tr.forward_inplace(v);
        const auto& k2 = g->k_squared();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double w = p.gamma * k2[i] * k2[i] + p.mu * k2[i];
            v[i] *= std::exp(cplx{0.0, -w * dt * n});
        }
        tr.inverse_inplace(v);
        CHECK(rel_l2(num, Field(g, v)) < 1e-12);
    }

    TEST_CASE("nonlinear substep is the exact phase rotation")
    {
        auto g = Grid::create(2, 32, 8.0);
        for (double sigma : {2.0, 1.5}) {
            PhysicalParams p{1.0, 1.0, 1.0, sigma, 2};
            const Field psi = bump(g, 1.3);
            const double dt = 1e-2;
            const int n = 40;
            const Field num = advance(psi, p, dt, n, StepOptions{false, true, false});
            std::vector<cplx> v(psi.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = psi[i] * std::exp(cplx{0.0, std::pow(std::norm(psi[i]), sigma) * dt * n});
            }
            CHECK(rel_l2(num, Field(g, v)) < 1e-12);
        }
    }

    TEST_CASE("second-order self-convergence")
    {
        auto g = Grid::create(2, 64, 12.0);
        PhysicalParams p;
        const Field psi = bump(g, 1.0);
        const double T = 0.2;
        const double dt = 0.01;
        auto run = [&](double h) { return advance(psi, p, h, static_cast<int>(std::lround(T / h)), {}); };
        const Field ref = run(dt / 8);
        const double e1 = rel_l2(run(dt), ref);
        const double e2 = rel_l2(run(dt / 2), ref);
        const double ratio = e1 / e2;
        CAPTURE(ratio);
        CHECK(ratio > 3.5);
        CHECK(ratio < 5.0);
    }

    TEST_CASE("time reversal")
    {
        auto g = Grid::create(2, 64, 12.0);
        PhysicalParams p;
        const Field psi = bump(g, 1.0);
        const StepOptions exact{true, true, false};
        const Field fwd = advance(psi, p, 1e-3, 200, exact);
        const Field back = advance(fwd, p, -1e-3, 200, exact);
        CHECK(rel_l2(back, psi) < 1e-8);
    }

    TEST_CASE("stable standing wave conserves mass over 1e4 steps")
    {
        PhysicalParams p{1.0, 1.0, 1.0, 1.0, 2};
        SolverConfig sc;
        sc.grid = Grid::create(2, 128, 16.0);
        const auto gs = solve(p, sc);
        REQUIRE(gs.converged);
        EvolveConfig ec;
        ec.dt = 1e-3;
        ec.t_end = 10.0;
        ec.sample_every = 1000;
        ec.adapt = false;
        const auto out = evolve(gs.profile, p, ec);
        CHECK(out.verdict == Verdict::Completed);
        CHECK(out.accepted_steps == 10000);
        CHECK(out.conservation_defects.mass_rel < 1e-10);
        CHECK(out.conservation_defects.energy_rel < 1e-6);
        for (std::size_t i = 1; i < out.samples.size(); ++i) REQUIRE(out.samples[i].t > out.samples[i - 1].t);
    }

    TEST_CASE("unstable standing wave keeps its modulus over a short span")
    {
        PhysicalParams p;
        SolverConfig sc;
        sc.grid = Grid::create(2, 128, 16.0);
        const auto gs = solve(p, sc);
        REQUIRE(gs.converged);
        EvolveConfig ec;
        ec.dt = 2.5e-4;
        ec.t_end = 1.0;
        ec.sample_every = 1000;
        ec.adapt = false;
        const auto out = evolve(gs.profile, p, ec);
        REQUIRE(out.final_state);
        double dev = 0.0;
        for (std::size_t i = 0; i < gs.profile.size(); ++i) {
            dev = std::max(dev, std::abs(std::abs((*out.final_state)[i]) - std::abs(gs.profile[i])));
        }
        CHECK(dev < 1e-4);
        CHECK(out.conservation_defects.mass_rel < 1e-10);
    }

    TEST_CASE("small data disperses")
    {
        auto g = Grid::create(2, 64, 16.0);
        PhysicalParams p;
        EvolveConfig ec;
        ec.dt = 1e-2;
        ec.t_end = 2.0;
        ec.sample_every = 10;
        const auto out = evolve(bump(g, 0.01), p, ec);
        CHECK(out.verdict == Verdict::Completed);
        CHECK(out.reason == "t_end");
        CHECK(out.samples.back().lap_norm <= out.samples.front().lap_norm * (1.0 + 1e-6));
    }

    TEST_CASE("raising the threshold never creates a blow-up verdict")
    {
        auto g = Grid::create(2, 64, 16.0);
        PhysicalParams p{1.0, 0.0, 1.0, 3.0, 2};
        const Field psi = bump(g, 1.6);
        EvolveConfig ec;
        ec.dt = 1e-3;
        ec.t_end = 0.3;
        ec.sample_every = 10;
        Verdict previous = Verdict::BlowupDetected;
        for (double thr : {1.5, 3.0, 1e3}) {
            ec.blowup_threshold = thr;
            const auto out = evolve(psi, p, ec);
            if (previous == Verdict::Completed) CHECK(out.verdict == Verdict::Completed);
            if (out.verdict == Verdict::BlowupDetected && out.reason == "threshold") {
                CHECK(out.samples.back().lap_norm >= thr * out.initial_lap_norm);
            }
            previous = out.verdict;
        }
    }

    TEST_CASE("step collapse ends the run")
    {
        auto g = Grid::create(2, 32, 8.0);
        PhysicalParams p;
        EvolveConfig ec;
        ec.local_error_tol = 1e-30;
        ec.dt_underflow_factor = 0.3;
        ec.t_end = 1.0;
        const auto out = evolve(bump(g, 1.0), p, ec);
        CHECK(out.verdict == Verdict::BlowupDetected);
        CHECK(out.reason == "step_collapse");
        CHECK(out.dt_underflow_factor == 0.3);
    }

    TEST_CASE("invalid configuration and poisoned data")
    {
        EvolveConfig ec;
        ec.dt = 0.0;
        CHECK_THROWS_AS(ec.validate(), ValidationError);
        ec = EvolveConfig{};
        ec.blowup_threshold = 1.0;
        CHECK_THROWS_AS(ec.validate(), ValidationError);

        auto g = Grid::create(1, 16, 4.0);
        PhysicalParams p;
        p.dim = 1;
        std::vector<cplx> v(g->cell_count(), 0.0);
        v[3] = cplx{INFINITY, 0.0};
        CHECK_THROWS_AS(step(Field(g, v), p, 1e-3), PoisonedStateError);
        CHECK_THROWS_AS(evolve(Field(g, v), p, EvolveConfig{}), PoisonedStateError);
        CHECK(to_string(Verdict::GrowthUnbounded) == "growth_unbounded");
    }
}
