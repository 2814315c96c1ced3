#include <cmath>
#include <vector>

#include "bnls/error.hpp"
#include "bnls/evolution.hpp"
#include "bnls/functionals.hpp"
#include "bnls/virial.hpp"
#include "doctest.h"

using namespace bnls;

namespace {

Field chirped(const GridPtr& g, double a, double phase = 0.0)
{
    std::vector<cplx> v(g->cell_count());
    const auto& r = g->radius();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::exp(-r[i] * r[i] / 2.0) * std::exp(cplx{0.0, a * r[i] * r[i] / 2.0 + phase});
    }
    return Field(g, v);
}

}  // namespace

TEST_SUITE("virial")
{
    TEST_CASE("smoothstep endpoints")
    {
        CHECK(smoothstep5(0.0) == 0.0);
        CHECK(smoothstep5(1.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(smoothstep5(0.5) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(smoothstep5_derivative(0.5) == doctest::Approx(2772.0 / 1024.0).epsilon(1e-14));
        for (double x = 0.0; x <= 1.0; x += 0.01) {
            const double h = 1e-6;
            if (x > h && x < 1 - h) {
                const double fd = (smoothstep5(x + h) - smoothstep5(x - h)) / (2 * h);
                CHECK(fd == doctest::Approx(smoothstep5_derivative(x)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("cutoff profile")
    {
        const VirialCutoff c(4.0);
        CHECK(c.certificate().max_phi_second <= 1.0 + 1e-12);
        CHECK(c.certificate().audit_points >= 100000);
        for (double r : {0.0, 1.0, 2.5, 4.0}) {
            CHECK(c.phi(r) == doctest::Approx(r * r / 2.0).epsilon(1e-14));
            CHECK(c.weight(r) == doctest::Approx(1.0));
        }
        CHECK(c.phi_prime(40.0) == doctest::Approx(0.0));
        CHECK(c.phi(50.0) == doctest::Approx(c.phi(41.0)).epsilon(1e-14));
        double prev = c.phi(0.0);
        for (double r = 0.05; r < 45.0; r += 0.05) {
            const double h = 1e-5;
            CHECK(c.phi(r) >= prev);
            prev = c.phi(r);
            const double fd = (c.phi(r + h) - c.phi(r - h)) / (2 * h);
            CHECK(std::abs(fd - c.phi_prime(r)) < 1e-6 * (1.0 + c.phi(r)));
            CHECK(c.phi_second(r) <= 1.0 + 1e-12);
        }
        CHECK_THROWS_AS(VirialCutoff(0.0), DomainError);
        CHECK_THROWS_AS(VirialCutoff(-1.0), DomainError);
    }

    TEST_CASE("real fields carry no virial")
    {
        auto g = Grid::create(2, 64, 10.0);
        const Field u = Field::from_radial(g, [](double r) { return std::exp(-r * r); });
        CHECK(std::abs(virial(u, VirialCutoff(2.0))) < 1e-13);
    }

    TEST_CASE("chirped Gaussian oracle and phase invariance")
    {
        auto g = Grid::create(2, 128, 16.0);
        const double a = 0.3;
        const VirialCutoff c(8.0);
        const double M = virial(chirped(g, a), c);
        CHECK(M == doctest::Approx(2.0 * a * M_PI).epsilon(1e-6));
        for (double theta : {0.3, 1.7}) {
            CHECK(virial(chirped(g, a, theta), c) == doctest::Approx(M).epsilon(1e-12));
        }
    }

    TEST_CASE("plane-wave modulated Gaussian")
    {
        auto g = Grid::create(2, 128, 16.0);
        const double A = 0.8;
        std::vector<cplx> v(g->cell_count());
        const auto& r = g->radius();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x1 = g->coordinate(g->axis_index(i, 0));
            v[i] = A * std::exp(-r[i] * r[i] / 2.0) * std::exp(cplx{0.0, x1});
        }
        std::vector<std::vector<double>> e1{std::vector<double>(v.size(), 1.0), std::vector<double>(v.size(), 0.0)};
        CHECK(virial_along(Field(g, v), e1) == doctest::Approx(2.0 * M_PI * A * A).epsilon(1e-6));
    }

    TEST_CASE("instantaneous rate matches a centred difference of M along the flow")
    {
        auto g = Grid::create(2, 128, 16.0);
        PhysicalParams p;
        const Field u = Field::from_radial(g, [](double r) { return 1.2 * std::exp(-r * r / 2.0); });
        for (double R : {2.0, 8.0}) {
            const VirialCutoff c(R);
            const double h = 1e-4;
            const Field fwd = advance(u, p, h / 4, 4);
            const Field bwd = advance(u, p, -h / 4, 4);
            const double fd = (virial(fwd, c) - virial(bwd, c)) / (2 * h);
            CHECK(virial_rate(u, c, p) == doctest::Approx(fd).epsilon(1e-5));
        }
    }

    TEST_CASE("rate equals 8Q when the cutoff covers the box")
    {
        auto g = Grid::create(2, 128, 16.0);
        PhysicalParams p;
        const Field u = chirped(g, 0.2);
        const auto r = evaluate_all(u, p);
        CHECK(virial_rate(u, VirialCutoff(32.0), p) == doctest::Approx(8.0 * r.virial).epsilon(1e-9));
    }

    TEST_CASE("finite-difference rate is exact on quadratics")
    {
        std::vector<DiagnosticsRecord> s;
        for (double t : {0.0, 0.001, 0.003, 0.0045, 0.006, 0.01}) {
            DiagnosticsRecord d;
            d.t = t;
            d.virial_M = {3.0 * t * t - 2.0 * t + 1.0, -t * t};
            s.push_back(d);
        }
        fill_virial_rate_fd(s, 0.01);
        for (const auto& d : s) {
            REQUIRE(d.virial_rate_fd.size() == 2);
            CHECK(d.virial_rate_fd[0] == doctest::Approx(6.0 * d.t - 2.0).epsilon(1e-9));
            CHECK(d.virial_rate_fd[1] == doctest::Approx(-2.0 * d.t).scale(1.0).epsilon(1e-9));
        }
        CHECK_THROWS_AS(fill_virial_rate_fd(s, 0.001), PreconditionError);
        s.resize(2);
        CHECK_THROWS_AS(fill_virial_rate_fd(s, 1.0), PreconditionError);
    }

    TEST_CASE("slack shape decreases in R")
    {
        for (const PhysicalParams& p : {PhysicalParams{}, PhysicalParams{1.0, 0.0, 1.0, 3.0, 2},
                                        PhysicalParams{1.0, 0.0, 1.0, 2.0, 2}}) {
            double prev = INFINITY;
            for (double R : {4.0, 8.0, 16.0, 32.0}) {
                const double s = slack_shape(R, 2.0, p);
                CHECK(s > 0.0);
                CHECK(s < prev);
                prev = s;
            }
        }
    }

    TEST_CASE("rate comparison on synthetic samples")
    {
        PhysicalParams p;
        const std::vector<double> radii{8.0, 16.0};
        std::vector<DiagnosticsRecord> s(3);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i].t = 0.1 * i;
            s[i].report.virial = -1.0;
            s[i].grad_norm = 1.0;
            s[i].lap_norm = 1.0;
            s[i].virial_rate = {-8.0 + slack_shape(8.0, 1.0, p) * 0.5, -8.0 + slack_shape(16.0, 1.0, p) * 0.5};
        }
        const double C = calibrate_slack_constant(s, radii, p);
        CHECK(C == doctest::Approx(0.5));
        auto rc = virial_rate_check(s, radii, p, 1.0, 10.0);
        CHECK(rc.inequality_holds);
        CHECK(rc.defect_decreasing);
        CHECK(rc.slack_decreasing);
        rc = virial_rate_check(s, radii, p, 0.25, 10.0);
        CHECK_FALSE(rc.inequality_holds);
        CHECK(rc.rows[0].violations == 3);
        rc = virial_rate_check(s, radii, p, 1.0, 0.5);
        CHECK(rc.excluded_unresolved == 3);
        CHECK_FALSE(rc.inequality_holds);
    }
}
