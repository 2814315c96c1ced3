#include <algorithm>
#include <cmath>

#include "bnls/error.hpp"
#include "bnls/functionals.hpp"
#include "bnls/instability.hpp"
#include "doctest.h"

using namespace bnls;

TEST_SUITE("instability")
{
    TEST_CASE("preconditions")
    {
        auto cfg = preset("thm1-critical");
        cfg.lambda = 1.0;
        CHECK_THROWS_AS(cfg.validate(), PreconditionError);
        cfg.lambda = 0.9;
        CHECK_THROWS_AS(cfg.validate(), PreconditionError);
        cfg = preset("thm1-critical");
        cfg.params.sigma = 1.0;
        CHECK_THROWS_AS(cfg.validate(), PreconditionError);
        CHECK_THROWS_AS(preset("no-such-preset"), ValidationError);
        CHECK(perturbation_from_string("amplitude") == Perturbation::Amplitude);
        CHECK_THROWS_AS(perturbation_from_string("shear"), ValidationError);
    }

    TEST_CASE("presets cover their regimes")
    {
        const auto& names = preset_names();
        for (const char* n : {"thm1-critical", "thm1-supercritical", "thm1-mu0", "thm1-mu0-supercritical",
                              "thm2-critical-mu0", "thm2-sigma-gt4"}) {
            CHECK(std::find(names.begin(), names.end(), n) != names.end());
        }
        for (const auto& n : names) {
            CAPTURE(n);
            const auto cfg = preset(n);
            CHECK_NOTHROW(cfg.validate());
            const auto cls = cfg.params.instability_class();
            if (n.rfind("thm1", 0) == 0) CHECK(cls == InstabilityClass::FiniteTime);
            if (n.rfind("thm2", 0) == 0) CHECK(cls == InstabilityClass::FiniteOrInfiniteTime);
        }
    }

    TEST_CASE("scaling is degenerate for mu = 0 at the critical power")
    {
        PhysicalParams p{1.0, 0.0, 1.0, 2.0, 2};
        FunctionalReport base = report_from_norms(3.0, 2.0, 5.0, 7.0, p);
        const ScalingExpansion ex(base, p);
        for (double lambda : {0.5, 1.05, 2.0}) {
            CHECK(ex.virial(lambda) == doctest::Approx(lambda * lambda * base.virial).epsilon(1e-13));
        }
    }

    TEST_CASE("perturbations")
    {
        auto g = Grid::create(2, 64, 12.0);
        const Field u = Field::from_radial(g, [](double r) { return std::exp(-r * r / 2.0); });
        const Field a = perturb(u, Perturbation::Amplitude, 1.05);
        CHECK(a[100].real() == doctest::Approx(1.05 * u[100].real()));
        const Field s = perturb(u, Perturbation::Scaling, 1.05);
        const PhysicalParams p;
        CHECK(evaluate_all(s, p).mass == doctest::Approx(evaluate_all(u, p).mass).epsilon(1e-10));
    }

    TEST_CASE("small end-to-end run")
    {
        auto cfg = preset("thm1-supercritical");
        cfg.solver.grid = Grid::create(2, 128, 16.0);
        cfg.evolve.t_end = 0.05;
        cfg.calibration_t_end = 0.05;
        const auto e = run_instability(cfg, "thm1-supercritical");
        CHECK(e.certificate.accepted);
        CHECK(e.initial.all());
        CHECK(e.trajectory.samples.size() > 3);
        CHECK(e.virial_comparison.rows.size() == 3);
        CHECK(e.status != "FALSIFYING");
        CHECK(e.preset == "thm1-supercritical");
    }
}
