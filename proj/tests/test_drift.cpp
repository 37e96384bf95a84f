#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srsmile/drift.hpp"
#include "srsmile/kernel.hpp"
#include "srsmile/termstructure.hpp"

using namespace srsmile;

namespace {

ModelParams make_model(double gamma, double y_star) {
    return ModelParams(PiecewiseCurve::constant(0.01), PiecewiseCurve::constant(0.15),
                       PiecewiseCurve::constant(gamma), PiecewiseCurve::constant(y_star),
                       DiscountCurve::flat_rate(0.02));
}

}  // namespace

TEST_CASE("drift table interpolates the first-order drift") {
    ModelParams m = make_model(50.0, 0.004);
    install_drift(m, 3.0);
    for (double t : {0.25, 0.8, 1.7, 2.9})
        CHECK(m.drift()->r1_star(t) == doctest::Approx(r1_star(m, t)).epsilon(1e-9));
}

TEST_CASE("drift table is exact in the Hull-White limit at any node density") {
    ModelParams m = make_model(1e-8, 0.0);
    install_drift(m, 3.0, {}, 4);  // deliberately coarse table
    for (double t : {0.33, 1.11, 2.77})
        CHECK(m.drift()->r1_star(t) == doctest::Approx(r1_star(m, t)).epsilon(1e-13));
}

TEST_CASE("second-order remainder vanishes in the Gaussian limit") {
    ModelParams m = make_model(1e-8, 0.0);
    install_drift(m, 3.0);
    for (double t : {0.5, 1.5, 2.5})
        CHECK(std::abs(m.drift()->r2_star(t)) < 1e-9);
}

TEST_CASE("second-order remainder is small next to the first-order drift") {
    ModelParams m = make_model(50.0, 0.004);
    install_drift(m, 5.0);
    for (double t : {1.0, 3.0, 5.0}) {
        const double r1 = m.drift()->r1_star(t);
        const double r2 = m.drift()->r2_star(t);
        CHECK(std::abs(r2) < 0.2 * std::abs(r1));
    }
}

TEST_CASE("f2 combines f1 and the remainder integral") {
    ModelParams m = make_model(40.0, 0.004);
    install_drift(m, 3.0);
    const double y = 0.002, t = 0.5, T = 2.5;
    const double f1 = f1_functional(m, y, t, T);
    const double r2int = m.drift()->r2.integral_to(T) - m.drift()->r2.integral_to(t);
    CHECK(f2_functional(m, y, t, T) == doctest::Approx(0.5 * f1 * f1 - r2int).epsilon(1e-10));
}

TEST_CASE("f1 at the origin integrates the first-order generator") {
    ModelParams m = make_model(40.0, 0.004);
    install_drift(m, 3.0);
    const double y = 0.001, t = 0.4, T = 2.2;
    const double direct = integrate(
        [&](double t1) { return g1_scalar(m, y, t, t1, T); }, t, T, m.breakpoints());
    CHECK(f1_functional(m, y, t, T) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("drift rebuild horizon is respected") {
    ModelParams m = make_model(50.0, 0.004);
    install_drift(m, 2.0);
    CHECK(m.drift()->horizon >= 2.0);
    CHECK_NOTHROW(m.drift()->r_star(1.9));
}
