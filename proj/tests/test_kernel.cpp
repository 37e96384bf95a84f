#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srsmile/drift.hpp"
#include "srsmile/kernel.hpp"
#include "srsmile/numerics.hpp"
#include "srsmile/termstructure.hpp"

using namespace srsmile;

namespace {

ModelParams make_model(double gamma, double y_star) {
    return ModelParams(PiecewiseCurve({0.0, 1.2}, {0.01, 0.008}),
                       PiecewiseCurve::constant(0.15), PiecewiseCurve::constant(gamma),
                       PiecewiseCurve::constant(y_star), DiscountCurve::flat_rate(0.02));
}

}  // namespace

TEST_CASE("phi and sigma_rr match the OU closed forms on constant pieces") {
    ModelParams m = make_model(50.0, 0.004);
    CHECK(phi_r(m, 0.5, 1.0) == doctest::Approx(std::exp(-0.15 * 0.5)).epsilon(1e-13));
    // d/dv Sigma_rr = sigma^2 - 2 alpha Sigma_rr
    const double t = 0.3, v = 1.0, h = 1e-5;
    const double lhs = (sigma_rr(m, t, v + h) - sigma_rr(m, t, v - h)) / (2.0 * h);
    const double rhs = 0.01 * 0.01 - 2.0 * 0.15 * sigma_rr(m, t, v);  // sigma(1.0) = 0.01
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("sigma_zz reduces to the closed-form integrated-OU variance") {
    // Constant alpha, sigma, gamma -> 0: Var(int_t^v y) has a closed form.
    ModelParams m(PiecewiseCurve::constant(0.012), PiecewiseCurve::constant(0.2),
                  PiecewiseCurve::constant(1e-8), PiecewiseCurve::constant(0.0),
                  DiscountCurve::flat_rate(0.02));
    const double s = 0.012, a = 0.2, t = 0.4, v = 2.9, T = v - t;
    const double exact = s * s / (a * a) *
                         (T - 2.0 * (1.0 - std::exp(-a * T)) / a +
                          (1.0 - std::exp(-2.0 * a * T)) / (2.0 * a));
    CHECK(sigma_zz(m, t, v) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("b_plus integral identity against sigma_zz") {
    ModelParams m = make_model(60.0, 0.003);
    for (const auto& [t, v] : {std::pair{0.0, 1.0}, std::pair{0.5, 2.7}}) {
        const double lhs = integrate(
            [&](double u) { return b_plus(m, t, u, v) * psi_r(m, t, u) * sigma_rr(m, t, u); },
            t, v, m.breakpoints());
        CHECK(lhs == doctest::Approx(0.5 * sigma_zz(m, t, v)).epsilon(1e-10));
    }
}

TEST_CASE("b_star is the psi integral") {
    ModelParams m = make_model(50.0, 0.004);
    const double direct =
        integrate([&](double u) { return psi_r(m, 1.0, u) * phi_r(m, 1.0, u); }, 1.0, 1.5,
                  m.breakpoints());
    CHECK(b_star(m, 1.0, 1.5) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("drift dual forms agree and are gamma-continuous") {
    // The exponential-pair form cancels as gamma -> 0, so compare at smile
    // levels only; the Gaussian limit is covered by the continuity check.
    for (double g : {0.5, 5.0, 80.0}) {
        ModelParams m = make_model(g, 0.004);
        for (double t : {0.5, 2.0, 4.0})
            CHECK(std::abs(r1_star(m, t) - r1_star_r1form(m, t)) <= 1e-12);
    }
    // continuity: gamma -> 0 approaches the linearized drift
    ModelParams tiny = make_model(1e-8, 0.004);
    ModelParams small = make_model(1e-3, 0.004);
    CHECK(r1_star(tiny, 2.0) == doctest::Approx(r1_star(small, 2.0)).epsilon(1e-5));
}

TEST_CASE("first-order kernel action on the unit payoff is -F1") {
    ModelParams m = make_model(40.0, 0.005);
    install_drift(m, 2.0);
    const double y = 0.002, t = 0.3, v = 1.8;
    const double g1 = kernel_g1_apply(
        m, [](double, double) { return 1.0; }, y, 0.0, t, v);
    CHECK(g1 == doctest::Approx(-f1_functional(m, y, t, v)).epsilon(1e-7));
}

TEST_CASE("zeroth-order kernel is a normalized density") {
    ModelParams m = make_model(40.0, 0.005);
    install_drift(m, 1.5);
    const double t = 0.2, v = 1.2, y = 0.001;
    const KernelStats ks = kernel_stats(m, t, v);
    const double sy = std::sqrt(ks.sigma_rr), sz = std::sqrt(ks.sigma_zz);
    const double mu = ks.mu_star(y);
    const double mass = integrate(
        [&](double eta) {
            return integrate(
                [&](double zeta) { return kernel_g0(m, y, 0.0, t, eta, zeta, v); },
                mu - 10.0 * sz, mu + 10.0 * sz, {});
        },
        ks.phi_r * y - 10.0 * sy, ks.phi_r * y + 10.0 * sy, {});
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}
