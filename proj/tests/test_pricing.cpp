#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srsmile/drift.hpp"
#include "srsmile/implied.hpp"
#include "srsmile/pricing.hpp"
#include "srsmile/termstructure.hpp"

using namespace srsmile;

namespace {

ModelParams smile_model(double sigma = 0.01, double gamma = 50.0, double y_star = 0.004) {
    return ModelParams(PiecewiseCurve::constant(sigma), PiecewiseCurve::constant(0.15),
                       PiecewiseCurve::constant(gamma), PiecewiseCurve::constant(y_star),
                       DiscountCurve::flat_rate(0.02));
}

}  // namespace

TEST_CASE("bond reconstitution reproduces the discount curve at the origin") {
    ModelParams m = smile_model();
    install_drift(m, 6.0);
    for (double T : {0.5, 1.0, 3.0, 5.5}) {
        const double rel = zcb_price(m, 0.0, 0.0, T) / m.discount().discount(T) - 1.0;
        CHECK(std::abs(rel) < 2e-4);  // third-order residual at strong smile
    }
}

TEST_CASE("zero-volatility bond is the forward discount factor") {
    ModelParams m(PiecewiseCurve::constant(0.0), PiecewiseCurve::constant(0.15),
                  PiecewiseCurve::constant(50.0), PiecewiseCurve::constant(0.0),
                  DiscountCurve::flat_rate(0.02));
    install_drift(m, 3.0);
    CHECK(zcb_price(m, 0.0, 1.0, 2.5) ==
          doctest::Approx(m.discount().discount(1.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("instantaneous forward matches the bond slope") {
    ModelParams m = smile_model();
    install_drift(m, 3.0);
    const double y = 0.003, t = 1.0, T = 2.0, h = 1e-5;
    const double fd =
        -(std::log(zcb_price(m, y, t, T + h)) - std::log(zcb_price(m, y, t, T - h))) / (2.0 * h);
    CHECK(forward_rate(m, y, t, T) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("caplet prices are monotone and bounded") {
    ModelParams m = smile_model();
    install_drift(m, 2.0);
    double prev = 1e9;
    for (double K : {0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.04}) {
        const auto inst = InstrumentSpec::rfr_caplet(1.0, 1.5, K, 0.5);
        const double pv = price_rfr_caplet(m, inst).pv;
        CHECK(pv > 0.0);
        CHECK(pv < prev);                          // decreasing in strike
        CHECK(pv < m.discount().discount(1.0));    // bounded by the T1 bond
        prev = pv;
    }
}

TEST_CASE("rfr caplet dominates the libor caplet") {
    // The compounded rate keeps accruing variance over [T1, T2].
    ModelParams m = smile_model();
    install_drift(m, 2.0);
    for (double K : {0.01, 0.02, 0.03}) {
        const double c = price_rfr_caplet(m, InstrumentSpec::rfr_caplet(1.0, 1.5, K, 0.5)).pv;
        const double l = price_libor_caplet(m, InstrumentSpec::libor_caplet(1.0, 1.5, K, 0.5)).pv;
        CHECK(c > l);
    }
}

TEST_CASE("libor caplet equals the rfr caplet on the sigma-zeroed model") {
    ModelParams m = smile_model();
    install_drift(m, 2.0);
    const auto lib = InstrumentSpec::libor_caplet(1.0, 1.5, 0.02, 0.5);
    const ModelParams zeroed = zero_sigma_on(m, 1.0, 1.5, 1.5);
    const auto rfr = InstrumentSpec::rfr_caplet(1.0, 1.5, 0.02, 0.5);
    CHECK(price_libor_caplet(m, lib).pv ==
          doctest::Approx(price_rfr_caplet(zeroed, rfr).pv).epsilon(1e-10));
}

TEST_CASE("one-period swaption at kappa strike matches the libor caplet") {
    // A single-period payer swaption struck at K pays delta (L - K)+ at T0 of
    // annuity-discounted value; with the same strike the caplet payoff at T1
    // is the same contract up to the payment-date discounting convention.
    ModelParams m = smile_model();
    install_drift(m, 2.0);
    const double K = 0.02;
    const auto sw = InstrumentSpec::payer_swaption({1.0, 1.5}, K, {0.5});
    const auto lb = InstrumentSpec::libor_caplet(1.0, 1.5, K, 0.5);
    const double psw = price_swaption(m, sw).pv;
    const double plb = price_libor_caplet(m, lb).pv;
    CHECK(psw == doctest::Approx(plb).epsilon(5e-3));
}

TEST_CASE("swaption value decreases in strike and increases in tenor") {
    ModelParams m = smile_model();
    install_drift(m, 3.5);
    double prev = 1e9;
    for (double K : {0.01, 0.02, 0.03}) {
        const double pv =
            price_swaption(m, InstrumentSpec::payer_swaption({1.0, 1.5, 2.0}, K, {0.5, 0.5})).pv;
        CHECK(pv < prev);
        prev = pv;
    }
    const double shortleg =
        price_swaption(m, InstrumentSpec::payer_swaption({1.0, 1.5}, 0.03, {0.5})).pv;
    const double longleg =
        price_swaption(m, InstrumentSpec::payer_swaption({1.0, 1.5, 2.0, 2.5}, 0.03,
                                                         {0.5, 0.5, 0.5}))
            .pv;
    CHECK(longleg > shortleg);  // more deep-out-of-the-money optionality
}

TEST_CASE("kernel-quadrature cross-pricer agrees with the closed form") {
    ModelParams m = smile_model();
    install_drift(m, 2.0);
    const auto inst = InstrumentSpec::rfr_caplet(1.0, 1.5, 0.02, 0.5);
    const double q = kernel_quadrature_rfr_caplet(m, inst);
    const double c = price_rfr_caplet(m, inst).pv;
    CHECK(std::abs(q - c) / c < 1e-2);
}

TEST_CASE("instrument validation rejects malformed specs") {
    CHECK_THROWS(InstrumentSpec::rfr_caplet(1.5, 1.0, 0.02, 0.5).validate());
    CHECK_THROWS(InstrumentSpec::payer_swaption({1.0}, 0.02, {}).validate());
    CHECK_THROWS(InstrumentSpec::payer_swaption({1.0, 1.5}, 0.02, {0.5, 0.5}).validate());
}

TEST_CASE("intrinsic value at zero volatility") {
    ModelParams m(PiecewiseCurve::constant(0.0), PiecewiseCurve::constant(0.15),
                  PiecewiseCurve::constant(50.0), PiecewiseCurve::constant(0.0),
                  DiscountCurve::flat_rate(0.02));
    install_drift(m, 2.0);
    // kappa above the forward factor: exercise certain, PV = D1 - D2/kappa
    const double K = 0.01;
    const auto inst = InstrumentSpec::rfr_caplet(1.0, 1.5, K, 0.5);
    const double intrinsic = m.discount().discount(1.0) -
                             m.discount().discount(1.5) / inst.kappa();
    CHECK(price_rfr_caplet(m, inst).pv == doctest::Approx(intrinsic).epsilon(1e-10));
}
