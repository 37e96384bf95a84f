#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srsmile/calibration.hpp"
#include "srsmile/implied.hpp"
#include "srsmile/pricing.hpp"
#include "srsmile/termstructure.hpp"

using namespace srsmile;

namespace {

QuoteSurface synthetic_surface(double sigma, double gamma, double y_star,
                               const DiscountCurve& dc, const std::vector<double>& maturities) {
    ModelParams truth(PiecewiseCurve::constant(sigma), PiecewiseCurve::constant(0.15),
                      PiecewiseCurve::constant(gamma), PiecewiseCurve::constant(y_star), dc);
    QuoteSurface surf;
    for (double T2 : maturities)
        for (double K : {0.01, 0.015, 0.02, 0.025, 0.03}) {
            Quote q;
            q.maturity = T2;
            q.tenor = 0.5;
            q.strike = K;
            q.implied_vol =
                surface_implied_vol(truth, InstrumentSpec::rfr_caplet(T2 - 0.5, T2, K, 0.5));
            surf.quotes.push_back(q);
        }
    return surf;
}

}  // namespace

TEST_CASE("single-bucket round trip recovers the generating parameters") {
    const DiscountCurve dc = DiscountCurve::flat_rate(0.02);
    const QuoteSurface surf = synthetic_surface(0.009, 60.0, 0.003, dc, {2.0});
    const CalibrationReport rep = calibrate(surf, dc, PiecewiseCurve::constant(0.15));
    REQUIRE(rep.buckets.size() == 1);
    CHECK(rep.converged);
    CHECK(rep.buckets[0].sigma == doctest::Approx(0.009).epsilon(1e-6));
    CHECK(rep.buckets[0].gamma == doctest::Approx(60.0).epsilon(1e-5));
    CHECK(rep.buckets[0].y_star == doctest::Approx(0.003).epsilon(1e-5));
}

TEST_CASE("bootstrap is local: earlier buckets are unchanged by later quotes") {
    const DiscountCurve dc = DiscountCurve::flat_rate(0.02);
    const QuoteSurface one = synthetic_surface(0.01, 50.0, 0.004, dc, {1.5});
    const QuoteSurface two = synthetic_surface(0.01, 50.0, 0.004, dc, {1.5, 3.0});
    const auto alpha = PiecewiseCurve::constant(0.15);
    const CalibrationReport ra = calibrate(one, dc, alpha);
    const CalibrationReport rb = calibrate(two, dc, alpha);
    CHECK(ra.buckets[0].sigma == rb.buckets[0].sigma);  // bit-exact locality
    CHECK(ra.buckets[0].gamma == rb.buckets[0].gamma);
    CHECK(ra.buckets[0].y_star == rb.buckets[0].y_star);
}

TEST_CASE("flat smile drives gamma toward its lower bound") {
    // Quotes from a Gaussian model carry no strike information for gamma.
    const DiscountCurve dc = DiscountCurve::flat_rate(0.02);
    const QuoteSurface surf = synthetic_surface(0.01, 1e-8, 0.0, dc, {2.0});
    const CalibrationReport rep = calibrate(surf, dc, PiecewiseCurve::constant(0.15));
    CHECK(rep.converged);
    CHECK(rep.buckets[0].sigma == doctest::Approx(0.01).epsilon(1e-5));
    CHECK(std::abs(rep.buckets[0].gamma * rep.buckets[0].y_star) < 1e-3);  // no skew invented
    for (double r : rep.residuals) CHECK(std::abs(r) < 1e-7);
}

TEST_CASE("report rebuilds a model that reprices the quotes") {
    const DiscountCurve dc = DiscountCurve::flat_rate(0.02);
    const QuoteSurface surf = synthetic_surface(0.011, 45.0, 0.005, dc, {1.5, 3.0});
    const CalibrationReport rep = calibrate(surf, dc, PiecewiseCurve::constant(0.15));
    const ModelParams fit = rep.build_model(dc, PiecewiseCurve::constant(0.15));
    for (const Quote& q : surf.quotes) {
        const double iv = surface_implied_vol(
            fit, InstrumentSpec::rfr_caplet(q.maturity - q.tenor, q.maturity, q.strike, q.tenor));
        CHECK(iv == doctest::Approx(q.implied_vol).epsilon(1e-7));
    }
}

TEST_CASE("piecewise curves in the report break at quote maturities") {
    const DiscountCurve dc = DiscountCurve::flat_rate(0.02);
    const QuoteSurface surf = synthetic_surface(0.01, 50.0, 0.004, dc, {1.5, 3.0, 5.0});
    const CalibrationReport rep = calibrate(surf, dc, PiecewiseCurve::constant(0.15));
    CHECK(rep.sigma.breakpoints().size() == 3);  // {0, 1.5, 3.0}
    CHECK(rep.buckets.size() == 3);
}
