#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace srsmile {

// Piecewise-constant function of time. Interval [t_i, t_{i+1}) owns t_i;
// the last value extends to +infinity.
class PiecewiseCurve {
  public:
    PiecewiseCurve() = default;
    PiecewiseCurve(std::vector<double> breakpoints, std::vector<double> values);

    static PiecewiseCurve constant(double value);

    double operator()(double t) const;

    // Exact integral of the curve over [a, b], a <= b.
    double integral(double a, double b) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    // Index of the interval owning t.
    std::size_t interval_index(double t) const;

  private:
    std::vector<double> breakpoints_{0.0};
    std::vector<double> values_{0.0};
};

// Deterministic discount curve, log-linear between pillars, so the implied
// instantaneous forward rate is piecewise constant. Flat extrapolation of
// the forward beyond the last pillar.
class DiscountCurve {
  public:
    DiscountCurve();  // flat zero-rate curve
    DiscountCurve(std::vector<double> pillar_times, std::vector<double> pillar_discounts);

    static DiscountCurve flat_rate(double rate);

    // D(t1, t2) = D(0,t2) / D(0,t1); requires 0 <= t1 <= t2.
    double discount(double t1, double t2) const;
    double discount(double t) const { return discount(0.0, t); }

    // rbar(t) = -d/dt ln D(0,t); exact slope of the containing segment.
    double instantaneous_forward(double t) const;

    // rbar as a piecewise-constant curve (segment slopes).
    const PiecewiseCurve& forward_curve() const { return forward_; }

    const std::vector<double>& pillar_times() const { return times_; }

  private:
    std::vector<double> times_;
    std::vector<double> log_discounts_;
    PiecewiseCurve forward_;

    double log_discount(double t) const;
};

struct DriftTable;  // built by the drift module
class KernelCache;

// Full model: r(y,t) = rbar(t) + R*(t) + sinh(gamma(t)(y + ystar(t))) / gamma(t),
// dy = -alpha y dt + sigma dW. gamma must be strictly positive everywhere;
// the Hull-White limit is exercised with gamma ~ 1e-8.
class ModelParams {
  public:
    ModelParams(PiecewiseCurve sigma, PiecewiseCurve alpha, PiecewiseCurve gamma,
                PiecewiseCurve y_star, DiscountCurve discount);
    ~ModelParams();
    ModelParams(ModelParams&&) noexcept;
    ModelParams& operator=(ModelParams&&) noexcept;
    ModelParams(const ModelParams&) = delete;
    ModelParams& operator=(const ModelParams&) = delete;

    const PiecewiseCurve& sigma() const { return sigma_; }
    const PiecewiseCurve& alpha() const { return alpha_; }
    const PiecewiseCurve& gamma() const { return gamma_; }
    const PiecewiseCurve& y_star() const { return y_star_; }
    const DiscountCurve& discount() const { return discount_; }

    // Union of parameter breakpoints and discount pillars; quadrature splits.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    // Calibrated no-arbitrage drift R1* + R2*; null until installed.
    const DriftTable* drift() const { return drift_.get(); }
    void install_drift(std::unique_ptr<DriftTable> table);

    // R1*(t) from the installed table; throws if no drift installed.
    double r1_star_cached(double t) const;
    // R*(t) = R1*(t) + R2*(t) from the installed table.
    double r_star_cached(double t) const;

    KernelCache& kernel_cache() const { return *cache_; }

  private:
    PiecewiseCurve sigma_, alpha_, gamma_, y_star_;
    DiscountCurve discount_;
    std::vector<double> breakpoints_;
    std::unique_ptr<DriftTable> drift_;
    std::unique_ptr<KernelCache> cache_;
};

}  // namespace srsmile
