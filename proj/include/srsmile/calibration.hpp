#pragma once

#include <vector>

#include "srsmile/implied.hpp"

namespace srsmile {

struct Quote {
    double maturity;     // caplet payment time T2
    double tenor;        // T2 - T1
    double strike;
    double implied_vol;  // Gaussian-limit (normal) vol of the short rate
};

struct QuoteSurface {
    std::vector<Quote> quotes;
    bool libor = false;  // quotes interpreted as term-rate caplets
};

struct BucketFit {
    double maturity = 0.0;
    double sigma = 0.0, y_star = 0.0, gamma = 0.0;
    double residual_norm = 0.0;  // RMS vol error over the bucket's strikes
    int iterations = 0;
    bool converged = false;
};

struct CalibrationReport {
    PiecewiseCurve sigma, y_star, gamma;
    std::vector<BucketFit> buckets;
    std::vector<double> residuals;  // fitted - market vol, per quote
    bool converged = false;

    ModelParams build_model(const DiscountCurve& discount, const PiecewiseCurve& alpha,
                            const QuadratureSpec& spec = {}) const;
};

struct CalibrationConfig {
    int max_iterations = 60;
    double vol_tolerance = 1e-9;   // stop when RMS residual falls below
    double step_tolerance = 1e-12;
    double sigma_init = 0.005;
    double gamma_init = 50.0;
    // parameter box (soft clamps inside the solver)
    double sigma_min = 1e-6, sigma_max = 1.0;
    double gamma_min = 1e-2, gamma_max = 1e4;
    double y_star_max = 1.0;
};

// Sequential bootstrap: maturity buckets in ascending order, 3 parameters
// (sigma, y*, gamma) per bucket fitted to that maturity's strike slice by
// Levenberg-Marquardt on implied vols from the effective-variance pipeline.
CalibrationReport calibrate(const QuoteSurface& surface, const DiscountCurve& discount,
                            const PiecewiseCurve& alpha, const QuadratureSpec& spec = {},
                            const CalibrationConfig& cfg = {});

}  // namespace srsmile
