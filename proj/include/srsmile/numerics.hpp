#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace srsmile {

struct QuadratureSpec {
    int nodes_per_piece = 16;
    int refinement_factor = 2;
    double target_rel_tol = 1e-10;
    int max_refinements = 8;
};

struct ToleranceFailure : std::runtime_error {
    double previous_estimate;
    double last_estimate;
    ToleranceFailure(double prev, double last);
};

// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
const std::vector<double>& gl_nodes(int n);
const std::vector<double>& gl_weights(int n);

// Fixed-order Gauss-Legendre per sub-interval of [a,b] split at `splits`,
// refined by doubling the order until successive estimates agree to
// target_rel_tol. Splits outside (a,b) are ignored.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> splits, const QuadratureSpec& spec = {});

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::initializer_list<double> splits, const QuadratureSpec& spec = {}) {
    return integrate(f, a, b, std::span<const double>(splits.begin(), splits.size()), spec);
}

// Bracketing root finder (Brent). Requires g(lo) * g(hi) <= 0.
double find_root(const std::function<double(double)>& g, double lo, double hi,
                 double tol = 1e-12);

double norm_pdf(double x);
double norm_cdf(double x);

// (Phi(d + g*h) - Phi(d - g*h)) / (2*g): cancellation-safe for small g*h.
double norm_cdf_diff_over(double d, double h, double g);

// sinh(g*x) / g, stable as g -> 0 with x held fixed.
double sinh_over(double x, double g);

struct BivariateGaussian {
    double s_rr, s_rz, s_zz;  // covariance entries
    double det() const { return s_rr * s_zz - s_rz * s_rz; }
};

// Zero-mean bivariate Gaussian density at (u, w).
double bvn_pdf(double u, double w, const BivariateGaussian& cov);

}  // namespace srsmile
