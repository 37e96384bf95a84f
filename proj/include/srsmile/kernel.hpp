#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <tuple>
#include <utility>

#include "srsmile/numerics.hpp"
#include "srsmile/termstructure.hpp"

namespace srsmile {

// Convolution-integral vocabulary: decay factor phi_r, smile dispersion
// psi_r, the covariance entries Sigma_rr / Sigma_rz / Sigma_zz, and the
// smile-adjusted duration factors B*, B+.

// phi_r(t,v) = exp(-int_t^v alpha); exact for piecewise-constant alpha.
double phi_r(const ModelParams& m, double t, double v);

// Sigma_rr(t,v) = int_t^v phi_r(u,v)^2 sigma(u)^2 du; exact closed form.
double sigma_rr(const ModelParams& m, double t, double v);

// psi_r(t,v) = exp(gamma(v)^2 Sigma_rr(t,v) / 2).
double psi_r(const ModelParams& m, double t, double v);

double sigma_rz(const ModelParams& m, double t, double v, const QuadratureSpec& spec = {});
double sigma_zz(const ModelParams& m, double t, double v, const QuadratureSpec& spec = {});
double b_star(const ModelParams& m, double t, double v, const QuadratureSpec& spec = {});

// B+(t,t1,v) = int_{t1}^v psi_r(t,u) phi_r(t1,u) du, t <= t1 <= v.
double b_plus(const ModelParams& m, double t, double t1, double v,
              const QuadratureSpec& spec = {});

struct KernelStats {
    double t = 0.0, v = 0.0;
    double phi_r = 1.0;
    double sigma_rr = 0.0;
    double psi_r = 1.0;
    double sigma_rz = 0.0;
    double sigma_zz = 0.0;
    double b_star = 0.0;
    double sigma_rr_0t = 0.0;  // Sigma_rr(0,t)
    double sigma_rz_0t = 0.0;  // Sigma_rz(0,t)

    double mu_star(double y) const {
        return b_star * (y + sigma_rz_0t) + 0.5 * b_star * b_star * sigma_rr_0t;
    }
    BivariateGaussian covariance() const { return {sigma_rr, sigma_rz, sigma_zz}; }
};

KernelStats kernel_stats(const ModelParams& m, double t, double v,
                         const QuadratureSpec& spec = {});

// Linear part of the skew argument: Y*(t1,t) = gamma(t1) * y_star_arg_lin.
double y_star_arg_lin(const ModelParams& m, double t1, double t, const QuadratureSpec& spec = {});
double y_star_arg(const ModelParams& m, double t1, double t, const QuadratureSpec& spec = {});

// The pair (R1+, R1-); requires gamma(t1) > 0.
std::pair<double, double> r1_plus_minus(const ModelParams& m, double y, double t, double t1,
                                        double v, const QuadratureSpec& spec = {});

// Zeroth-order kernel: bivariate Gaussian at displaced arguments.
double kernel_g0(const ModelParams& m, double y, double z, double t, double eta, double zeta,
                 double v, const QuadratureSpec& spec = {});

// First-order kernel correction applied to a payoff:
// returns the (eta,zeta)-integral of G1 * payoff (without the D e^{-mu*} prefactor).
// Requires an installed drift.
double kernel_g1_apply(const ModelParams& m, const std::function<double(double, double)>& payoff,
                       double y, double z, double t, double v, const QuadratureSpec& spec = {},
                       int grid_n = 48);

// Memoizes the quadrature-backed kernel quantities per (t, v) or (t, t1, v).
class KernelCache {
  public:
    double get(int kind, double a, double b, double c, const std::function<double()>& calc);

  private:
    std::map<std::tuple<int, double, double, double>, double> values_;
    std::mutex mtx_;
};

}  // namespace srsmile
