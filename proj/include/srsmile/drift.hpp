#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "srsmile/kernel.hpp"
#include "srsmile/numerics.hpp"
#include "srsmile/termstructure.hpp"

namespace srsmile {

// Natural cubic spline interpolant with exact segment integrals. The spline
// is solved independently on each run between consecutive `knots` (which must
// be grid nodes), so derivative discontinuities at curve breakpoints do not
// ring into neighbouring segments.
class CubicTable {
  public:
    CubicTable() = default;
    CubicTable(std::vector<double> x, std::vector<double> y,
               const std::vector<double>& knots = {});

    double operator()(double t) const;
    // int_0^t of the interpolant.
    double integral_to(double t) const;

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& values() const { return y_; }

  private:
    // slope_[i] is the derivative seen from the right of node i, slope_left_[i]
    // from the left; they differ only at interior knots.
    std::vector<double> x_, y_, slope_, slope_left_, cum_;
};

// Tabulated no-arbitrage drift corrections. R1* is split into a smooth base
// (the linearized-model drift, evaluated exactly on demand) plus a tabulated
// residual, so table interpolation error scales with the smile content and
// vanishes in the Hull-White limit.
struct DriftTable {
    std::function<double(double)> r1_base;  // linearized-model drift
    CubicTable r1;                          // R1* minus the base
    CubicTable r2;                          // remainder beyond R1*
    double horizon = 0.0;

    double r1_star(double t) const { return (r1_base ? r1_base(t) : 0.0) + r1(t); }
    double r2_star(double t) const { return r2(t); }
    double r_star(double t) const { return r1_star(t) + r2(t); }
};

// First-order drift correction, computed directly from the model curves.
double r1_star(const ModelParams& m, double t, const QuadratureSpec& spec = {});

// Same quantity written through the exponential-shift pair; used as an
// internal consistency check of the two equivalent forms.
double r1_star_r1form(const ModelParams& m, double t, const QuadratureSpec& spec = {});

// Second-order drift correction; requires an installed drift table for the
// cumulative integral of R1*.
double r2_star(const ModelParams& m, double t, const QuadratureSpec& spec = {});

// Builds the drift table on the union of model breakpoints and a uniform
// grid (nodes_per_year) up to `horizon`.
std::unique_ptr<DriftTable> build_drift_table(const ModelParams& m, double horizon,
                                              const QuadratureSpec& spec = {},
                                              int nodes_per_year = 32);

// Convenience: build and install in one step.
void install_drift(ModelParams& m, double horizon, const QuadratureSpec& spec = {},
                   int nodes_per_year = 32);

// Scalar action of the first-order generator on the constant payoff, used in
// the bond expansion: the shift operators act trivially there.
double g1_scalar(const ModelParams& m, double y, double t, double t1, double v,
                 const QuadratureSpec& spec = {});

// F1(y,t,T): first-order relative correction to the bond reconstitution.
double f1_functional(const ModelParams& m, double y, double t, double T,
                     const QuadratureSpec& spec = {});

// F2(y,t,T) = F1^2/2 - int_t^T R2*; second-order correction.
double f2_functional(const ModelParams& m, double y, double t, double T,
                     const QuadratureSpec& spec = {});

}  // namespace srsmile
