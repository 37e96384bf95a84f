#pragma once

#include <vector>

#include "srsmile/pricing.hpp"

namespace srsmile {

struct EffectiveVariance {
    double baseline = 0.0;    // V_C, V_L, or Sigma_rr(0,T0)
    double adjustment = 0.0;  // smile/skew variance adjustment
    // Caplet expansion coefficients (c1 skewless level, c2 skew, c3 smile);
    // zero for swaptions, where a_n..f_n carry the leg-aggregated expansion.
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double a_n = 0.0, b_n = 0.0, d_n = 0.0, e_n = 0.0, f_n = 0.0;
    double moneyness = 0.0;        // d-value the adjustment was evaluated at
    double eps_diagnostic = 0.0;   // max(|c2|, c3) / sqrt(baseline)

    double total() const { return baseline + adjustment; }
};

EffectiveVariance effective_variance_rfr(const ModelParams& m, const InstrumentSpec& inst,
                                         const QuadratureSpec& spec = {});
EffectiveVariance effective_variance_libor(const ModelParams& m, const InstrumentSpec& inst,
                                           const QuadratureSpec& spec = {});
EffectiveVariance effective_variance_swaption(const ModelParams& m, const InstrumentSpec& inst,
                                              const QuadratureSpec& spec = {});
EffectiveVariance effective_variance(const ModelParams& m, const InstrumentSpec& inst,
                                     const QuadratureSpec& spec = {});

// Gaussian-rate (Hull-White style) caplet price for a given total variance of
// the compounding/term factor.
double hw_caplet_price(double D1, double D2, double kappa, double dz_star, double variance);

struct HwSwaptionInputs {
    std::vector<double> discounts;  // D(0,T0..Tn)
    std::vector<double> b_factors;  // B*(T0,Ti), i = 0..n (first entry 0)
    std::vector<double> weights;    // delta_{in} + K*delta_i, i = 1..n
    double y_c = 0.0;
    double sigma_rz = 0.0;          // Sigma_rz(0,T0)
};

// Gaussian-rate swaption price for a given short-rate variance Sigma_rr(0,T0).
double hw_swaption_price(const HwSwaptionInputs& in, double variance);

enum class HwKind { Caplet, Swaption };

// Constant-sigma Gaussian-limit implied volatility: the sigma that reprices
// target_pv under gamma -> 0, y* = 0, with the model's alpha and curve.
double implied_hw_vol(const ModelParams& m, const InstrumentSpec& inst, double target_pv,
                      const QuadratureSpec& spec = {});

// Implied vol of the instrument's own model price via the effective-variance
// pipeline (no drift required): sigma with V(sigma) = total effective variance.
double surface_implied_vol(const ModelParams& m, const InstrumentSpec& inst,
                           const QuadratureSpec& spec = {});

// Unit-sigma total variance of the instrument under the Gaussian limit; the
// variance at sigma is sigma^2 times this.
double hw_unit_variance(const ModelParams& m, const InstrumentSpec& inst,
                        const QuadratureSpec& spec = {});

}  // namespace srsmile
