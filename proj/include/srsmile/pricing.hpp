#pragma once

#include <functional>
#include <string>
#include <vector>

#include "srsmile/drift.hpp"
#include "srsmile/kernel.hpp"
#include "srsmile/numerics.hpp"
#include "srsmile/termstructure.hpp"

namespace srsmile {

struct InstrumentSpec {
    enum class Kind { RfrCaplet, LiborCaplet, PayerSwaption };

    Kind kind = Kind::RfrCaplet;
    std::string id;
    // Caplets: times = {T1, T2}, accruals = {delta}.
    // Swaption: times = {T0, ..., Tn}, accruals = {delta_1, ..., delta_n}.
    std::vector<double> times;
    std::vector<double> accruals;
    double strike = 0.0;

    // Caplets: 1 / (1 + K * delta).
    double kappa() const;
    void validate() const;

    static InstrumentSpec rfr_caplet(double T1, double T2, double strike, double accrual);
    static InstrumentSpec libor_caplet(double T1, double T2, double strike, double accrual);
    static InstrumentSpec payer_swaption(std::vector<double> times, double strike,
                                         std::vector<double> accruals);
};

struct PriceResult {
    double pv = 0.0;
    double order0 = 0.0;  // Gaussian-kernel part
    double order1 = 0.0;  // first-order correction
    double d1 = 0.0, d2 = 0.0;
};

// Zero-coupon bond reconstitution F^T(y,t); requires an installed drift.
double zcb_price(const ModelParams& m, double y, double t, double T,
                 const QuadratureSpec& spec = {}, bool second_order = true);

// Instantaneous forward rate f^T(y,t) consistent with zcb_price to first order.
double forward_rate(const ModelParams& m, double y, double t, double T,
                    const QuadratureSpec& spec = {});

PriceResult price_rfr_caplet(const ModelParams& m, const InstrumentSpec& inst,
                             const QuadratureSpec& spec = {});
PriceResult price_libor_caplet(const ModelParams& m, const InstrumentSpec& inst,
                               const QuadratureSpec& spec = {});
// Same, on a model already zeroed over the accrual period (zero_sigma_on with
// drift installed); reuses one drift build across strikes.
PriceResult price_libor_caplet_on(const ModelParams& zeroed, const InstrumentSpec& inst,
                                  const QuadratureSpec& spec = {});
PriceResult price_swaption(const ModelParams& m, const InstrumentSpec& inst,
                           const QuadratureSpec& spec = {});

// Exercise boundary of the payer swaption in y at T0 (first-order bonds).
double swaption_exercise_y(const ModelParams& m, const InstrumentSpec& inst,
                           const QuadratureSpec& spec = {});

// Copy of m with sigma forced to zero on [a, b); drift rebuilt to `horizon`
// unless with_drift is false (variance-only uses don't need it).
ModelParams zero_sigma_on(const ModelParams& m, double a, double b, double horizon,
                          const QuadratureSpec& spec = {}, bool with_drift = true);

// Time-t price of a payoff P(eta, zeta) paid at v, by quadrature against the
// transition kernel through first order (eta: terminal y, zeta: terminal z
// increment). State (y, z) at t; z conventionally 0 when t = 0.
double price_by_kernel_quadrature(const ModelParams& m,
                                  const std::function<double(double, double)>& payoff, double y,
                                  double z, double t, double v, const QuadratureSpec& spec = {},
                                  int grid_n = 48);

// Independent caplet cross-pricer: two kernel-quadrature stages chained at T1.
double kernel_quadrature_rfr_caplet(const ModelParams& m, const InstrumentSpec& inst,
                                    const QuadratureSpec& spec = {}, int grid_n = 48);

}  // namespace srsmile
