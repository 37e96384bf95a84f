#include "srsmile/implied.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace srsmile {

namespace {

std::vector<double> splits_in(const ModelParams& m, double a, double b) {
    std::vector<double> out;
    for (double s : m.breakpoints())
        if (s > a && s < b) out.push_back(s);
    return out;
}

// psi_r(0,t1) cosh(Y) - psi_r(ts,t1), grouped so the Gaussian limit
// (gamma -> 0) goes to zero without cancellation noise.
double level_integrand_factor(const ModelParams& m, double ts, double t1, double Y) {
    const double g = m.gamma()(t1);
    const double dsrr = sigma_rr(m, 0.0, t1) - sigma_rr(m, ts, t1);
    const double cosh_y = std::cosh(Y);
    const double coshm1 = 2.0 * std::sinh(0.5 * Y) * std::sinh(0.5 * Y);
    return psi_r(m, ts, t1) * (std::expm1(0.5 * g * g * dsrr) * cosh_y + coshm1);
}

struct CapletCs {
    double c1, c2, c3;
};

// C1..C3 over [ts, te] against a moneyness-scale function psi_scale(t1).
CapletCs caplet_coefficients(const ModelParams& m, double ts, double te,
                             const std::function<double(double)>& psi_scale, double horizon,
                             const QuadratureSpec& spec) {
    const auto splits = splits_in(m, ts, te);
    CapletCs cs;
    cs.c1 = integrate(
        [&](double t1) {
            return level_integrand_factor(m, ts, t1, y_star_arg(m, t1, horizon, spec)) *
                   psi_scale(t1);
        },
        ts, te, splits, spec);
    cs.c2 = 0.5 * integrate(
                      [&](double t1) {
                          const double p = psi_scale(t1);
                          return psi_r(m, 0.0, t1) *
                                 std::sinh(y_star_arg(m, t1, horizon, spec)) * m.gamma()(t1) * p *
                                 p;
                      },
                      ts, te, splits, spec);
    cs.c3 = integrate(
                [&](double t1) {
                    const double g = m.gamma()(t1);
                    const double p = psi_scale(t1);
                    return psi_r(m, 0.0, t1) * std::cosh(y_star_arg(m, t1, horizon, spec)) * g *
                           g * p * p * p;
                },
                ts, te, splits, spec) /
            6.0;
    return cs;
}

EffectiveVariance caplet_variance(const ModelParams& m, double T1, double T2, double kappa,
                                  bool include_zz, const QuadratureSpec& spec) {
    EffectiveVariance ev;
    const double bs = b_star(m, T1, T2, spec);
    ev.baseline = bs * bs * sigma_rr(m, 0.0, T1) +
                  (include_zz ? sigma_zz(m, T1, T2, spec) : 0.0);
    if (ev.baseline <= 0.0) throw std::domain_error("effective_variance: zero baseline variance");
    const double s = std::sqrt(ev.baseline);
    const double dz_star = std::log(m.discount().discount(T1, T2) / kappa);
    ev.moneyness = (-dz_star - 0.5 * ev.baseline) / s;

    const auto psi_scale = [&](double t1) {
        double num = bs * phi_r(m, T1, t1) * sigma_rr(m, 0.0, T1);
        if (include_zz)
            num += sigma_rz(m, T1, t1, spec) +
                   b_plus(m, T1, t1, T2, spec) * sigma_rr(m, T1, t1);
        return num / s;
    };
    const CapletCs cs = caplet_coefficients(m, T1, T2, psi_scale, T2, spec);
    ev.c1 = cs.c1;
    ev.c2 = cs.c2;
    ev.c3 = cs.c3;
    const double d = ev.moneyness;
    ev.adjustment = 2.0 * s * (cs.c1 - cs.c2 * d + cs.c3 * (d * d - 1.0));
    ev.eps_diagnostic = std::max(std::abs(cs.c2), cs.c3) / s;
    if (ev.adjustment < -0.9 * ev.baseline)
        throw std::domain_error("effective_variance: adjustment dominates baseline");
    return ev;
}

}  // namespace

EffectiveVariance effective_variance_rfr(const ModelParams& m, const InstrumentSpec& inst,
                                         const QuadratureSpec& spec) {
    inst.validate();
    return caplet_variance(m, inst.times[0], inst.times[1], inst.kappa(), true, spec);
}

EffectiveVariance effective_variance_libor(const ModelParams& m, const InstrumentSpec& inst,
                                           const QuadratureSpec& spec) {
    inst.validate();
    const double T1 = inst.times[0], T2 = inst.times[1];
    const ModelParams zeroed = zero_sigma_on(m, T1, T2, T2, spec, false);
    return caplet_variance(zeroed, T1, T2, inst.kappa(), false, spec);
}

EffectiveVariance effective_variance_swaption(const ModelParams& m, const InstrumentSpec& inst,
                                              const QuadratureSpec& spec) {
    inst.validate();
    const double T0 = inst.times[0];
    const double K = inst.strike;
    const std::size_t n = inst.times.size() - 1;
    EffectiveVariance ev;
    ev.baseline = sigma_rr(m, 0.0, T0);
    if (ev.baseline <= 0.0) throw std::domain_error("effective_variance: zero baseline variance");
    const double s0 = std::sqrt(ev.baseline);
    const double yc = swaption_exercise_y(m, inst, spec);
    const double srz0 = sigma_rz(m, 0.0, T0, spec);
    const double base = (-yc - srz0) / s0;
    const double bs_n = b_star(m, T0, inst.times.back(), spec);
    const double d_n = base - bs_n * s0;
    ev.moneyness = d_n;

    const auto psi_l = [&](double t1) { return phi_r(m, T0, t1) * s0; };
    for (std::size_t i = 1; i <= n; ++i) {
        const double Ti = inst.times[i];
        const double w = (i == n ? 1.0 : 0.0) + K * inst.accruals[i - 1];
        const double Di = m.discount().discount(Ti);
        const double bsi = b_star(m, T0, Ti, spec);
        const double delta_d = (bsi - bs_n) * s0;  // d_n - d_i
        const CapletCs cs = caplet_coefficients(m, T0, Ti, psi_l, Ti, spec);
        // (c1 - c2 (d_n - delta) + c3 ((d_n - delta)^2 - 1)) (1 + delta d_n),
        // expanded in d_n with the cubic term dropped.
        const double a0 = cs.c1 + cs.c2 * delta_d + cs.c3 * (delta_d * delta_d - 1.0);
        const double a1 = -cs.c2 - 2.0 * cs.c3 * delta_d;
        const double a2 = cs.c3;
        const double c0 = a0;
        const double c1 = a1 + a0 * delta_d;
        const double c2 = a2 + a1 * delta_d;
        ev.a_n += w * bsi * Di;
        ev.b_n += w * bsi * Di * delta_d;
        ev.d_n += w * Di * (c0 + c2);
        ev.e_n += w * Di * c1;
        ev.f_n += w * Di * c2;
    }
    const double denom = ev.a_n + ev.b_n * d_n;
    if (std::abs(denom) < 1e-8 * std::abs(ev.a_n))
        throw std::domain_error(
            "effective_variance_swaption: singular expansion denominator (far from the money)");
    ev.adjustment = 2.0 * s0 * (ev.d_n + ev.e_n * d_n + ev.f_n * (d_n * d_n - 1.0)) / denom;
    ev.eps_diagnostic = std::abs(ev.adjustment) / ev.baseline;
    if (ev.adjustment < -0.9 * ev.baseline)
        throw std::domain_error("effective_variance: adjustment dominates baseline");
    return ev;
}

EffectiveVariance effective_variance(const ModelParams& m, const InstrumentSpec& inst,
                                     const QuadratureSpec& spec) {
    switch (inst.kind) {
        case InstrumentSpec::Kind::RfrCaplet:
            return effective_variance_rfr(m, inst, spec);
        case InstrumentSpec::Kind::LiborCaplet:
            return effective_variance_libor(m, inst, spec);
        case InstrumentSpec::Kind::PayerSwaption:
            return effective_variance_swaption(m, inst, spec);
    }
    throw std::logic_error("effective_variance: unknown kind");
}

double hw_caplet_price(double D1, double D2, double kappa, double dz_star, double variance) {
    if (variance <= 0.0) throw std::domain_error("hw_caplet_price: variance must be > 0");
    const double s = std::sqrt(variance);
    const double d1 = (-dz_star + 0.5 * variance) / s;
    return D1 * norm_cdf(d1) - D2 / kappa * norm_cdf(d1 - s);
}

double hw_swaption_price(const HwSwaptionInputs& in, double variance) {
    if (variance <= 0.0) throw std::domain_error("hw_swaption_price: variance must be > 0");
    const double s = std::sqrt(variance);
    const double base = (-in.y_c - in.sigma_rz) / s;
    double pv = in.discounts.at(0) * norm_cdf(base);
    for (std::size_t i = 1; i < in.discounts.size(); ++i)
        pv -= in.weights.at(i - 1) * in.discounts[i] * norm_cdf(base - in.b_factors.at(i) * s);
    return pv;
}

namespace {

ModelParams hw_limit_model(const ModelParams& m, double sigma) {
    return ModelParams(PiecewiseCurve::constant(sigma), m.alpha(),
                       PiecewiseCurve::constant(1e-8), PiecewiseCurve::constant(0.0),
                       m.discount());
}

}  // namespace

double hw_unit_variance(const ModelParams& m, const InstrumentSpec& inst,
                        const QuadratureSpec& spec) {
    const ModelParams hw = hw_limit_model(m, 1.0);
    switch (inst.kind) {
        case InstrumentSpec::Kind::RfrCaplet: {
            const double bs = b_star(hw, inst.times[0], inst.times[1], spec);
            return bs * bs * sigma_rr(hw, 0.0, inst.times[0]) +
                   sigma_zz(hw, inst.times[0], inst.times[1], spec);
        }
        case InstrumentSpec::Kind::LiborCaplet: {
            const double bs = b_star(hw, inst.times[0], inst.times[1], spec);
            return bs * bs * sigma_rr(hw, 0.0, inst.times[0]);
        }
        case InstrumentSpec::Kind::PayerSwaption:
            return sigma_rr(hw, 0.0, inst.times[0]);
    }
    throw std::logic_error("hw_unit_variance: unknown kind");
}

double implied_hw_vol(const ModelParams& m, const InstrumentSpec& inst, double target_pv,
                      const QuadratureSpec& spec) {
    inst.validate();
    const double sig_lo = 1e-6, sig_hi = 5.0;
    std::function<double(double)> pv_of_sigma;
    if (inst.kind == InstrumentSpec::Kind::PayerSwaption) {
        pv_of_sigma = [&](double sigma) {
            ModelParams hw = hw_limit_model(m, sigma);
            install_drift(hw, inst.times.back(), spec);
            return price_swaption(hw, inst, spec).pv;
        };
    } else {
        const double v1 = hw_unit_variance(m, inst, spec);
        const double D1 = m.discount().discount(inst.times[0]);
        const double D2 = m.discount().discount(inst.times[1]);
        const double kappa = inst.kappa();
        const double dz_star =
            std::log(m.discount().discount(inst.times[0], inst.times[1]) / kappa);
        pv_of_sigma = [=](double sigma) {
            return hw_caplet_price(D1, D2, kappa, dz_star, sigma * sigma * v1);
        };
    }
    const double pv_lo = pv_of_sigma(sig_lo), pv_hi = pv_of_sigma(sig_hi);
    if (target_pv < pv_lo || target_pv > pv_hi) {
        std::ostringstream msg;
        msg << "implied_hw_vol: target " << target_pv << " outside attainable range [" << pv_lo
            << ", " << pv_hi << "]";
        throw std::runtime_error(msg.str());
    }
    return find_root([&](double sigma) { return pv_of_sigma(sigma) - target_pv; }, sig_lo,
                     sig_hi, 1e-14);
}

double surface_implied_vol(const ModelParams& m, const InstrumentSpec& inst,
                           const QuadratureSpec& spec) {
    const double v_eff = effective_variance(m, inst, spec).total();
    if (v_eff <= 0.0) throw std::domain_error("surface_implied_vol: non-positive variance");
    return std::sqrt(v_eff / hw_unit_variance(m, inst, spec));
}

}  // namespace srsmile
