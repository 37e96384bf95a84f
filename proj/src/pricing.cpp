#include "srsmile/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace srsmile {

double InstrumentSpec::kappa() const {
    if (kind == Kind::PayerSwaption)
        throw std::logic_error("kappa: not defined for swaptions");
    return 1.0 / (1.0 + strike * accruals.at(0));
}

void InstrumentSpec::validate() const {
    if (times.size() < 2) throw std::invalid_argument(id + ": need at least two times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument(id + ": times must be strictly ascending");
    if (!(times.front() > 0.0)) throw std::invalid_argument(id + ": first time must be > 0");
    for (double d : accruals)
        if (!(d > 0.0)) throw std::invalid_argument(id + ": accruals must be > 0");
    if (kind == Kind::PayerSwaption) {
        if (accruals.size() != times.size() - 1)
            throw std::invalid_argument(id + ": swaption needs one accrual per period");
    } else {
        if (times.size() != 2 || accruals.size() != 1)
            throw std::invalid_argument(id + ": caplet needs {T1,T2} and one accrual");
        if (kappa() <= 0.0) throw std::invalid_argument(id + ": kappa must be positive");
    }
}

InstrumentSpec InstrumentSpec::rfr_caplet(double T1, double T2, double strike, double accrual) {
    InstrumentSpec s;
    s.kind = Kind::RfrCaplet;
    s.times = {T1, T2};
    s.strike = strike;
    s.accruals = {accrual};
    s.validate();
    return s;
}

InstrumentSpec InstrumentSpec::libor_caplet(double T1, double T2, double strike, double accrual) {
    InstrumentSpec s = rfr_caplet(T1, T2, strike, accrual);
    s.kind = Kind::LiborCaplet;
    return s;
}

InstrumentSpec InstrumentSpec::payer_swaption(std::vector<double> times, double strike,
                                              std::vector<double> accruals) {
    InstrumentSpec s;
    s.kind = Kind::PayerSwaption;
    s.times = std::move(times);
    s.strike = strike;
    s.accruals = std::move(accruals);
    s.validate();
    return s;
}

namespace {

std::vector<double> splits_in(const ModelParams& m, double a, double b, double extra = -1.0) {
    std::set<double> out;
    for (double s : m.breakpoints())
        if (s > a && s < b) out.insert(s);
    if (extra > a && extra < b) out.insert(extra);
    return {out.begin(), out.end()};
}

// One leg of the first-order option correction: the time integral of the
// shift-pair plus scalar generator acting on Phi(d). The shift displaces d by
// +-gamma(t1) * h(t1); before the split time the exponential damping factor
// contributes exp(-+ gamma * theta_coef * Xi).
struct LegSpec {
    double v;        // integration horizon and kernel maturity
    double ts;       // split time (fixing/expiry)
    double d0;       // undisplaced argument of Phi
    double yshift;   // d-displacement per unit gamma*Xi (y-shift channel)
    double zshift;   // d-displacement per unit gamma*zsh (z-shift channel)
    double theta;    // damping exponent per unit gamma*Xi, t1 <= ts only
};

double leg_integral(const ModelParams& m, const LegSpec& L, const QuadratureSpec& spec) {
    const double phi_d0 = norm_cdf(L.d0);
    const auto f = [&](double t1) {
        const double g = m.gamma()(t1);
        const double psi01 = psi_r(m, 0.0, t1);
        const double srr01 = sigma_rr(m, 0.0, t1);
        const double bp = b_plus(m, 0.0, t1, L.v, spec);
        const double q = m.y_star()(t1) - bp * srr01 - sigma_rz(m, 0.0, t1, spec);
        const double scalar = m.r1_star_cached(t1) + psi01 * bp * srr01;
        double lam = 0.0, h = 0.0;
        if (t1 <= L.ts) {
            const double xi = phi_r(m, t1, L.ts) * srr01;
            lam = L.theta * xi;
            h = L.yshift * xi;
        } else {
            const double xi = phi_r(m, L.ts, t1) * sigma_rr(m, 0.0, L.ts);
            const double zsh =
                sigma_rz(m, L.ts, t1, spec) + b_plus(m, L.ts, t1, L.v, spec) * sigma_rr(m, L.ts, t1);
            h = L.yshift * xi + L.zshift * zsh;
        }
        const double u = q - lam;
        const double pair = psi01 * (sinh_over(u, g) * 0.5 *
                                         (norm_cdf(L.d0 + g * h) + norm_cdf(L.d0 - g * h)) +
                                     std::cosh(g * u) * norm_cdf_diff_over(L.d0, h, g));
        return pair + scalar * phi_d0;
    };
    return integrate(f, 0.0, L.v, splits_in(m, 0.0, L.v, L.ts), spec);
}

PriceResult caplet_core(const ModelParams& m, double T1, double T2, double kappa, bool include_zz,
                        const QuadratureSpec& spec) {
    const double D1 = m.discount().discount(T1);
    const double D2 = m.discount().discount(T2);
    const double dz_star = std::log(m.discount().discount(T1, T2) / kappa);
    const double bs = b_star(m, T1, T2, spec);
    const double V =
        bs * bs * sigma_rr(m, 0.0, T1) + (include_zz ? sigma_zz(m, T1, T2, spec) : 0.0);
    PriceResult res;
    if (V < 1e-20) {
        res.pv = res.order0 = std::max(D1 - D2 / kappa, 0.0);
        return res;
    }
    const double s = std::sqrt(V);
    res.d1 = (-dz_star + 0.5 * V) / s;
    res.d2 = res.d1 - s;
    const double srz01 = sigma_rz(m, 0.0, T1, spec);
    const double i1 =
        leg_integral(m, {T1, T1, res.d1, bs / s, 1.0 / s, 0.0}, spec);
    const double i2 =
        leg_integral(m, {T2, T1, res.d2, bs / s, 1.0 / s, bs}, spec);
    res.order0 = D1 * norm_cdf(res.d1) - D2 / kappa * norm_cdf(res.d2);
    res.order1 = -D1 * i1 + D2 / kappa * (i2 + bs * srz01 * norm_cdf(res.d2)) -
                 D2 / kappa * s * norm_pdf(res.d2);
    res.pv = res.order0 + res.order1;
    return res;
}

}  // namespace

double zcb_price(const ModelParams& m, double y, double t, double T, const QuadratureSpec& spec,
                 bool second_order) {
    if (T < t) throw std::domain_error("zcb_price: need t <= T");
    if (T == t) return 1.0;
    const KernelStats ks = kernel_stats(m, t, T, spec);
    const double f1 = f1_functional(m, y, t, T, spec);
    double corr = 1.0 - f1;
    if (second_order) {
        const DriftTable* tab = m.drift();
        if (!tab) throw std::logic_error("zcb_price: drift not installed");
        corr += 0.5 * f1 * f1 - (tab->r2.integral_to(T) - tab->r2.integral_to(t));
    }
    return m.discount().discount(t, T) * std::exp(-ks.mu_star(y)) * corr;
}

double forward_rate(const ModelParams& m, double y, double t, double T,
                    const QuadratureSpec& spec) {
    if (T < t) throw std::domain_error("forward_rate: need t <= T");
    const KernelStats ks = kernel_stats(m, t, T, spec);
    const double lin =
        ks.psi_r * ks.phi_r * (y + ks.sigma_rz_0t + ks.b_star * ks.sigma_rr_0t);
    const DriftTable* tab = m.drift();
    if (!tab) throw std::logic_error("forward_rate: drift not installed");
    const double g1_tt = g1_scalar(m, y, t, T, T, spec);
    const double f1 = f1_functional(m, y, t, T, spec);
    const double F = zcb_price(m, y, t, T, spec, true);
    const double corr = m.discount().discount(t, T) * std::exp(-ks.mu_star(y)) / F *
                        (g1_tt * (1.0 - f1) + tab->r2_star(T));
    return m.discount().instantaneous_forward(T) + lin + corr;
}

PriceResult price_rfr_caplet(const ModelParams& m, const InstrumentSpec& inst,
                             const QuadratureSpec& spec) {
    inst.validate();
    return caplet_core(m, inst.times[0], inst.times[1], inst.kappa(), true, spec);
}

ModelParams zero_sigma_on(const ModelParams& m, double a, double b, double horizon,
                          const QuadratureSpec& spec, bool with_drift) {
    std::set<double> bps(m.sigma().breakpoints().begin(), m.sigma().breakpoints().end());
    bps.insert(a);
    bps.insert(b);
    std::vector<double> xs, vs;
    for (double x : bps) {
        xs.push_back(x);
        vs.push_back((x >= a && x < b) ? 0.0 : m.sigma()(x));
    }
    ModelParams out(PiecewiseCurve(std::move(xs), std::move(vs)), m.alpha(), m.gamma(),
                    m.y_star(), m.discount());
    if (with_drift) install_drift(out, horizon, spec);
    return out;
}

PriceResult price_libor_caplet(const ModelParams& m, const InstrumentSpec& inst,
                               const QuadratureSpec& spec) {
    inst.validate();
    const double T1 = inst.times[0], T2 = inst.times[1];
    const ModelParams zeroed = zero_sigma_on(m, T1, T2, T2, spec);
    return price_libor_caplet_on(zeroed, inst, spec);
}

PriceResult price_libor_caplet_on(const ModelParams& zeroed, const InstrumentSpec& inst,
                                  const QuadratureSpec& spec) {
    inst.validate();
    return caplet_core(zeroed, inst.times[0], inst.times[1], inst.kappa(), false, spec);
}

double swaption_exercise_y(const ModelParams& m, const InstrumentSpec& inst,
                           const QuadratureSpec& spec) {
    const double T0 = inst.times[0];
    const double Tn = inst.times.back();
    const double K = inst.strike;
    const auto swap_value = [&](double y) {
        double v = 1.0 - zcb_price(m, y, T0, Tn, spec, false);
        for (std::size_t i = 1; i < inst.times.size(); ++i)
            v -= K * inst.accruals[i - 1] * zcb_price(m, y, T0, inst.times[i], spec, false);
        return v;
    };
    const double sd = std::sqrt(sigma_rr(m, 0.0, T0));
    double half = 6.0 * sd;
    while (swap_value(-half) * swap_value(half) > 0.0) {
        half *= 1.5;
        if (half > 20.0 * sd) {
            // No boundary within reach: the factor cannot move the swap
            // across par (e.g. vanishing volatility), so exercise is
            // deterministic. A boundary pinned just outside the scanned
            // range keeps the downstream N(d) terms at 0/1 exactly.
            return swap_value(0.0) > 0.0 ? -half : half;
        }
    }
    return find_root(swap_value, -half, half);
}

PriceResult price_swaption(const ModelParams& m, const InstrumentSpec& inst,
                           const QuadratureSpec& spec) {
    inst.validate();
    if (inst.kind != InstrumentSpec::Kind::PayerSwaption)
        throw std::invalid_argument("price_swaption: wrong instrument kind");
    const double T0 = inst.times[0];
    const double K = inst.strike;
    const std::size_t n = inst.times.size() - 1;
    const auto& D = m.discount();
    const double srr0 = sigma_rr(m, 0.0, T0);
    PriceResult res;
    if (srr0 < 1e-20) {
        double swap = 1.0 - D.discount(T0, inst.times.back());
        for (std::size_t i = 1; i <= n; ++i)
            swap -= K * inst.accruals[i - 1] * D.discount(T0, inst.times[i]);
        res.pv = res.order0 = std::max(swap, 0.0) * D.discount(T0);
        return res;
    }
    const double yc = swaption_exercise_y(m, inst, spec);
    const double s0 = std::sqrt(srr0);
    const double srz0 = sigma_rz(m, 0.0, T0, spec);
    const double base = (-yc - srz0) / s0;

    const double d0 = base;
    res.d1 = d0;
    const double i0 = leg_integral(m, {T0, T0, d0, 1.0 / s0, 0.0, 0.0}, spec);
    res.order0 = D.discount(T0) * norm_cdf(d0);
    res.order1 = -D.discount(T0) * i0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double Ti = inst.times[i];
        const double w = (i == n ? 1.0 : 0.0) + K * inst.accruals[i - 1];
        const double Di = D.discount(Ti);
        const double bsi = b_star(m, T0, Ti, spec);
        const double di = base - bsi * s0;
        if (i == n) res.d2 = di;
        const double ii = leg_integral(m, {Ti, T0, di, 1.0 / s0, 0.0, bsi}, spec);
        res.order0 -= w * Di * norm_cdf(di);
        res.order1 -= w * Di * (-ii - bsi * srz0 * norm_cdf(di) + bsi * s0 * norm_pdf(di));
    }
    res.pv = res.order0 + res.order1;
    return res;
}

double price_by_kernel_quadrature(const ModelParams& m,
                                  const std::function<double(double, double)>& payoff, double y,
                                  double z, double t, double v, const QuadratureSpec& spec,
                                  int grid_n) {
    const KernelStats ks = kernel_stats(m, t, v, spec);
    const BivariateGaussian cov = ks.covariance();
    if (cov.det() <= 0.0)
        throw std::domain_error("price_by_kernel_quadrature: degenerate covariance");
    const double eta_c = ks.phi_r * y - ks.sigma_rz;
    const double zeta_c = z + ks.mu_star(y) - 0.5 * ks.sigma_zz;
    const double sd_eta = std::sqrt(cov.s_rr), sd_zeta = std::sqrt(cov.s_zz);
    const auto& xs = gl_nodes(grid_n);
    const auto& ws = gl_weights(grid_n);
    double g0_part = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        const double eta = eta_c + 8.0 * sd_eta * xs[i];
        const double a = eta + ks.sigma_rz - ks.phi_r * y;
        for (int j = 0; j < grid_n; ++j) {
            const double zeta = zeta_c + 8.0 * sd_zeta * xs[j];
            const double b = zeta - ks.mu_star(y) + 0.5 * ks.sigma_zz - z;
            g0_part += bvn_pdf(a, b, cov) * payoff(eta, zeta) * ws[i] * ws[j];
        }
    }
    g0_part *= 64.0 * sd_eta * sd_zeta;
    const double g1_part = kernel_g1_apply(m, payoff, y, z, t, v, spec, grid_n);
    return m.discount().discount(t, v) * std::exp(-ks.mu_star(y)) * (g0_part + g1_part);
}

double kernel_quadrature_rfr_caplet(const ModelParams& m, const InstrumentSpec& inst,
                                    const QuadratureSpec& spec, int grid_n) {
    inst.validate();
    const double T1 = inst.times[0], T2 = inst.times[1];
    const double kappa_inv = 1.0 / inst.kappa();
    const double d12 = m.discount().discount(T1, T2);
    // Inner stage: value at T1 of the T2 payoff, as a function of y at T1
    // (the z increment over [T1,T2] is what the payoff reads).
    std::map<double, double> inner;
    const auto inner_value = [&](double y1) {
        auto it = inner.find(y1);
        if (it != inner.end()) return it->second;
        const double val = price_by_kernel_quadrature(
            m, [&](double, double zeta) { return std::max(std::exp(zeta) / d12 - kappa_inv, 0.0); },
            y1, 0.0, T1, T2, spec, grid_n);
        inner.emplace(y1, val);
        return val;
    };
    return price_by_kernel_quadrature(
        m, [&](double eta, double) { return inner_value(eta); }, 0.0, 0.0, 0.0, T1, spec, grid_n);
}

}  // namespace srsmile
