#include "srsmile/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace srsmile {

namespace {

// Solve the 3x3 system A x = b by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> A, std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (std::abs(A[col][col]) < 1e-300) throw std::runtime_error("solve3: singular system");
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < 3; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

struct Bucket {
    double maturity, tenor;
    std::vector<const Quote*> quotes;
};

}  // namespace

ModelParams CalibrationReport::build_model(const DiscountCurve& discount,
                                           const PiecewiseCurve& alpha,
                                           const QuadratureSpec& spec) const {
    ModelParams m(sigma, alpha, gamma, y_star, discount);
    if (!buckets.empty()) install_drift(m, buckets.back().maturity, spec);
    return m;
}

CalibrationReport calibrate(const QuoteSurface& surface, const DiscountCurve& discount,
                            const PiecewiseCurve& alpha, const QuadratureSpec& spec,
                            const CalibrationConfig& cfg) {
    if (surface.quotes.empty()) throw std::invalid_argument("calibrate: no quotes");
    std::map<double, Bucket> buckets;
    for (const Quote& q : surface.quotes) {
        if (!(q.tenor > 0.0 && q.maturity > q.tenor))
            throw std::invalid_argument("calibrate: need maturity > tenor > 0");
        Bucket& b = buckets[q.maturity];
        if (!b.quotes.empty() && b.tenor != q.tenor)
            throw std::invalid_argument("calibrate: mixed tenors within a maturity bucket");
        b.maturity = q.maturity;
        b.tenor = q.tenor;
        b.quotes.push_back(&q);
    }

    // Piece k of each parameter curve starts at the previous bucket's maturity.
    std::vector<double> starts{0.0};
    for (const auto& [mat, b] : buckets)
        if (starts.size() < buckets.size()) starts.push_back(mat);
    std::vector<double> sig_v, ys_v, gam_v;

    CalibrationReport rep;
    rep.converged = true;
    const auto clamp = [](double x, double lo, double hi) { return std::min(std::max(x, lo), hi); };

    std::size_t k = 0;
    for (const auto& [mat, b] : buckets) {
        const double T2 = b.maturity, T1 = b.maturity - b.tenor;
        const std::size_t nq = b.quotes.size();
        if (nq < 3)
            throw std::invalid_argument(
                "calibrate: need >= 3 strikes per maturity to identify level, skew and smile");

        // Residuals at candidate parameters for this bucket (earlier pieces fixed).
        const auto residuals = [&](const std::array<double, 3>& p) {
            std::vector<double> sv = sig_v, yv = ys_v, gv = gam_v;
            sv.push_back(std::exp(p[0]));
            yv.push_back(p[1]);
            gv.push_back(std::exp(p[2]));
            std::vector<double> bps(starts.begin(), starts.begin() + static_cast<long>(k + 1));
            ModelParams m(PiecewiseCurve(bps, sv), alpha, PiecewiseCurve(bps, gv),
                          PiecewiseCurve(bps, yv), discount);
            std::vector<double> r(nq);
            for (std::size_t j = 0; j < nq; ++j) {
                const Quote& q = *b.quotes[j];
                InstrumentSpec inst =
                    InstrumentSpec::rfr_caplet(T1, T2, q.strike, b.tenor);
                if (surface.libor) inst.kind = InstrumentSpec::Kind::LiborCaplet;
                r[j] = surface_implied_vol(m, inst, spec) - q.implied_vol;
            }
            return r;
        };
        const auto rms = [](const std::vector<double>& r) {
            double s = 0.0;
            for (double x : r) s += x * x;
            return std::sqrt(s / static_cast<double>(r.size()));
        };

        // Seed sigma from the ATM-most quote's vol level.
        double vol0 = b.quotes[nq / 2]->implied_vol;
        std::array<double, 3> p{std::log(clamp(vol0 > 0 ? vol0 : cfg.sigma_init, cfg.sigma_min,
                                                cfg.sigma_max)),
                                0.0, std::log(cfg.gamma_init)};
        std::vector<double> r = residuals(p);
        double cost = rms(r);
        double lambda = 1e-3;
        BucketFit fit;
        fit.maturity = T2;
        int it = 0;
        bool stationary = false;
        for (; it < cfg.max_iterations && cost > cfg.vol_tolerance; ++it) {
            // Forward-difference Jacobian, nq x 3.
            std::array<std::vector<double>, 3> J;
            std::array<double, 3> h{};
            for (int c = 0; c < 3; ++c) {
                h[c] = 1e-6 * std::max(1.0, std::abs(p[c]));
                auto ph = p;
                ph[c] += h[c];
                const std::vector<double> rh = residuals(ph);
                J[c].resize(nq);
                for (std::size_t j = 0; j < nq; ++j) J[c][j] = (rh[j] - r[j]) / h[c];
            }
            std::array<std::array<double, 3>, 3> jtj{};
            std::array<double, 3> jtr{};
            for (int a = 0; a < 3; ++a) {
                for (int c = 0; c < 3; ++c)
                    for (std::size_t j = 0; j < nq; ++j) jtj[a][c] += J[a][j] * J[c][j];
                for (std::size_t j = 0; j < nq; ++j) jtr[a] += J[a][j] * r[j];
            }
            bool accepted = false;
            double step_norm = 0.0;
            for (int tries = 0; tries < 12; ++tries) {
                auto damped = jtj;
                for (int a = 0; a < 3; ++a)
                    damped[a][a] += lambda * std::max(jtj[a][a], 1e-12);
                std::array<double, 3> step;
                try {
                    step = solve3(damped, {-jtr[0], -jtr[1], -jtr[2]});
                } catch (const std::runtime_error&) {
                    lambda *= 10.0;
                    continue;
                }
                auto pc = p;
                for (int a = 0; a < 3; ++a) pc[a] += step[a];
                pc[0] = clamp(pc[0], std::log(cfg.sigma_min), std::log(cfg.sigma_max));
                pc[1] = clamp(pc[1], -cfg.y_star_max, cfg.y_star_max);
                pc[2] = clamp(pc[2], std::log(cfg.gamma_min), std::log(cfg.gamma_max));
                std::vector<double> rc;
                double cc;
                try {
                    rc = residuals(pc);
                    cc = rms(rc);
                } catch (const std::exception&) {
                    lambda *= 10.0;
                    continue;
                }
                if (cc < cost) {
                    step_norm = 0.0;
                    for (int a = 0; a < 3; ++a)
                        step_norm = std::max(step_norm, std::abs(pc[a] - p[a]));
                    p = pc;
                    r = std::move(rc);
                    cost = cc;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!accepted || step_norm < cfg.step_tolerance) {
                // no descent direction left: a (local) least-squares optimum
                stationary = true;
                ++it;
                break;
            }
        }
        fit.iterations = it;
        fit.sigma = std::exp(p[0]);
        fit.y_star = p[1];
        fit.gamma = std::exp(p[2]);
        fit.residual_norm = cost;
        // Converged means the solver stopped on its own (cost below tolerance
        // or step stall), not that the quotes are exactly attainable: with
        // more strikes than parameters per bucket a nonzero best-fit residual
        // is the expected outcome; residual_norm reports the fit quality.
        fit.converged = stationary || cost <= cfg.vol_tolerance;
        rep.converged = rep.converged && fit.converged;
        rep.buckets.push_back(fit);
        rep.residuals.insert(rep.residuals.end(), r.begin(), r.end());
        sig_v.push_back(fit.sigma);
        ys_v.push_back(fit.y_star);
        gam_v.push_back(fit.gamma);
        ++k;
    }
    std::vector<double> bps(starts.begin(), starts.begin() + static_cast<long>(sig_v.size()));
    rep.sigma = PiecewiseCurve(bps, sig_v);
    rep.y_star = PiecewiseCurve(bps, ys_v);
    rep.gamma = PiecewiseCurve(bps, gam_v);
    return rep;
}

}  // namespace srsmile
