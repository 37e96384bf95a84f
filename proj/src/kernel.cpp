#include "srsmile/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace srsmile {

namespace {

enum CacheKind { kSigmaRz = 0, kSigmaZz = 1, kBStar = 2, kBPlus = 3 };

// int_a^b exp(-2 A (b - u)) du, stable for A -> 0.
double decay_integral(double A, double dt) {
    const double x = 2.0 * A * dt;
    if (x < 1e-12) return dt * (1.0 - 0.5 * x);
    return -std::expm1(-x) / (2.0 * A);
}

// Merged breakpoints of all model curves restricted to (t, v).
std::vector<double> interior_splits(const ModelParams& m, double t, double v) {
    std::vector<double> out;
    for (double b : m.breakpoints())
        if (b > t && b < v) out.push_back(b);
    return out;
}

}  // namespace

double KernelCache::get(int kind, double a, double b, double c,
                        const std::function<double()>& calc) {
    const auto key = std::make_tuple(kind, a, b, c);
    {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = values_.find(key);
        if (it != values_.end()) return it->second;
    }
    const double val = calc();
    std::lock_guard<std::mutex> lock(mtx_);
    values_.emplace(key, val);
    return val;
}

double phi_r(const ModelParams& m, double t, double v) {
    return std::exp(-m.alpha().integral(t, v));
}

double sigma_rr(const ModelParams& m, double t, double v) {
    if (v <= t) return 0.0;
    // Walk the pieces right-to-left, accumulating the alpha decay from the
    // right edge of each piece to v.
    std::vector<double> edges = interior_splits(m, t, v);
    edges.insert(edges.begin(), t);
    edges.push_back(v);
    double total = 0.0;
    double tail = 0.0;  // int_{b_i}^{v} alpha
    for (std::size_t i = edges.size() - 1; i-- > 0;) {
        const double a = edges[i], b = edges[i + 1];
        const double A = m.alpha()(a);
        const double S = m.sigma()(a);
        total += S * S * std::exp(-2.0 * tail) * decay_integral(A, b - a);
        tail += A * (b - a);
    }
    return total;
}

double psi_r(const ModelParams& m, double t, double v) {
    const double g = m.gamma()(v);
    return std::exp(0.5 * g * g * sigma_rr(m, t, v));
}

double sigma_rz(const ModelParams& m, double t, double v, const QuadratureSpec& spec) {
    if (v <= t) return 0.0;
    return m.kernel_cache().get(kSigmaRz, t, v, 0.0, [&] {
        const auto splits = interior_splits(m, t, v);
        return integrate(
            [&](double u) { return psi_r(m, t, u) * phi_r(m, u, v) * sigma_rr(m, t, u); }, t, v,
            splits, spec);
    });
}

double sigma_zz(const ModelParams& m, double t, double v, const QuadratureSpec& spec) {
    if (v <= t) return 0.0;
    return m.kernel_cache().get(kSigmaZz, t, v, 0.0, [&] {
        const auto splits = interior_splits(m, t, v);
        return 2.0 *
               integrate([&](double u) { return psi_r(m, t, u) * sigma_rz(m, t, u, spec); }, t, v,
                         splits, spec);
    });
}

double b_star(const ModelParams& m, double t, double v, const QuadratureSpec& spec) {
    if (v <= t) return 0.0;
    return m.kernel_cache().get(kBStar, t, v, 0.0, [&] {
        const auto splits = interior_splits(m, t, v);
        return integrate([&](double u) { return psi_r(m, t, u) * phi_r(m, t, u); }, t, v, splits,
                         spec);
    });
}

double b_plus(const ModelParams& m, double t, double t1, double v, const QuadratureSpec& spec) {
    if (v <= t1) return 0.0;
    return m.kernel_cache().get(kBPlus, t, t1, v, [&] {
        const auto splits = interior_splits(m, t1, v);
        return integrate([&](double u) { return psi_r(m, t, u) * phi_r(m, t1, u); }, t1, v,
                         splits, spec);
    });
}

KernelStats kernel_stats(const ModelParams& m, double t, double v, const QuadratureSpec& spec) {
    KernelStats ks;
    ks.t = t;
    ks.v = v;
    ks.phi_r = phi_r(m, t, v);
    ks.sigma_rr = sigma_rr(m, t, v);
    ks.psi_r = psi_r(m, t, v);
    ks.sigma_rz = sigma_rz(m, t, v, spec);
    ks.sigma_zz = sigma_zz(m, t, v, spec);
    ks.b_star = b_star(m, t, v, spec);
    ks.sigma_rr_0t = sigma_rr(m, 0.0, t);
    ks.sigma_rz_0t = sigma_rz(m, 0.0, t, spec);
    return ks;
}

double y_star_arg_lin(const ModelParams& m, double t1, double t, const QuadratureSpec& spec) {
    return m.y_star()(t1) - b_plus(m, 0.0, t1, t, spec) * sigma_rr(m, 0.0, t1) -
           sigma_rz(m, 0.0, t1, spec);
}

double y_star_arg(const ModelParams& m, double t1, double t, const QuadratureSpec& spec) {
    return m.gamma()(t1) * y_star_arg_lin(m, t1, t, spec);
}

std::pair<double, double> r1_plus_minus(const ModelParams& m, double y, double t, double t1,
                                        double v, const QuadratureSpec& spec) {
    const double g = m.gamma()(t1);
    if (!(g > 0.0)) throw std::domain_error("r1_plus_minus: gamma must be positive");
    const double arg = phi_r(m, t, t1) * y + m.y_star()(t1) -
                       b_plus(m, t, t1, v, spec) * sigma_rr(m, t, t1) - sigma_rz(m, t, t1, spec);
    const double scale = psi_r(m, t, t1) / (2.0 * g);
    return {scale * std::exp(g * arg), scale * std::exp(-g * arg)};
}

double kernel_g0(const ModelParams& m, double y, double z, double t, double eta, double zeta,
                 double v, const QuadratureSpec& spec) {
    const KernelStats ks = kernel_stats(m, t, v, spec);
    const double a = eta + ks.sigma_rz - ks.phi_r * y;
    const double b = zeta - ks.mu_star(y) + 0.5 * ks.sigma_zz - z;
    return bvn_pdf(a, b, ks.covariance());
}

namespace {

// Bivariate Gaussian density and the first/second partials needed for the
// kernel correction, evaluated via the score function.
struct G0Eval {
    double n, n_a, n_b, n_ab, n_bb;
};

G0Eval g0_partials(double a, double b, const BivariateGaussian& cov, double det, double norm) {
    const double q = (cov.s_zz * a * a - 2.0 * cov.s_rz * a * b + cov.s_rr * b * b) / det;
    const double n = norm * std::exp(-0.5 * q);
    const double la = (cov.s_zz * a - cov.s_rz * b) / det;
    const double lb = (cov.s_rr * b - cov.s_rz * a) / det;
    G0Eval e;
    e.n = n;
    e.n_a = -la * n;
    e.n_b = -lb * n;
    e.n_ab = (la * lb + cov.s_rz / det) * n;
    e.n_bb = (lb * lb - cov.s_rr / det) * n;
    return e;
}

}  // namespace

double kernel_g1_apply(const ModelParams& m, const std::function<double(double, double)>& payoff,
                       double y, double z, double t, double v, const QuadratureSpec& spec,
                       int grid_n) {
    const KernelStats ks = kernel_stats(m, t, v, spec);
    if (ks.sigma_rr < 1e-30 || ks.sigma_zz < 1e-30) return 0.0;
    const BivariateGaussian cov = ks.covariance();
    const double det = cov.det();
    if (det <= 0.0) throw std::domain_error("kernel_g1_apply: degenerate covariance");
    const double norm = 1.0 / (2.0 * std::numbers::pi_v<double> * std::sqrt(det));

    // Tensor Gauss-Legendre grid over (eta, zeta), +-8 sd around the G0 mass.
    const double eta_c = ks.phi_r * y - ks.sigma_rz;
    const double zeta_c = z + ks.mu_star(y) - 0.5 * ks.sigma_zz;
    const double sd_eta = std::sqrt(cov.s_rr), sd_zeta = std::sqrt(cov.s_zz);
    const auto& xs = gl_nodes(grid_n);
    const auto& ws = gl_weights(grid_n);
    std::vector<double> eta(grid_n), zeta(grid_n), weta(grid_n), wzeta(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        eta[i] = eta_c + 8.0 * sd_eta * xs[i];
        weta[i] = 8.0 * sd_eta * ws[i];
        zeta[i] = zeta_c + 8.0 * sd_zeta * xs[i];
        wzeta[i] = 8.0 * sd_zeta * ws[i];
    }
    std::vector<double> pay(static_cast<std::size_t>(grid_n) * grid_n);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j)
            pay[static_cast<std::size_t>(i) * grid_n + j] = payoff(eta[i], zeta[j]);

    // W(y', z') = integral of (d/dz - 1) G0 * payoff; also dW/dy and dW/dz.
    const auto w_eval = [&](double yp, double zp, double* wy, double* wz) {
        const double mu = ks.mu_star(yp);
        double acc = 0.0, acc_y = 0.0, acc_z = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            const double a = eta[i] + ks.sigma_rz - ks.phi_r * yp;
            for (int j = 0; j < grid_n; ++j) {
                const double b = zeta[j] - mu + 0.5 * ks.sigma_zz - zp;
                const G0Eval e = g0_partials(a, b, cov, det, norm);
                const double wgt = weta[i] * wzeta[j] * pay[static_cast<std::size_t>(i) * grid_n + j];
                const double h = -e.n_b - e.n;  // (d/dz - 1) G0
                acc += h * wgt;
                if (wy) {
                    const double h_a = -e.n_ab - e.n_a;
                    const double h_b = -e.n_bb - e.n_b;
                    acc_y += (-ks.phi_r * h_a - ks.b_star * h_b) * wgt;
                    acc_z += -h_b * wgt;
                }
            }
        }
        if (wy) *wy = acc_y;
        if (wz) *wz = acc_z;
        return acc;
    };

    double wy0 = 0.0, wz0 = 0.0;
    const double w0 = w_eval(y, z, &wy0, &wz0);

    // First-order generator applied under the expectation: exponential-shift
    // pair plus the scalar part, integrated over the intermediate time.
    QuadratureSpec tspec = spec;
    tspec.nodes_per_piece = 12;
    tspec.target_rel_tol = 1e-8;
    tspec.max_refinements = 2;
    const auto splits = interior_splits(m, t, v);
    const double integral = integrate(
        [&](double t1) {
            const double g = m.gamma()(t1);
            const double ph = phi_r(m, t, t1);
            const double srr_t1 = sigma_rr(m, t, t1);
            const double dy = srr_t1 / ph;
            const double dz = sigma_rz(m, t, t1, spec) - b_star(m, t, t1, spec) * srr_t1 / ph;
            const auto [rp, rm] = r1_plus_minus(m, y, t, t1, v, spec);
            const double scalar =
                m.r1_star_cached(t1) -
                psi_r(m, t, t1) *
                    (ph * (y + ks.sigma_rz_0t + b_star(m, t, t1, spec) * ks.sigma_rr_0t) -
                     b_plus(m, t, t1, v, spec) * srr_t1);
            return rp * w_eval(y + g * dy, z + g * dz, nullptr, nullptr) -
                   rm * w_eval(y - g * dy, z - g * dz, nullptr, nullptr) + scalar * w0;
        },
        t, v, splits, tspec);

    const double gradient_term =
        (ks.sigma_rz / ks.phi_r) * (wy0 - ks.b_star * wz0) + ks.sigma_zz * wz0;
    return integral - gradient_term;
}

}  // namespace srsmile
