#include "srsmile/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace srsmile {

ToleranceFailure::ToleranceFailure(double prev, double last)
    : std::runtime_error("quadrature failed to converge: " + std::to_string(prev) + " -> " +
                         std::to_string(last)),
      previous_estimate(prev),
      last_estimate(last) {}

namespace {

struct GlRule {
    std::vector<double> nodes, weights;
};

// Newton iteration on Legendre polynomials (standard gauleg construction).
GlRule make_gl(int n) {
    GlRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

const GlRule& gl_rule(int n) {
    static std::map<int, GlRule> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gl(n)).first;
    return it->second;
}

double gl_sum(const std::function<double(double)>& f, const std::vector<double>& edges, int n) {
    const GlRule& rule = gl_rule(n);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        const double half = 0.5 * (edges[k + 1] - edges[k]);
        double piece = 0.0;
        for (int i = 0; i < n; ++i) piece += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += piece * half;
    }
    return total;
}

}  // namespace

const std::vector<double>& gl_nodes(int n) { return gl_rule(n).nodes; }
const std::vector<double>& gl_weights(int n) { return gl_rule(n).weights; }

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> splits, const QuadratureSpec& spec) {
    if (b < a) throw std::domain_error("integrate: b < a");
    if (a == b) return 0.0;
    std::vector<double> edges{a};
    for (double s : splits)
        if (s > a && s < b) edges.push_back(s);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    int n = spec.nodes_per_piece;
    double prev = gl_sum(f, edges, n);
    for (int r = 0; r < spec.max_refinements; ++r) {
        n *= spec.refinement_factor;
        double cur = gl_sum(f, edges, n);
        if (std::abs(cur - prev) <= spec.target_rel_tol * std::max(std::abs(cur), 1e-30))
            return cur;
        prev = cur;
    }
    double last = gl_sum(f, edges, n * spec.refinement_factor);
    if (std::abs(last - prev) <= spec.target_rel_tol * std::max(std::abs(last), 1e-30)) return last;
    throw ToleranceFailure(prev, last);
}

double find_root(const std::function<double(double)>& g, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double fa = g(a), fb = g(b);
    if (std::isnan(fa) || std::isnan(fb)) throw std::runtime_error("find_root: NaN at bracket");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::domain_error("find_root: no sign change in bracket");
    // Brent's method
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double eps = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= eps || fb == 0.0) return b;
        if (std::abs(e) < eps || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;
        } else {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                double u = fa / fc, w = fb / fc;
                p = s * (2.0 * m * u * (u - w) - (b - a) * (w - 1.0));
                q = (u - 1.0) * (w - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(eps * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > eps) ? d : (m > 0.0 ? eps : -eps);
        fb = g(b);
        if (std::isnan(fb)) throw std::runtime_error("find_root: NaN during iteration");
        if (fb * fc > 0.0) { c = a; fc = fa; e = d = b - a; }
    }
    return b;
}

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_cdf_diff_over(double d, double h, double g) {
    const double gh = g * h;
    if (std::abs(gh) < 1e-3) {
        // (Phi(d+gh) - Phi(d-gh)) / (2g) = N(d) (h + (gh)^2 h (d^2-1)/6 + ...)
        const double gh2 = gh * gh;
        const double c2 = d * d - 1.0;
        const double c4 = d * d * d * d - 6.0 * d * d + 3.0;
        return norm_pdf(d) * h * (1.0 + gh2 * c2 / 6.0 + gh2 * gh2 * c4 / 120.0);
    }
    return (norm_cdf(d + gh) - norm_cdf(d - gh)) / (2.0 * g);
}

double sinh_over(double x, double g) {
    const double gx = g * x;
    if (std::abs(gx) < 1e-4) return x * (1.0 + gx * gx / 6.0 * (1.0 + gx * gx / 20.0));
    return std::sinh(gx) / g;
}

double bvn_pdf(double u, double w, const BivariateGaussian& cov) {
    const double det = cov.det();
    if (cov.s_rr < 0.0 || cov.s_zz < 0.0 || det <= 0.0)
        throw std::domain_error("bvn_pdf: degenerate covariance");
    const double q = (cov.s_zz * u * u - 2.0 * cov.s_rz * u * w + cov.s_rr * w * w) / det;
    return std::exp(-0.5 * q) / (2.0 * M_PI * std::sqrt(det));
}

}  // namespace srsmile
