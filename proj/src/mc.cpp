#include "srsmile/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>

namespace srsmile {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    // (0, 1]: guards the log in Box-Muller
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

double normal_draw(std::uint64_t& state) {
    const double u1 = uniform01(state);
    const double u2 = uniform01(state);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi_v<double> * u2);
}

// Per-step constants of the exact-transition scheme, fixed across paths.
struct StepPlan {
    std::vector<double> nodes;
    std::vector<double> dt, decay, svol;   // per step
    std::vector<double> gam, yst;          // segment smile params (left-owned)
    std::vector<double> rs_l, rs_r;        // drift R* at step ends
    std::vector<int> checkpoint_at;        // checkpoint index at node, -1 if none
    std::size_t n_checkpoints = 0;
};

StepPlan build_plan(const ModelParams& m, std::span<const double> checkpoints,
                    const McConfig& cfg) {
    if (checkpoints.empty()) throw std::invalid_argument("simulate_paths: no checkpoints");
    const double horizon = *std::max_element(checkpoints.begin(), checkpoints.end());
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_paths: horizon must be > 0");
    std::set<double> grid{0.0, horizon};
    for (double c : checkpoints) {
        if (c < 0.0 || c > horizon) throw std::invalid_argument("simulate_paths: bad checkpoint");
        grid.insert(c);
    }
    for (double b : m.breakpoints())
        if (b > 0.0 && b < horizon) grid.insert(b);
    const long n_uniform = std::lround(std::ceil(horizon * cfg.steps_per_year));
    for (long k = 1; k < n_uniform; ++k) grid.insert(horizon * k / n_uniform);

    StepPlan plan;
    plan.nodes.assign(grid.begin(), grid.end());
    const std::size_t n = plan.nodes.size();
    plan.checkpoint_at.assign(n, -1);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const auto it = grid.find(checkpoints[c]);
        plan.checkpoint_at[static_cast<std::size_t>(std::distance(grid.begin(), it))] =
            static_cast<int>(c);
    }
    plan.n_checkpoints = checkpoints.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = plan.nodes[k], b = plan.nodes[k + 1];
        plan.dt.push_back(b - a);
        plan.decay.push_back(phi_r(m, a, b));
        plan.svol.push_back(std::sqrt(sigma_rr(m, a, b)));
        plan.gam.push_back(m.gamma()(a));
        plan.yst.push_back(m.y_star()(a));
        plan.rs_l.push_back(m.r_star_cached(a));
        plan.rs_r.push_back(m.r_star_cached(b));
    }
    return plan;
}

// r - rbar at a step end, with the step's own smile parameters.
double excess_rate(double y, double rs, double gam, double yst) {
    return rs + sinh_over(y + yst, gam);
}

void simulate_pair(const StepPlan& plan, std::uint64_t seed, long pair, double* y_out,
                   double* z_out) {
    // Scramble the stream origin so per-pair counter ranges do not overlap:
    // consecutive raw seeds differ by one golden-ratio increment, which is the
    // same stride splitmix64 itself uses per draw.
    std::uint64_t raw = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(pair + 1);
    std::uint64_t state = splitmix64(raw);
    const std::size_t nc = plan.n_checkpoints;
    double yp = 0.0, zp = 0.0, ym = 0.0, zm = 0.0;
    std::size_t step = 0;
    for (std::size_t k = 0; k < plan.nodes.size(); ++k) {
        if (plan.checkpoint_at[k] >= 0) {
            const std::size_t c = static_cast<std::size_t>(plan.checkpoint_at[k]);
            y_out[c] = yp;
            z_out[c] = zp;
            y_out[nc + c] = ym;
            z_out[nc + c] = zm;
        }
        if (k + 1 == plan.nodes.size()) break;
        const double g = plan.gam[step], ys = plan.yst[step];
        const double xl_p = excess_rate(yp, plan.rs_l[step], g, ys);
        const double xl_m = excess_rate(ym, plan.rs_l[step], g, ys);
        const double n = normal_draw(state);
        yp = yp * plan.decay[step] + plan.svol[step] * n;
        ym = ym * plan.decay[step] - plan.svol[step] * n;
        zp += 0.5 * plan.dt[step] * (xl_p + excess_rate(yp, plan.rs_r[step], g, ys));
        zm += 0.5 * plan.dt[step] * (xl_m + excess_rate(ym, plan.rs_r[step], g, ys));
        ++step;
    }
}

PathEnsemble run_simulation(const ModelParams& m, std::span<const double> checkpoints,
                            const McConfig& cfg, bool parallel) {
    const StepPlan plan = build_plan(m, checkpoints, cfg);
    const long pairs = std::max(1L, cfg.paths / 2);
    PathEnsemble ens;
    ens.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    ens.paths = 2 * pairs;
    const std::size_t nc = checkpoints.size();
    ens.y.resize(static_cast<std::size_t>(ens.paths) * nc);
    ens.z.resize(static_cast<std::size_t>(ens.paths) * nc);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long p = 0; p < pairs; ++p)
            simulate_pair(plan, cfg.seed, p, &ens.y[static_cast<std::size_t>(2 * p) * nc],
                          &ens.z[static_cast<std::size_t>(2 * p) * nc]);
    } else {
        for (long p = 0; p < pairs; ++p)
            simulate_pair(plan, cfg.seed, p, &ens.y[static_cast<std::size_t>(2 * p) * nc],
                          &ens.z[static_cast<std::size_t>(2 * p) * nc]);
    }
    return ens;
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace

std::size_t PathEnsemble::checkpoint_index(double t) const {
    for (std::size_t c = 0; c < checkpoints.size(); ++c)
        if (checkpoints[c] == t) return c;
    throw std::logic_error("PathEnsemble: checkpoint not simulated");
}

PathEnsemble simulate_paths(const ModelParams& m, std::span<const double> checkpoint_times,
                            const McConfig& cfg) {
    return run_simulation(m, checkpoint_times, cfg, true);
}

PathEnsemble simulate_paths_serial(const ModelParams& m, std::span<const double> checkpoint_times,
                                   const McConfig& cfg) {
    return run_simulation(m, checkpoint_times, cfg, false);
}

McEstimate mc_estimate(std::span<const double> pair_values) {
    const std::size_t n = pair_values.size();
    if (n == 0) throw std::invalid_argument("mc_estimate: empty sample");
    const double mean = pairwise_sum(pair_values.data(), n) / static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (pair_values[i] - mean) * (pair_values[i] - mean);
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

namespace {

McEstimate estimate_over_paths(const PathEnsemble& ens,
                               const std::function<double(long)>& path_value) {
    const long pairs = ens.paths / 2;
    std::vector<double> vals(static_cast<std::size_t>(pairs));
    for (long p = 0; p < pairs; ++p)
        vals[static_cast<std::size_t>(p)] = 0.5 * (path_value(2 * p) + path_value(2 * p + 1));
    return mc_estimate(vals);
}

// F(y) sampled on a wide y-grid once, then interpolated per path.
CubicTable tabulate_in_y(double sd, const std::function<double(double)>& f) {
    const int n = 257;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = -10.0 * sd + 20.0 * sd * i / (n - 1);
        ys[i] = f(xs[i]);
    }
    return CubicTable(std::move(xs), std::move(ys));
}

}  // namespace

McEstimate mc_discount_factor(const ModelParams& m, double t, const PathEnsemble& ens) {
    if (t == 0.0) return {1.0, 0.0};
    const std::size_t c = ens.checkpoint_index(t);
    const double d = m.discount().discount(t);
    return estimate_over_paths(ens,
                               [&](long p) { return d * std::exp(-ens.z_at(p, c)); });
}

namespace {

// Discounted payoff of one path; captures everything it needs by value so the
// closure can outlive this scope.
std::function<double(long)> path_payoff(const ModelParams& m, const InstrumentSpec& inst,
                                        const PathEnsemble& ens, const QuadratureSpec& spec) {
    inst.validate();
    const auto& D = m.discount();
    switch (inst.kind) {
        case InstrumentSpec::Kind::RfrCaplet: {
            const std::size_t c1 = ens.checkpoint_index(inst.times[0]);
            const std::size_t c2 = ens.checkpoint_index(inst.times[1]);
            const double d2 = D.discount(inst.times[1]);
            const double d12 = D.discount(inst.times[0], inst.times[1]);
            const double kinv = 1.0 / inst.kappa();
            return [&ens, c1, c2, d2, d12, kinv](long p) {
                const double dz = ens.z_at(p, c2) - ens.z_at(p, c1);
                return d2 * std::exp(-ens.z_at(p, c2)) *
                       std::max(std::exp(dz) / d12 - kinv, 0.0);
            };
        }
        case InstrumentSpec::Kind::LiborCaplet: {
            const std::size_t c1 = ens.checkpoint_index(inst.times[0]);
            const double d1 = D.discount(inst.times[0]);
            const double kinv = 1.0 / inst.kappa();
            const double sd = std::sqrt(sigma_rr(m, 0.0, inst.times[0]));
            auto bond = std::make_shared<CubicTable>(tabulate_in_y(sd, [&](double y) {
                return zcb_price(m, y, inst.times[0], inst.times[1], spec, true);
            }));
            return [&ens, c1, d1, kinv, bond](long p) {
                return d1 * std::exp(-ens.z_at(p, c1)) *
                       std::max(1.0 - kinv * (*bond)(ens.y_at(p, c1)), 0.0);
            };
        }
        case InstrumentSpec::Kind::PayerSwaption: {
            const double T0 = inst.times[0];
            const std::size_t c0 = ens.checkpoint_index(T0);
            const double d0 = D.discount(T0);
            const double sd = std::sqrt(sigma_rr(m, 0.0, T0));
            const double K = inst.strike;
            auto swap = std::make_shared<CubicTable>(tabulate_in_y(sd, [&](double y) {
                double v = 1.0 - zcb_price(m, y, T0, inst.times.back(), spec, true);
                for (std::size_t i = 1; i < inst.times.size(); ++i)
                    v -= K * inst.accruals[i - 1] *
                         zcb_price(m, y, T0, inst.times[i], spec, true);
                return v;
            }));
            return [&ens, c0, d0, swap](long p) {
                return d0 * std::exp(-ens.z_at(p, c0)) * std::max((*swap)(ens.y_at(p, c0)), 0.0);
            };
        }
    }
    throw std::logic_error("path_payoff: unknown kind");
}

}  // namespace

McEstimate mc_price_on(const ModelParams& m, const InstrumentSpec& inst, const PathEnsemble& ens,
                       const QuadratureSpec& spec) {
    return estimate_over_paths(ens, path_payoff(m, inst, ens, spec));
}

std::vector<double> mc_pair_values(const ModelParams& m, const InstrumentSpec& inst,
                                   const PathEnsemble& ens, const QuadratureSpec& spec) {
    const auto f = path_payoff(m, inst, ens, spec);
    const long pairs = ens.paths / 2;
    std::vector<double> vals(static_cast<std::size_t>(pairs));
    for (long p = 0; p < pairs; ++p)
        vals[static_cast<std::size_t>(p)] = 0.5 * (f(2 * p) + f(2 * p + 1));
    return vals;
}

McEstimate mc_price(const ModelParams& m, const InstrumentSpec& inst, const McConfig& cfg,
                    const QuadratureSpec& spec) {
    std::vector<double> cps;
    if (inst.kind == InstrumentSpec::Kind::PayerSwaption)
        cps = {inst.times[0]};
    else
        cps = {inst.times[0], inst.times[1]};
    const PathEnsemble ens = simulate_paths(m, cps, cfg);
    return mc_price_on(m, inst, ens, spec);
}

}  // namespace srsmile
