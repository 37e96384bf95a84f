#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srsmile/pricing.hpp"

namespace srsmile {

struct McConfig {
    long paths = 1'000'000;       // total paths (antithetic pairs count as 2)
    int steps_per_year = 365;
    std::uint64_t seed = 42;
};

struct McEstimate {
    double pv = 0.0;
    double se = 0.0;  // standard error of the mean (over antithetic pairs)
};

// Simulated states (y, z) at the requested checkpoint times, path-major.
struct PathEnsemble {
    std::vector<double> checkpoints;
    long paths = 0;
    std::vector<double> y;  // y[p * checkpoints.size() + c]
    std::vector<double> z;

    std::size_t checkpoint_index(double t) const;
    double y_at(long path, std::size_t c) const { return y[path * checkpoints.size() + c]; }
    double z_at(long path, std::size_t c) const { return z[path * checkpoints.size() + c]; }
};

// Exact-transition simulation of (y, z): y steps by its closed-form OU
// transition, z by trapezoidal accumulation of r - rbar on the merged grid
// of uniform steps, curve breakpoints and checkpoints. Requires installed
// drift. The parallel and serial drivers produce bit-identical output.
PathEnsemble simulate_paths(const ModelParams& m, std::span<const double> checkpoint_times,
                            const McConfig& cfg);
PathEnsemble simulate_paths_serial(const ModelParams& m, std::span<const double> checkpoint_times,
                                   const McConfig& cfg);

// Discounted-payoff estimate over a pre-simulated ensemble.
McEstimate mc_price_on(const ModelParams& m, const InstrumentSpec& inst, const PathEnsemble& ens,
                       const QuadratureSpec& spec = {});

// Per-antithetic-pair discounted payoffs (pair-averaged), in path order.
// Lets callers form correlated differences across models simulated with the
// same seed before reducing with mc_estimate.
std::vector<double> mc_pair_values(const ModelParams& m, const InstrumentSpec& inst,
                                   const PathEnsemble& ens, const QuadratureSpec& spec = {});

// E[exp(-int_0^t r)] over the ensemble; checkpoint at t must exist.
McEstimate mc_discount_factor(const ModelParams& m, double t, const PathEnsemble& ens);

// Convenience: simulate and price in one call.
McEstimate mc_price(const ModelParams& m, const InstrumentSpec& inst, const McConfig& cfg,
                    const QuadratureSpec& spec = {});

// Mean and standard error with a fixed pairwise summation order (independent
// of threading), averaging antithetic partners first.
McEstimate mc_estimate(std::span<const double> pair_values);

}  // namespace srsmile
