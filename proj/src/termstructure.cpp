#include "srsmile/termstructure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "srsmile/drift.hpp"
#include "srsmile/kernel.hpp"

namespace srsmile {

PiecewiseCurve::PiecewiseCurve(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.empty() || breakpoints_.size() != values_.size())
        throw std::invalid_argument("PiecewiseCurve: breakpoints/values size mismatch");
    if (breakpoints_.front() != 0.0)
        throw std::invalid_argument("PiecewiseCurve: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (breakpoints_[i] <= breakpoints_[i - 1])
            throw std::invalid_argument("PiecewiseCurve: breakpoints must be strictly ascending");
}

PiecewiseCurve PiecewiseCurve::constant(double value) {
    return PiecewiseCurve({0.0}, {value});
}

std::size_t PiecewiseCurve::interval_index(double t) const {
    if (t < 0.0) throw std::domain_error("PiecewiseCurve: negative time");
    // last interval with breakpoint <= t
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewiseCurve::operator()(double t) const {
    return values_[interval_index(t)];
}

double PiecewiseCurve::integral(double a, double b) const {
    if (a < 0.0 || b < a) throw std::domain_error("PiecewiseCurve::integral: bad interval");
    double sum = 0.0;
    std::size_t i = interval_index(a);
    double lo = a;
    while (lo < b) {
        double hi = (i + 1 < breakpoints_.size()) ? std::min(breakpoints_[i + 1], b) : b;
        sum += values_[i] * (hi - lo);
        lo = hi;
        ++i;
    }
    return sum;
}

DiscountCurve::DiscountCurve() : DiscountCurve({0.0, 1.0}, {1.0, 1.0}) {}

DiscountCurve::DiscountCurve(std::vector<double> pillar_times, std::vector<double> pillar_discounts)
    : times_(std::move(pillar_times)) {
    if (times_.size() != pillar_discounts.size() || times_.empty())
        throw std::invalid_argument("DiscountCurve: pillar size mismatch");
    if (times_.front() != 0.0) {
        // implicit D(0,0) = 1 pillar
        times_.insert(times_.begin(), 0.0);
        pillar_discounts.insert(pillar_discounts.begin(), 1.0);
    }
    if (pillar_discounts.front() != 1.0)
        throw std::invalid_argument("DiscountCurve: D(0,0) must be 1");
    log_discounts_.reserve(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (pillar_discounts[i] <= 0.0)
            throw std::invalid_argument("DiscountCurve: discounts must be positive");
        if (i > 0 && times_[i] <= times_[i - 1])
            throw std::invalid_argument("DiscountCurve: pillar times must be ascending");
        log_discounts_.push_back(std::log(pillar_discounts[i]));
    }
    if (times_.size() == 1) {
        times_.push_back(1.0);
        log_discounts_.push_back(log_discounts_.front());
    }
    // segment slopes give the piecewise-constant forward
    std::vector<double> bps, vals;
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
        bps.push_back(times_[i]);
        vals.push_back(-(log_discounts_[i + 1] - log_discounts_[i]) / (times_[i + 1] - times_[i]));
    }
    forward_ = PiecewiseCurve(std::move(bps), std::move(vals));
}

DiscountCurve DiscountCurve::flat_rate(double rate) {
    return DiscountCurve({0.0, 1.0}, {1.0, std::exp(-rate)});
}

double DiscountCurve::log_discount(double t) const {
    // exact under log-linear interpolation: -integral of the forward curve
    return -forward_.integral(0.0, t);
}

double DiscountCurve::discount(double t1, double t2) const {
    if (t1 < 0.0 || t2 < t1) throw std::domain_error("DiscountCurve::discount: need 0 <= t1 <= t2");
    return std::exp(log_discount(t2) - log_discount(t1));
}

double DiscountCurve::instantaneous_forward(double t) const {
    return forward_(t);
}

ModelParams::ModelParams(PiecewiseCurve sigma, PiecewiseCurve alpha, PiecewiseCurve gamma,
                         PiecewiseCurve y_star, DiscountCurve discount)
    : sigma_(std::move(sigma)),
      alpha_(std::move(alpha)),
      gamma_(std::move(gamma)),
      y_star_(std::move(y_star)),
      discount_(std::move(discount)),
      cache_(std::make_unique<KernelCache>()) {
    for (double s : sigma_.values())
        if (s < 0.0) throw std::invalid_argument("ModelParams: sigma must be >= 0");
    for (double a : alpha_.values())
        if (a < 0.0) throw std::invalid_argument("ModelParams: alpha must be >= 0");
    for (double g : gamma_.values())
        if (g <= 0.0) throw std::invalid_argument("ModelParams: gamma must be > 0");
    std::set<double> bps;
    for (const auto* c : {&sigma_, &alpha_, &gamma_, &y_star_})
        bps.insert(c->breakpoints().begin(), c->breakpoints().end());
    bps.insert(discount_.pillar_times().begin(), discount_.pillar_times().end());
    breakpoints_.assign(bps.begin(), bps.end());
}

ModelParams::~ModelParams() = default;
ModelParams::ModelParams(ModelParams&&) noexcept = default;
ModelParams& ModelParams::operator=(ModelParams&&) noexcept = default;

void ModelParams::install_drift(std::unique_ptr<DriftTable> table) {
    drift_ = std::move(table);
}

double ModelParams::r1_star_cached(double t) const {
    if (!drift_) throw std::logic_error("ModelParams: drift not installed");
    return drift_->r1_star(t);
}

double ModelParams::r_star_cached(double t) const {
    if (!drift_) throw std::logic_error("ModelParams: drift not installed");
    return drift_->r_star(t);
}

}  // namespace srsmile
