// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "qbf/quant.hpp"
#include "qbf/simd/kernels.hpp"
#include "qbf/types.hpp"

namespace qbf::quant {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kHalfPi = 0.5 * kPi;
// Longest sub-interval of the derivative integral.
constexpr double kMaxPanel = kPi / 2000.0;
constexpr std::size_t kSeriesTermsPaired = 400;
constexpr std::size_t kSeriesTermsOnly = 4000;

// 5-point Gauss-Legendre on [-1, 1].
constexpr double kGlNode[5] = {-0.90617984593866399280, -0.53846931010568309104, 0.0,
                               0.53846931010568309104, 0.90617984593866399280};
constexpr double kGlWeight[5] = {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
                                 0.47862867049936646804, 0.23692688505618908751};

double check_correlation(double c)
{
    if (!(std::abs(c) <= 1.0 + 1e-12)) throw InvalidArgument("correlation outside [-1, 1]");
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace

GEvaluator::GEvaluator(const QuantizerSpec& spec, const OperatingPoint& op)
{
    if (spec.unquantized()) {
        unquantized_ = true;
        power_ = 1.0;
        return;
    }
    const Moments m = moments(spec, op.ratio);
    power_ = op.kappa * op.kappa * m.power;
    const double jump = op.kappa * spec.step;
    for (std::size_t k = 1; k + 1 < spec.thresholds.size(); ++k) {
        const double t = spec.thresholds[k] / op.ratio;
        if (std::abs(t) > 38.0) continue;
        t_.push_back(t);
        w_.push_back(jump);
        u_.push_back(jump * std::exp(-0.5 * t * t));
    }

    const std::size_t terms = use_integral() ? kSeriesTermsPaired : kSeriesTermsOnly;
    std::vector<double> weighted(t_.size());
    for (std::size_t k = 0; k < t_.size(); ++k) weighted[k] = u_[k] * kInvSqrt2Pi;
    std::vector<double> proj(terms);
    simd::hermite_projections(t_, weighted, proj);
    coef2_.assign(terms + 1, 0.0);
    double captured = 0.0;
    for (std::size_t n = 1; n <= terms; ++n) {
        const double b = proj[n - 1] / std::sqrt(static_cast<double>(n));
        coef2_[n] = b * b;
        captured += coef2_[n];
    }
    const double remainder = std::max(power_ - captured, 0.0);
    if (use_integral()) {
        theta_split_ = std::asin(kSeriesLimit);
        value_split_ = series(kSeriesLimit);
        error_ = std::pow(kSeriesLimit, static_cast<double>(terms + 1)) * remainder;
    } else {
        error_ = remainder;
    }
}

double GEvaluator::series(double c) const
{
    double acc = 0.0;
    for (std::size_t n = coef2_.size(); n-- > 1;) acc = (acc + coef2_[n]) * c;
    return acc;
}

double GEvaluator::series_derivative(double c) const
{
    double acc = 0.0;
    for (std::size_t n = coef2_.size(); n-- > 1;) acc = acc * c + static_cast<double>(n) * coef2_[n];
    return acc;
}

double GEvaluator::dtheta_integral(double theta) const
{
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double c2 = c * c;
    if (c2 < 1e-300) {
        double acc = 0.0;
        for (std::size_t k = 0; k < t_.size(); ++k) acc += w_[k] * u_[k];
        return acc / kTwoPi;
    }
    return simd::gaussian_pair_sum(t_, w_, u_, s, c2) / kTwoPi;
}

double GEvaluator::integrate(double theta0, double theta1) const
{
    if (theta1 <= theta0) return 0.0;
    const auto panels = static_cast<std::size_t>(std::ceil((theta1 - theta0) / kMaxPanel));
    const double h = (theta1 - theta0) / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = theta0 + (static_cast<double>(p) + 0.5) * h;
        double part = 0.0;
        for (int i = 0; i < 5; ++i) part += kGlWeight[i] * dtheta_integral(mid + 0.5 * h * kGlNode[i]);
        acc += 0.5 * h * part;
    }
    return acc;
}

double GEvaluator::operator()(double c) const
{
    c = check_correlation(c);
    if (unquantized_) return c;
    if (c < 0.0) return -(*this)(-c);
    if (c == 1.0) return power_;
    if (!use_integral() || c <= kSeriesLimit) return series(c);
    return value_split_ + integrate(theta_split_, std::asin(c));
}

double GEvaluator::derivative(double c) const
{
    c = check_correlation(c);
    if (unquantized_) return 1.0;
    c = std::abs(c);
    if (!use_integral() || c <= kSeriesLimit) return series_derivative(c);
    if (c == 1.0) throw NumericalError("correlation derivative is unbounded at c = 1");
    const double theta = std::asin(c);
    return dtheta_integral(theta) / std::cos(theta);
}

void GEvaluator::sweep(std::span<const double> theta, std::span<double> value, std::span<double> dtheta) const
{
    double prev_theta = theta_split_;
    double prev_value = value_split_;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double th = theta[i];
        const double c = std::sin(th);
        if (unquantized_) {
            value[i] = c;
            dtheta[i] = std::cos(th);
        } else if (!use_integral() || th <= theta_split_) {
            value[i] = series(c);
            dtheta[i] = std::cos(th) * series_derivative(c);
        } else {
            prev_value += integrate(prev_theta, th);
            prev_theta = th;
            value[i] = prev_value;
            dtheta[i] = dtheta_integral(th);
        }
    }
}

GTable::GTable(const QuantizerSpec& spec, const OperatingPoint& op)
{
    const GEvaluator g(spec, op);
    unquantized_ = g.unquantized();
    power_ = g.at_one();
    error_ = g.error_estimate();
    const std::size_t mid = (kPoints - 1) / 2;
    h_ = kPi / static_cast<double>(kPoints - 1);
    value_.assign(kPoints, 0.0);
    dtheta_.assign(kPoints, 0.0);

    std::vector<double> theta(mid + 1);
    for (std::size_t i = 0; i <= mid; ++i) theta[i] = static_cast<double>(i) * h_;
    theta[mid] = kHalfPi;
    std::vector<double> v(mid + 1), d(mid + 1);
    g.sweep(theta, v, d);

    // The closed-form output power checks the integrated endpoint.
    error_ = std::max(error_, std::abs(v[mid] - power_));
    v[mid] = power_;
    for (std::size_t i = 0; i <= mid; ++i) {
        value_[mid + i] = v[i];
        dtheta_[mid + i] = d[i];
        value_[mid - i] = -v[i];
        dtheta_[mid - i] = d[i];
    }
}

double GTable::operator()(double c) const
{
    c = check_correlation(c);
    if (unquantized_) return c;
    const double x = (std::asin(c) + kHalfPi) / h_;
    const auto i = std::min(static_cast<std::size_t>(std::max(x, 0.0)), kPoints - 2);
    const double t = x - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * value_[i] + h10 * h_ * dtheta_[i] + h01 * value_[i + 1] + h11 * h_ * dtheta_[i + 1];
}

std::shared_ptr<const GTable> cached_table(const QuantizerSpec& spec, const OperatingPoint& op)
{
    using Key = std::tuple<int, double, double, double>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const GTable>> cache;
    const Key key{spec.bits, spec.step, op.ratio, op.kappa};
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const GTable>(spec, op);
    cache.emplace(key, table);
    return table;
}

}  // namespace qbf::quant
