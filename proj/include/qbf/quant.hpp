// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace qbf::quant {

/// Uniform mid-rise quantizer designed for a unit-variance Gaussian input.
/// bits == 0 is the unquantized sentinel: Q(a) = a, rho = 0.
struct QuantizerSpec {
    int bits = 0;
    double step = 0.0;
    std::vector<double> levels;     // 2^b, increasing, odd-symmetric
    std::vector<double> thresholds; // 2^b + 1, first -inf, last +inf
    double rho = 0.0;

    bool unquantized() const { return bits == 0; }
    std::size_t num_levels() const { return levels.size(); }
};

/// Builds the level/threshold tables for a given step and computes rho.
QuantizerSpec make_quantizer(int bits, double step);

/// Step minimizing E[(a - Q(a))^2] for unit Gaussian a (golden section, 1e-8).
QuantizerSpec optimize_step(int bits);

QuantizerSpec unquantized();

/// Q(a) by threshold search. Throws InvalidArgument on NaN.
double quantize(const QuantizerSpec& spec, double a);

/// out[i] = gain * Q(in[i] / input_scale). Uses the dispatched SIMD kernel.
/// Throws InvalidArgument if any input is NaN.
void quantize_batch(const QuantizerSpec& spec, std::span<const double> in, std::span<double> out,
                    double input_scale = 1.0, double gain = 1.0);

/// E[a Q(s a)] and E[Q(s a)^2] for unit Gaussian a, in closed form.
struct Moments {
    double cross;
    double power;
};
Moments moments(const QuantizerSpec& spec, double input_std_ratio);

/// E[(x - Q(x))^2] / E[x^2] for x ~ N(0, s^2).
double distortion(const QuantizerSpec& spec, double input_std_ratio);

/// E[Q(s u) Q(s v)] for unit Gaussians u, v with correlation c.
double g_function(const QuantizerSpec& spec, double c, double input_std_ratio = 1.0);

/// g_function(c) / g_function(1): the correlation coefficient of the outputs.
double output_correlation(const QuantizerSpec& spec, double c, double input_std_ratio = 1.0);

/// AGC error model: the input variance is (1 - epsilon) times the design variance,
/// and the output is rescaled by zeta = E[x Q(x)] / E[Q(x)^2] at that variance.
struct AgcState {
    double epsilon = 0.0;
    double ratio = 1.0; // sqrt(1 - epsilon)
    double zeta = 1.0;
};
AgcState agc_zeta(const QuantizerSpec& spec, double epsilon);

/// Quantizer as seen in the normalized frame: unit-variance input a,
/// output kappa * Q(ratio * a) with kappa = zeta / ratio. Satisfies
/// E[a Qt] = E[Qt^2] = 1 - rho_eff.
struct OperatingPoint {
    double ratio = 1.0;
    double kappa = 1.0;
    double rho_eff = 0.0;

    double output_power() const { return 1.0 - rho_eff; }
};
OperatingPoint operating_point(const QuantizerSpec& spec, const AgcState& agc);

/// Direct evaluation of E[Qt(u) Qt(v)] at an operating point.
/// Hermite series for |c| <= 0.9, integral of the correlation derivative above that.
class GEvaluator {
public:
    GEvaluator(const QuantizerSpec& spec, const OperatingPoint& op);

    double operator()(double c) const;
    /// d/dc of the value.
    double derivative(double c) const;
    double at_one() const { return power_; }
    bool unquantized() const { return unquantized_; }

    /// Value and d/dtheta at c = sin(theta), theta >= 0, for theta on a
    /// sorted grid. Integrates the derivative piecewise between grid points.
    void sweep(std::span<const double> theta, std::span<double> value, std::span<double> dtheta) const;
    /// Estimated absolute error of sweep()/operator().
    double error_estimate() const { return error_; }

private:
    double series(double c) const;
    double series_derivative(double c) const;
    double dtheta_integral(double theta) const;
    double integrate(double theta0, double theta1) const;
    bool use_integral() const { return !t_.empty() && t_.size() <= kMaxPairThresholds; }

    static constexpr std::size_t kMaxPairThresholds = 511;
    static constexpr double kSeriesLimit = 0.9;

    bool unquantized_ = false;
    double power_ = 1.0;
    std::vector<double> t_; // thresholds in input units
    std::vector<double> w_; // jump sizes
    std::vector<double> u_; // w * exp(-t^2/2)
    std::vector<double> coef2_; // squared Hermite coefficients, index n
    double theta_split_ = 0.0;
    double value_split_ = 0.0;
    double error_ = 0.0;
};

/// Cubic-Hermite table of g on 2001 points uniform in theta = asin(c).
class GTable {
public:
    static constexpr std::size_t kPoints = 2001;

    GTable(const QuantizerSpec& spec, const OperatingPoint& op);

    double operator()(double c) const;
    double at_one() const { return power_; }
    double error_estimate() const { return error_; }
    bool unquantized() const { return unquantized_; }

private:
    bool unquantized_ = false;
    double power_ = 1.0;
    double error_ = 0.0;
    double h_ = 0.0;
    std::vector<double> value_; // theta_i = -pi/2 + i h
    std::vector<double> dtheta_;
};

/// Shared table for (spec, operating point); built once per process and reused.
std::shared_ptr<const GTable> cached_table(const QuantizerSpec& spec, const OperatingPoint& op);

} // namespace qbf::quant
