// SPDX-License-Identifier: Apache-2.0
#include "qbf/quant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbf/simd/kernels.hpp"
#include "qbf/types.hpp"

namespace qbf::quant {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double pdf(double x) { return std::isinf(x) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// P(lo < a <= hi) for unit Gaussian a, computed on the tail that avoids cancellation.
double bin_probability(double lo, double hi)
{
    if (lo >= 0.0) return 0.5 * (std::erfc(lo * kInvSqrt2) - std::erfc(hi * kInvSqrt2));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi * kInvSqrt2) - std::erfc(-lo * kInvSqrt2));
    return 1.0 - 0.5 * std::erfc(-lo * kInvSqrt2) - 0.5 * std::erfc(hi * kInvSqrt2);
}

void check_bits(int bits)
{
    if (bits < 1 || bits > 16) throw InvalidArgument("quantizer bits must be in [1, 16], got " + std::to_string(bits));
}

}  // namespace

QuantizerSpec make_quantizer(int bits, double step)
{
    check_bits(bits);
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("quantizer step must be positive");
    QuantizerSpec q;
    q.bits = bits;
    q.step = step;
    const std::size_t n = std::size_t{1} << bits;
    const double center = 0.5 * static_cast<double>(n - 1);
    q.levels.resize(n);
    q.thresholds.resize(n + 1);
    for (std::size_t j = 0; j < n; ++j) q.levels[j] = (static_cast<double>(j) - center) * step;
    q.thresholds.front() = -std::numeric_limits<double>::infinity();
    q.thresholds.back() = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < n; ++j) q.thresholds[j] = (static_cast<double>(j) - 0.5 * static_cast<double>(n)) * step;
    const Moments m = moments(q, 1.0);
    q.rho = 1.0 - 2.0 * m.cross + m.power;
    return q;
}

QuantizerSpec optimize_step(int bits)
{
    check_bits(bits);
    auto rho = [bits](double log_step) { return make_quantizer(bits, std::exp(log_step)).rho; };
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log(1e-6);
    double b = std::log(4.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = rho(x1);
    double f2 = rho(x2);
    while (b - a > 1e-8) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = rho(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = rho(x2);
        }
    }
    return make_quantizer(bits, std::exp(0.5 * (a + b)));
}

QuantizerSpec unquantized() { return QuantizerSpec{}; }

double quantize(const QuantizerSpec& spec, double a)
{
    if (std::isnan(a)) throw InvalidArgument("quantize: NaN input");
    if (spec.unquantized()) return a;
    const auto first = spec.thresholds.begin() + 1;
    const auto last = spec.thresholds.end() - 1;
    const auto idx = std::lower_bound(first, last, a) - first;
    return spec.levels[static_cast<std::size_t>(idx)];
}

void quantize_batch(const QuantizerSpec& spec, std::span<const double> in, std::span<double> out,
                    double input_scale, double gain)
{
    if (out.size() < in.size()) throw InvalidArgument("quantize_batch: output shorter than input");
    if (!(input_scale > 0.0)) throw InvalidArgument("quantize_batch: input scale must be positive");
    if (spec.unquantized()) {
        std::size_t nans = 0;
        for (std::size_t i = 0; i < in.size(); ++i) {
            nans += std::isnan(in[i]) ? 1 : 0;
            out[i] = gain * (in[i] / input_scale);
        }
        if (nans) throw InvalidArgument("quantize_batch: NaN input");
        return;
    }
    const simd::UniformQuantizer q{spec.step * input_scale, static_cast<double>(spec.num_levels()),
                                   gain / input_scale};
    if (simd::quantize_uniform(in, out.first(in.size()), q) != 0)
        throw InvalidArgument("quantize_batch: NaN input");
}

Moments moments(const QuantizerSpec& spec, double s)
{
    if (!(s > 0.0)) throw InvalidArgument("input std ratio must be positive");
    if (spec.unquantized()) return {s, s * s};
    double cross = 0.0;
    double power = 0.0;
    for (std::size_t j = 0; j < spec.num_levels(); ++j) {
        const double lo = spec.thresholds[j] / s;
        const double hi = spec.thresholds[j + 1] / s;
        const double q = spec.levels[j];
        cross += q * (pdf(lo) - pdf(hi));
        power += q * q * bin_probability(lo, hi);
    }
    return {cross, power};
}

double distortion(const QuantizerSpec& spec, double s)
{
    const Moments m = moments(spec, s);
    return (s * s - 2.0 * s * m.cross + m.power) / (s * s);
}

AgcState agc_zeta(const QuantizerSpec& spec, double epsilon)
{
    if (!(epsilon < 1.0)) throw InvalidArgument("AGC error must be < 1");
    AgcState st;
    st.epsilon = epsilon;
    st.ratio = std::sqrt(1.0 - epsilon);
    const Moments m = moments(spec, st.ratio);
    st.zeta = st.ratio * m.cross / m.power;
    return st;
}

OperatingPoint operating_point(const QuantizerSpec& spec, const AgcState& agc)
{
    const Moments m = moments(spec, agc.ratio);
    OperatingPoint op;
    op.ratio = agc.ratio;
    op.kappa = m.cross / m.power;
    op.rho_eff = spec.unquantized() ? 0.0 : 1.0 - m.cross * m.cross / m.power;
    return op;
}

double g_function(const QuantizerSpec& spec, double c, double s)
{
    OperatingPoint op;
    op.ratio = s;
    op.kappa = spec.unquantized() ? 1.0 / s : 1.0;
    return GEvaluator(spec, op)(c);
}

double output_correlation(const QuantizerSpec& spec, double c, double s)
{
    OperatingPoint op;
    op.ratio = s;
    op.kappa = spec.unquantized() ? 1.0 / s : 1.0;
    const GEvaluator g(spec, op);
    return g(c) / g.at_one();
}

}  // namespace qbf::quant
