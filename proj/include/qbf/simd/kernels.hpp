// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops behind the quantizer and the output-correlation
// tables. Every kernel has a scalar reference in qbf::simd::scalar and,
// on x86-64, an AVX2 variant in qbf::simd::avx2. The free functions in
// qbf::simd dispatch on the level chosen at startup.

#include <span>
#include <string_view>

namespace qbf::simd {

enum class Level { Scalar, Avx2 };

/// Highest level supported by this CPU and build.
Level detect_level();
/// Level used by the dispatching entry points. Defaults to detect_level(),
/// overridable with QBF_SIMD=scalar|avx2 in the environment.
Level active_level();
/// Throws qbf::InvalidArgument if the level is not supported here.
void set_active_level(Level level);
bool level_supported(Level level);
std::string_view level_name(Level level);

/// Mid-rise uniform quantizer with `levels` output levels, right-closed bins.
/// out[i] = gain * step * (clamp(ceil(in[i]/step + levels/2) - 1, 0, levels-1) - (levels-1)/2)
struct UniformQuantizer {
    double step;
    double levels;
    double gain = 1.0;
};

/// Returns the number of NaN inputs (their outputs are unspecified).
std::size_t quantize_uniform(std::span<const double> in, std::span<double> out, const UniformQuantizer& q);

/// sum_j sum_k w_j u_k exp(-(t_j - s t_k)^2 / (2 c2)), with u_k = w_k exp(-t_k^2 / 2).
/// This is the threshold-pair sum behind the correlation derivative; c2 > 0.
double gaussian_pair_sum(std::span<const double> t, std::span<const double> w, std::span<const double> u,
                         double s, double c2);

/// out[n] = sum_k w_k h_n(t_k), n = 0..out.size()-1, with h_n the orthonormal
/// probabilists' Hermite functions (h_0 = 1, h_1 = x).
void hermite_projections(std::span<const double> t, std::span<const double> w, std::span<double> out);

namespace scalar {
std::size_t quantize_uniform(std::span<const double> in, std::span<double> out, const UniformQuantizer& q);
double gaussian_pair_sum(std::span<const double> t, std::span<const double> w, std::span<const double> u,
                         double s, double c2);
void hermite_projections(std::span<const double> t, std::span<const double> w, std::span<double> out);
}  // namespace scalar

#if defined(QBF_HAVE_AVX2)
namespace avx2 {
std::size_t quantize_uniform(std::span<const double> in, std::span<double> out, const UniformQuantizer& q);
double gaussian_pair_sum(std::span<const double> t, std::span<const double> w, std::span<const double> u,
                         double s, double c2);
void hermite_projections(std::span<const double> t, std::span<const double> w, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace qbf::simd
