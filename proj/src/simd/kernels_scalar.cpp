// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include "qbf/simd/kernels.hpp"

namespace qbf::simd::scalar {

std::size_t quantize_uniform(std::span<const double> in, std::span<double> out, const UniformQuantizer& q)
{
    const double inv = 1.0 / q.step;
    const double half = 0.5 * q.levels;
    const double top = q.levels - 1.0;
    const double center = 0.5 * (q.levels - 1.0);
    const double scale = q.gain * q.step;
    std::size_t nans = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double a = in[i];
        if (std::isnan(a)) ++nans;
        double idx = std::ceil(a * inv + half) - 1.0;
        idx = std::min(std::max(idx, 0.0), top);
        // The reciprocal can land one bin off next to a threshold.
        if (idx > 0.0 && a <= (idx - half) * q.step) idx -= 1.0;
        if (idx < top && a > (idx + 1.0 - half) * q.step) idx += 1.0;
        out[i] = (idx - center) * scale;
    }
    return nans;
}

double gaussian_pair_sum(std::span<const double> t, std::span<const double> w, std::span<const double> u,
                         double s, double c2)
{
    const double k = -0.5 / c2;
    double total = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        double inner = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = t[j] - s * t[i];
            inner += u[i] * std::exp(k * d * d);
        }
        total += w[j] * inner;
    }
    return total;
}

void hermite_projections(std::span<const double> t, std::span<const double> w, std::span<double> out)
{
    const std::size_t n = t.size();
    std::vector<double> prev(n, 0.0), cur(n, 1.0);
    for (std::size_t m = 0; m < out.size(); ++m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += w[i] * cur[i];
        out[m] = acc;
        // h_{m+1} = (x h_m - sqrt(m) h_{m-1}) / sqrt(m+1)
        const double a = 1.0 / std::sqrt(static_cast<double>(m + 1));
        const double b = std::sqrt(static_cast<double>(m));
        for (std::size_t i = 0; i < n; ++i) {
            const double next = (t[i] * cur[i] - b * prev[i]) * a;
            prev[i] = cur[i];
            cur[i] = next;
        }
    }
}

}  // namespace qbf::simd::scalar
