// SPDX-License-Identifier: Apache-2.0
// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "qbf/simd/kernels.hpp"

namespace qbf::simd::avx2 {

namespace {

double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x <= 0. Inputs below -700 return 0.
__m256d exp_nonpositive(__m256d x)
{
    const __m256d floor_x = _mm256_set1_pd(-700.0);
    const __m256d underflow = _mm256_cmp_pd(x, floor_x, _CMP_LT_OQ);
    x = _mm256_max_pd(x, floor_x);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // Taylor series to degree 13 on |r| <= ln2/2; truncation error < 1e-17.
    static constexpr double c[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                   1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                   1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                   1.0 / 24.0,         1.0 / 6.0,         0.5,
                                   1.0,                1.0};
    __m256d p = _mm256_set1_pd(c[0]);
    for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i e = _mm256_cvtepi32_epi64(n32);
    e = _mm256_add_epi64(e, _mm256_set1_epi64x(1023));
    e = _mm256_slli_epi64(e, 52);
    const __m256d scale = _mm256_castsi256_pd(e);
    const __m256d y = _mm256_mul_pd(p, scale);
    return _mm256_andnot_pd(underflow, y);
}

}  // namespace

std::size_t quantize_uniform(std::span<const double> in, std::span<double> out, const UniformQuantizer& q)
{
    const double inv_s = 1.0 / q.step;
    const __m256d inv = _mm256_set1_pd(inv_s);
    const __m256d step = _mm256_set1_pd(q.step);
    const __m256d half = _mm256_set1_pd(0.5 * q.levels);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d top = _mm256_set1_pd(q.levels - 1.0);
    const __m256d center = _mm256_set1_pd(0.5 * (q.levels - 1.0));
    const __m256d scale = _mm256_set1_pd(q.gain * q.step);

    std::size_t nans = 0;
    std::size_t i = 0;
    const std::size_t n = in.size();
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(in.data() + i);
        nans += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(
            _mm256_movemask_pd(_mm256_cmp_pd(a, a, _CMP_UNORD_Q)))));
        __m256d v = _mm256_add_pd(_mm256_mul_pd(a, inv), half);
        v = _mm256_sub_pd(_mm256_round_pd(v, _MM_FROUND_TO_POS_INF | _MM_FROUND_NO_EXC), one);
        v = _mm256_min_pd(_mm256_max_pd(v, zero), top);
        const __m256d lo = _mm256_mul_pd(_mm256_sub_pd(v, half), step);
        const __m256d down = _mm256_and_pd(_mm256_cmp_pd(v, zero, _CMP_GT_OQ), _mm256_cmp_pd(a, lo, _CMP_LE_OQ));
        v = _mm256_sub_pd(v, _mm256_and_pd(down, one));
        const __m256d hi = _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(v, one), half), step);
        const __m256d up = _mm256_and_pd(_mm256_cmp_pd(v, top, _CMP_LT_OQ), _mm256_cmp_pd(a, hi, _CMP_GT_OQ));
        v = _mm256_add_pd(v, _mm256_and_pd(up, one));
        _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_sub_pd(v, center), scale));
    }
    if (i < n) nans += scalar::quantize_uniform(in.subspan(i), out.subspan(i), q);
    return nans;
}

double gaussian_pair_sum(std::span<const double> t, std::span<const double> w, std::span<const double> u,
                         double s, double c2)
{
    const std::size_t n = t.size();
    const double k_s = -0.5 / c2;
    const __m256d k = _mm256_set1_pd(k_s);
    const __m256d sv = _mm256_set1_pd(s);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const __m256d tj = _mm256_set1_pd(t[j]);
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d ti = _mm256_loadu_pd(t.data() + i);
            const __m256d d = _mm256_fnmadd_pd(sv, ti, tj);
            const __m256d e = exp_nonpositive(_mm256_mul_pd(k, _mm256_mul_pd(d, d)));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(u.data() + i), e, acc);
        }
        double inner = hsum(acc);
        for (; i < n; ++i) {
            const double d = t[j] - s * t[i];
            inner += u[i] * std::exp(k_s * d * d);
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
        const double a_s = 1.0 / std::sqrt(static_cast<double>(m + 1));
        const double b_s = std::sqrt(static_cast<double>(m));
        const __m256d a = _mm256_set1_pd(a_s);
        const __m256d b = _mm256_set1_pd(b_s);
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d c = _mm256_loadu_pd(cur.data() + i);
            const __m256d p = _mm256_loadu_pd(prev.data() + i);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), c, acc);
            const __m256d x = _mm256_loadu_pd(t.data() + i);
            const __m256d next = _mm256_mul_pd(_mm256_fmsub_pd(x, c, _mm256_mul_pd(b, p)), a);
            _mm256_storeu_pd(prev.data() + i, c);
            _mm256_storeu_pd(cur.data() + i, next);
        }
        double sum = hsum(acc);
        for (; i < n; ++i) {
            sum += w[i] * cur[i];
            const double next = (t[i] * cur[i] - b_s * prev[i]) * a_s;
            prev[i] = cur[i];
            cur[i] = next;
        }
        out[m] = sum;
    }
}

}  // namespace qbf::simd::avx2
