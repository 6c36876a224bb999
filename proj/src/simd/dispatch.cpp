// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string>

#include "qbf/simd/kernels.hpp"
#include "qbf/types.hpp"

namespace qbf::simd {

namespace {

Level initial_level()
{
    if (const char* env = std::getenv("QBF_SIMD")) {
        const std::string v(env);
        if (v == "scalar") return Level::Scalar;
        if (v == "avx2" && level_supported(Level::Avx2)) return Level::Avx2;
    }
    return detect_level();
}

std::atomic<Level>& current()
{
    static std::atomic<Level> level{initial_level()};
    return level;
}

}  // namespace

bool level_supported(Level level)
{
    switch (level) {
    case Level::Scalar:
        return true;
    case Level::Avx2:
#if defined(QBF_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Level detect_level() { return level_supported(Level::Avx2) ? Level::Avx2 : Level::Scalar; }

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_active_level(Level level)
{
    if (!level_supported(level))
        throw InvalidArgument("simd level " + std::string(level_name(level)) + " not supported on this host");
    current().store(level, std::memory_order_relaxed);
}

std::string_view level_name(Level level)
{
    return level == Level::Avx2 ? "avx2" : "scalar";
}

std::size_t quantize_uniform(std::span<const double> in, std::span<double> out, const UniformQuantizer& q)
{
#if defined(QBF_HAVE_AVX2)
    if (active_level() == Level::Avx2) return avx2::quantize_uniform(in, out, q);
#endif
    return scalar::quantize_uniform(in, out, q);
}

double gaussian_pair_sum(std::span<const double> t, std::span<const double> w, std::span<const double> u,
                         double s, double c2)
{
#if defined(QBF_HAVE_AVX2)
    if (active_level() == Level::Avx2) return avx2::gaussian_pair_sum(t, w, u, s, c2);
#endif
    return scalar::gaussian_pair_sum(t, w, u, s, c2);
}

void hermite_projections(std::span<const double> t, std::span<const double> w, std::span<double> out)
{
#if defined(QBF_HAVE_AVX2)
    if (active_level() == Level::Avx2) return avx2::hermite_projections(t, w, out);
#endif
    scalar::hermite_projections(t, w, out);
}

}  // namespace qbf::simd
