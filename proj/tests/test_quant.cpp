// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "qbf/quant.hpp"
#include "qbf/types.hpp"

#include "oracles.hpp"

using namespace qbf;
using namespace qbf::quant;

namespace {

struct Sample {
    double mean;
    double stderr_;
};

template <typename F>
Sample sample_mean(std::size_t n, F&& draw)
{
    double s = 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = draw();
        s += v;
        q += v * v;
    }
    const double m = s / static_cast<double>(n);
    return {m, std::sqrt((q / static_cast<double>(n) - m * m) / static_cast<double>(n - 1))};
}

}  // namespace

TEST_CASE("one-bit quantizer closed forms")
{
    const auto q = optimize_step(1);
    REQUIRE(q.levels.size() == 2);
    CHECK(q.step / 2 == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-7));
    CHECK(std::abs(q.rho - (1.0 - 2.0 / kPi)) < 1e-9);
    CHECK(std::abs(distortion(q, 1.0) - (1.0 - 2.0 / kPi)) < 1e-9);
    CHECK(q.thresholds.front() == -std::numeric_limits<double>::infinity());
    CHECK(q.thresholds.back() == std::numeric_limits<double>::infinity());
}

TEST_CASE("distortion decreases with resolution")
{
    double prev = 1.0;
    for (int b = 1; b <= 10; ++b) {
        const auto q = optimize_step(b);
        CHECK(q.rho < prev);
        CHECK(q.rho > 0.0);
        prev = q.rho;
    }
    CHECK(optimize_step(12).rho < 1e-4);
    CHECK_THROWS_AS(optimize_step(0), InvalidArgument);
    CHECK_THROWS_AS(optimize_step(17), InvalidArgument);
}

TEST_CASE("optimized step is a local minimum")
{
    for (int b : {2, 3, 5}) {
        const auto q = optimize_step(b);
        CHECK(make_quantizer(b, q.step * 1.001).rho >= q.rho);
        CHECK(make_quantizer(b, q.step * 0.999).rho >= q.rho);
    }
}

TEST_CASE("level and threshold layout")
{
    for (int b = 1; b <= 6; ++b) {
        const auto q = optimize_step(b);
        const std::size_t n = std::size_t{1} << b;
        REQUIRE(q.levels.size() == n);
        REQUIRE(q.thresholds.size() == n + 1);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(q.levels[j] == doctest::Approx(-q.levels[n - 1 - j]));
            if (j > 0) CHECK(q.levels[j] > q.levels[j - 1]);
        }
        for (std::size_t j = 1; j + 1 < n; ++j)
            CHECK(q.levels[j] == doctest::Approx(0.5 * (q.thresholds[j] + q.thresholds[j + 1])));
        CHECK(q.levels.back() == doctest::Approx(q.thresholds[n - 1] + 0.5 * q.step));
    }
}

TEST_CASE("scalar quantization")
{
    const auto q1 = optimize_step(1);
    CHECK(quantize(q1, 1e-300) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-7));
    CHECK(quantize(q1, 0.0) == q1.levels[0]); // right-closed bins

    const auto q3 = optimize_step(3);
    CHECK(quantize(q3, 1e10) == q3.levels.back());
    CHECK(quantize(q3, -1e10) == q3.levels.front());
    CHECK(quantize(q3, q3.thresholds[5]) == q3.levels[4]);
    CHECK(quantize(q3, std::nextafter(q3.thresholds[5], 10.0)) == q3.levels[5]);
    Rng rng(31);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = n(rng);
        if (a == 0.0) continue;
        CHECK(quantize(q3, -a) == -quantize(q3, a));
    }
    CHECK_THROWS_AS(quantize(q3, std::nan("")), InvalidArgument);
    CHECK(quantize(unquantized(), 0.123) == 0.123);
}

TEST_CASE("batch quantization agrees with scalar")
{
    Rng rng(32);
    std::normal_distribution<double> n(0.0, 1.5);
    for (int b : {1, 2, 4, 8}) {
        const auto q = optimize_step(b);
        std::vector<double> in(1001), out(1001);
        for (auto& v : in) v = n(rng);
        in[0] = q.thresholds[1] * 3.0;
        in[1] = 0.0;
        quantize_batch(q, in, out, 3.0, 0.5);
        for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i] == doctest::Approx(0.5 * quantize(q, in[i] / 3.0)));
        in[7] = std::nan("");
        CHECK_THROWS_AS(quantize_batch(q, in, out), InvalidArgument);
    }
}

TEST_CASE("distortion agrees with direct integration")
{
    for (int b = 1; b <= 10; ++b) {
        const auto q = optimize_step(b);
        CHECK(std::abs(q.rho - oracle::distortion_direct(q)) < 1e-9);
        const Moments m = moments(q, 1.0);
        CHECK(std::abs(distortion(q, 1.0) - (1.0 - 2.0 * m.cross + m.power)) < 1e-12);
    }
}

TEST_CASE("distortion at a tiny input ratio")
{
    const double s = 1e-6;
    for (int b : {1, 2, 3}) {
        const auto q = optimize_step(b);
        Rng rng(33 + b);
        std::normal_distribution<double> n(0.0, s);
        const auto mc = sample_mean(1'000'000, [&] {
            const double x = n(rng);
            const double e = x - quantize(q, x);
            return e * e / (s * s);
        });
        // The output lands on the two innermost levels almost surely.
        CHECK(std::abs(distortion(q, s) - mc.mean) < 3.0 * mc.stderr_ + 1e-9 * mc.mean);
        CHECK(distortion(q, s) > 1e9);
    }
}

TEST_CASE("design point minimizes distortion over AGC error")
{
    const auto q = optimize_step(2);
    const double at = distortion(q, 1.0);
    CHECK(at <= distortion(q, std::sqrt(1.2)));
    CHECK(at <= distortion(q, std::sqrt(0.8)));
    CHECK_THROWS_AS(distortion(q, 0.0), InvalidArgument);
}

TEST_CASE("one-bit arcsine law")
{
    const auto q = optimize_step(1);
    for (int i = -9; i <= 9; ++i) {
        const double c = i / 10.0;
        CHECK(std::abs(output_correlation(q, c) - 2.0 / kPi * std::asin(c)) < 1e-6);
        CHECK(std::abs(g_function(q, c) - 4.0 / (kPi * kPi) * std::asin(c)) < 1e-6);
    }
}

TEST_CASE("correlation function endpoints and symmetry")
{
    for (int b : {1, 2, 3, 5, 8}) {
        const auto q = optimize_step(b);
        for (double s : {1.0, 0.7, 1.4}) {
            CHECK(g_function(q, 0.0, s) == 0.0);
            CHECK(g_function(q, 1.0, s) == doctest::Approx(moments(q, s).power).epsilon(1e-14));
            for (double c : {0.2, 0.85, 0.95, 0.999}) CHECK(g_function(q, -c, s) == -g_function(q, c, s));
        }
    }
    CHECK_THROWS_AS(g_function(optimize_step(2), 1.01), InvalidArgument);
    CHECK(g_function(unquantized(), 0.4) == doctest::Approx(0.4));
}

TEST_CASE("correlation function matches conditional-CDF quadrature")
{
    Rng rng(34);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int b = 1; b <= 8; ++b) {
        const auto q = optimize_step(b);
        // The oracle costs O(levels) CDF pairs per node; fewer probes at high resolution.
        const int probes = b <= 5 ? 12 : 2;
        for (double s : {1.0, std::sqrt(0.6), std::sqrt(1.4)}) {
            OperatingPoint op;
            op.ratio = s;
            const GEvaluator g(q, op);
            for (int i = 0; i < probes; ++i) {
                const double c = u(rng);
                CHECK(std::abs(g(c) - oracle::g_cholesky(q, c, s)) < 1e-8);
            }
            for (double c : {0.99, 0.9999, -0.97}) CHECK(std::abs(g(c) - oracle::g_cholesky(q, c, s)) < 1e-8);
        }
    }
}

TEST_CASE("quadrature oracle is converged")
{
    const auto q = optimize_step(4);
    for (double c : {0.3, 0.9, 0.99})
        CHECK(std::abs(oracle::g_cholesky(q, c, 1.0, 200) - oracle::g_cholesky(q, c, 1.0, 400)) < 1e-10);
}

TEST_CASE("table interpolation matches direct evaluation")
{
    Rng rng(35);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int b = 1; b <= 8; ++b) {
        const auto q = optimize_step(b);
        for (double eps : {0.0, 0.2, -0.4}) {
            const auto op = operating_point(q, agc_zeta(q, eps));
            const GTable table(q, op);
            const GEvaluator direct(q, op);
            CHECK(table.error_estimate() < 1e-9);
            for (int i = 0; i < 100; ++i) {
                const double c = u(rng);
                CHECK(std::abs(table(c) - direct(c)) < 1e-6);
            }
            CHECK(table(1.0) == doctest::Approx(op.output_power()).epsilon(1e-12));
            CHECK(table(-1.0) == doctest::Approx(-op.output_power()).epsilon(1e-12));
            CHECK(table(0.0) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("table cache returns shared instances")
{
    const auto q = optimize_step(3);
    const auto op = operating_point(q, agc_zeta(q, 0.0));
    const auto a = cached_table(q, op);
    const auto b = cached_table(q, op);
    CHECK(a.get() == b.get());
    const auto other = cached_table(q, operating_point(q, agc_zeta(q, 0.1)));
    CHECK(other.get() != a.get());
}

TEST_CASE("correlation function against Monte Carlo")
{
    Rng rng(36);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int b : {1, 2, 4}) {
        const auto q = optimize_step(b);
        for (double c : {-0.6, 0.35, 0.92}) {
            const double root = std::sqrt(1 - c * c);
            const auto mc = sample_mean(1'000'000, [&] {
                const double x = n(rng);
                const double y = c * x + root * n(rng);
                return quantize(q, x) * quantize(q, y);
            });
            CHECK(std::abs(g_function(q, c) - mc.mean) < 3.0 * mc.stderr_);
        }
    }
}

TEST_CASE("AGC rescaling")
{
    const auto q1 = optimize_step(1);
    CHECK(agc_zeta(q1, 0.0).zeta == doctest::Approx(1.0).epsilon(1e-7));
    for (int b = 1; b <= 8; ++b) CHECK(std::abs(agc_zeta(optimize_step(b), 0.0).zeta - 1.0) < 0.05);

    const auto q2 = optimize_step(2);
    CHECK(operating_point(q2, agc_zeta(q2, 0.5)).rho_eff > operating_point(q2, agc_zeta(q2, 0.0)).rho_eff);
    CHECK(agc_zeta(q2, 0.36).ratio == doctest::Approx(0.8));
    CHECK_THROWS_AS(agc_zeta(q2, 1.0), InvalidArgument);
    CHECK_THROWS_AS(agc_zeta(q2, 1.5), InvalidArgument);
}

TEST_CASE("rescaled quantizer is orthogonal to its error")
{
    Rng rng(37);
    for (int b : {1, 2, 3}) {
        const auto q = optimize_step(b);
        for (double eps : {-0.4, 0.0, 0.4}) {
            const auto agc = agc_zeta(q, eps);
            std::normal_distribution<double> n(0.0, agc.ratio);
            const auto mc = sample_mean(1'000'000, [&] {
                const double x = n(rng);
                const double r = agc.zeta * quantize(q, x);
                return (x - r) * r;
            });
            CHECK(std::abs(mc.mean) < 3.0 * mc.stderr_);
        }
    }
}

TEST_CASE("operating point identities")
{
    for (int b : {1, 2, 5}) {
        const auto q = optimize_step(b);
        for (double eps : {-0.8, 0.0, 0.3}) {
            const auto op = operating_point(q, agc_zeta(q, eps));
            const Moments m = moments(q, op.ratio);
            CHECK(op.kappa * m.cross == doctest::Approx(op.output_power()).epsilon(1e-13));
            CHECK(op.kappa * op.kappa * m.power == doctest::Approx(op.output_power()).epsilon(1e-13));
            if (eps == 0.0) CHECK(op.rho_eff <= q.rho + 1e-15);
        }
    }
    const auto op = operating_point(unquantized(), AgcState{});
    CHECK(op.rho_eff == 0.0);
    CHECK(op.kappa == 1.0);
}
