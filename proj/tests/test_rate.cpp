// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qbf/aqnm.hpp"
#include "qbf/beams.hpp"
#include "qbf/channel.hpp"
#include "qbf/quant.hpp"
#include "qbf/rate.hpp"
#include "qbf/types.hpp"

#include "oracles.hpp"

using namespace qbf;
using namespace qbf::rate;

namespace {

// Algorithm reference: explicit precoder, effective system and log-det for every stream count.
std::vector<double> explicit_rates(const channel::ChannelTaps& ch, const CMat& noise, double p_tx,
                                   const aqnm::QuantModel& model, std::size_t nf)
{
    const auto h = channel::to_frequency(ch, nf);
    std::vector<double> out;
    for (std::size_t j = 1; j <= stream_limit(ch); ++j) {
        const auto plan = precoding_plan(h, j, p_tx);
        const auto rx = plan.covariances();
        const auto sys = aqnm::effective_system(h.bins, rx, noise, model);
        out.push_back(mutual_information(sys.channel, rx, sys.noise));
    }
    return out;
}

double dirichlet(double x, double m)
{
    const double den = m * std::sin(0.5 * x);
    return std::abs(den) < 1e-15 ? 1.0 : std::abs(std::sin(0.5 * m * x) / den);
}

}  // namespace

TEST_CASE("water levels")
{
    auto p = waterfill({1.0}, 1.0);
    CHECK(p[0] == doctest::Approx(1.0));
    p = waterfill({4.0, 1.0}, 0.5);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == 0.0);
    p = waterfill({4.0, 1.0}, 3.0);
    CHECK(p[0] == doctest::Approx(1.875));
    CHECK(p[1] == doctest::Approx(1.125));
    p = waterfill({2.0, 0.0, 2.0}, 2.0);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == 0.0);
    CHECK(p[2] == doctest::Approx(1.0));
    p = waterfill({0.0, 0.0}, 1.0);
    CHECK(p[0] == 0.0);
}

TEST_CASE("waterfilling rate examples")
{
    const channel::ChannelFrequency siso{{CMat::Constant(1, 1, 1.0)}};
    CHECK(std::abs(waterfilling_rate(siso, CMat::Identity(1, 1), 1.0) - 1.0) < 1e-14);

    const channel::ChannelFrequency twice{{CMat::Constant(1, 1, 0.7), CMat::Constant(1, 1, 0.7)}};
    const channel::ChannelFrequency once{{CMat::Constant(1, 1, 0.7)}};
    CHECK(waterfilling_rate(twice, CMat::Identity(1, 1), 2.0)
          == doctest::Approx(waterfilling_rate(once, CMat::Identity(1, 1), 2.0)).epsilon(1e-14));

    CMat singular = CMat::Identity(2, 2);
    singular(1, 1) = 0.0;
    const channel::ChannelFrequency two{{CMat::Identity(2, 2)}};
    CHECK_THROWS_AS(waterfilling_rate(two, singular, 1.0), InvalidArgument);
}

TEST_CASE("waterfilling matches a power-allocation grid search")
{
    Rng rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        const auto ch = channel::draw_ray_channel(6, 4, 4, rng);
        CMat noise = 0.3 * CMat::Identity(4, 4);
        noise(0, 2) = cdouble(0.05, 0.02);
        noise(2, 0) = std::conj(noise(0, 2));
        const double wf = waterfilling_rate(channel::to_frequency(ch, 1), noise, 4.0);
        const double grid = oracle::grid_search_rate(ch.taps[0], noise, 4.0, 200);
        CHECK(std::abs(wf - grid) < 1e-3);
        CHECK(wf >= grid - 1e-12);
    }
}

TEST_CASE("stream limit and precoding plan")
{
    Rng rng(62);
    const auto two = channel::draw_ray_channel(2, 4, 4, rng);
    CHECK(stream_limit(two) == 2);
    const auto pdp = channel::draw_pdp_channel({8, 4, 0.35}, 3, 5, rng);
    CHECK(stream_limit(pdp) == 3);

    const auto h = channel::to_frequency(pdp, 16);
    const auto plan = precoding_plan(h, 2, 5.0);
    for (std::size_t f = 0; f < 16; ++f) {
        const CMat r = plan.covariance(f);
        CHECK(r.trace().real() == doctest::Approx(5.0));
        Eigen::SelfAdjointEigenSolver<CMat> es(r);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
        const RVec gains = (h.bins[f] * plan.vectors[f]).colwise().squaredNorm();
        CHECK(gains(0) >= gains(1) - 1e-12);
    }
    CHECK_THROWS_AS(precoding_plan(h, 6, 1.0), InvalidArgument);
}

TEST_CASE("log-det and mutual information")
{
    CHECK(log2_det(4.0 * CMat::Identity(3, 3)) == doctest::Approx(6.0));
    CHECK_THROWS_AS(log2_det(-CMat::Identity(2, 2)), NumericalError);
    const std::vector<CMat> h{CMat::Identity(2, 2)};
    const std::vector<CMat> rx{CMat::Identity(2, 2)};
    CHECK(mutual_information(h, rx, CMat::Identity(2, 2)) == doctest::Approx(2.0));
}

TEST_CASE("one-bit SISO limits")
{
    const auto model = aqnm::make_model(quant::optimize_step(1));
    const channel::ChannelTaps ch{{CMat::Constant(1, 1, 1.0)}};
    const auto high = quantized_rate(ch, CMat(), 1e-6 * CMat::Identity(1, 1), 1.0, model, 1);
    const double limit = std::log2(1.0 + (2.0 / kPi) / (1.0 - 2.0 / kPi));
    CHECK(high.rate == doctest::Approx(limit).epsilon(0.01));
    CHECK(high.rate == doctest::Approx(1.4578).epsilon(0.01));
    const auto low = quantized_rate(ch, CMat(), 1e6 * CMat::Identity(1, 1), 1.0, model, 1);
    CHECK(low.rate < 0.01);
}

TEST_CASE("fast path matches the explicit pipeline")
{
    Rng rng(63);
    const std::size_t nf = 16;
    for (int b : {1, 3, 0}) {
        for (auto variant : {aqnm::QuantModelVariant::Exact, aqnm::QuantModelVariant::Diagonal}) {
            const auto spec = b ? quant::optimize_step(b) : quant::unquantized();
            const auto model = aqnm::make_model(spec, b == 3 ? 0.2 : 0.0, variant);
            const auto ch = channel::draw_pdp_channel({8, 4, 0.35}, 4, 3, rng);
            const CMat noise = 0.5 * CMat::Identity(4, 4);
            const auto fast = quantized_rate(ch, CMat(), noise, 3.0, model, nf);
            const auto ref = explicit_rates(ch, noise, 3.0, model, nf);
            REQUIRE(fast.per_stream.size() == ref.size());
            for (std::size_t j = 0; j < ref.size(); ++j)
                CHECK(fast.per_stream[j] == doctest::Approx(ref[j]).epsilon(1e-9));
            CHECK(fast.rate == *std::max_element(fast.per_stream.begin(), fast.per_stream.end()));
            CHECK(fast.per_stream[fast.best_streams - 1] == fast.rate);
        }
    }
}

TEST_CASE("fast path matches the explicit pipeline with more antennas than streams")
{
    Rng rng(64);
    const auto model = aqnm::make_model(quant::optimize_step(2));
    const auto ch = channel::draw_ray_channel(2, 6, 2, rng);
    const CMat noise = 0.1 * CMat::Identity(6, 6);
    const auto fast = quantized_rate(ch, CMat(), noise, 2.0, model, 1);
    const auto ref = explicit_rates(ch, noise, 2.0, model, 1);
    REQUIRE(fast.per_stream.size() == 2);
    for (std::size_t j = 0; j < 2; ++j) CHECK(fast.per_stream[j] == doctest::Approx(ref[j]).epsilon(1e-9));
}

TEST_CASE("unquantized rate is bounded by waterfilling")
{
    Rng rng(65);
    const auto model = aqnm::make_model(quant::unquantized());
    for (int trial = 0; trial < 5; ++trial) {
        const auto ch = channel::draw_pdp_channel({8, 4, 0.35}, 3, 4, rng);
        const CMat noise = 0.2 * CMat::Identity(3, 3);
        const auto r = quantized_rate(ch, CMat(), noise, 4.0, model, 16);
        const double wf = waterfilling_rate(channel::to_frequency(ch, 16), noise, 4.0);
        CHECK(r.rate <= wf + 1e-9);
        const auto h = channel::to_frequency(ch, 16);
        const auto rx = precoding_plan(h, r.best_streams, 4.0).covariances();
        CHECK(r.rate == doctest::Approx(mutual_information(h.bins, rx, noise)).epsilon(1e-9));
    }
}

TEST_CASE("rate is invariant to joint scaling of signal and noise")
{
    Rng rng(66);
    const auto model = aqnm::make_model(quant::optimize_step(2));
    auto ch = channel::draw_pdp_channel({8, 4, 0.35}, 4, 2, rng);
    const CMat noise = 0.3 * CMat::Identity(4, 4);
    const double a = quantized_rate(ch, CMat(), noise, 2.0, model, 16).rate;
    for (auto& t : ch.taps) t *= std::sqrt(40.0);
    const double b = quantized_rate(ch, CMat(), 40.0 * noise, 2.0, model, 16).rate;
    CHECK(b == doctest::Approx(a).epsilon(1e-10));
}

TEST_CASE("averaged rate grows with resolution")
{
    const std::size_t n = 50;
    std::vector<double> mean(7, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        Rng rng = realization_rng(7, r);
        const auto ch = channel::draw_pdp_channel({8, 4, 0.35}, 4, 4, rng);
        const CMat noise = CMat::Identity(4, 4);
        for (int b = 1; b <= 6; ++b)
            mean[static_cast<std::size_t>(b - 1)] +=
                quantized_rate(ch, CMat(), noise, 4.0, aqnm::make_model(quant::optimize_step(b)), 16).rate / n;
        mean[6] += quantized_rate(ch, CMat(), noise, 4.0, aqnm::make_model(quant::unquantized()), 16).rate / n;
    }
    for (std::size_t k = 1; k < mean.size(); ++k) CHECK(mean[k] >= mean[k - 1] * 0.98);
}

TEST_CASE("hybrid with single-antenna chains is digital")
{
    Rng rng(67);
    const auto model = aqnm::make_model(quant::optimize_step(3));
    const auto ch = channel::draw_pdp_channel({8, 4, 0.35}, 4, 3, rng);
    const CMat noise = 0.4 * CMat::Identity(4, 4);
    const auto h = hybrid_rate(ch, 4, 1, noise, 3.0, model, 16);
    const auto d = quantized_rate(ch, CMat(), noise, 3.0, model, 16);
    CHECK(h.rate == doctest::Approx(d.rate).epsilon(1e-12));
    CHECK(hybrid_waterfilling_rate(ch, 4, 1, noise, 3.0, 16)
          == doctest::Approx(waterfilling_rate(channel::to_frequency(ch, 16), noise, 3.0)).epsilon(1e-12));
}

TEST_CASE("hybrid single-ray beamforming gain")
{
    const auto model = aqnm::make_model(quant::unquantized());
    const Eigen::Index mc = 4;
    const Eigen::Index mt = 3;
    const auto cb = beams::build_codebook(mc);
    for (double phi : {cb.angles[5], 0.3, 2.9, -1.1}) {
        const CMat h = channel::steering_vector(phi, mc) * channel::steering_vector(0.8, mt).transpose()
                       / std::sqrt(static_cast<double>(mt));
        const channel::ChannelTaps ch{{h}};
        const double sigma2 = 0.5;
        const auto r = hybrid_rate(ch, 1, mc, sigma2 * CMat::Identity(mc, mc), static_cast<double>(mt), model, 1);
        const double beam = beams::select_beams(ch, 1, mc, cb).beams[0];
        const double af = dirichlet(phi - beam, static_cast<double>(mc));
        const double want = std::log2(1.0 + static_cast<double>(mc * mt) / sigma2 * af * af);
        CHECK(std::abs(r.rate - want) < 0.1);
        CHECK(r.rate == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("hybrid stream count is bounded by the chains")
{
    Rng rng(68);
    const auto model = aqnm::make_model(quant::optimize_step(2));
    for (int trial = 0; trial < 5; ++trial) {
        const auto ch = channel::draw_pdp_channel({8, 6, 0.35}, 8, 6, rng);
        const auto r = hybrid_rate(ch, 2, 4, CMat::Identity(8, 8), 6.0, model, 16);
        CHECK(r.best_streams <= 2);
        CHECK(r.per_stream.size() <= 2);
        CHECK(r.rate >= 0.0);
    }
}
