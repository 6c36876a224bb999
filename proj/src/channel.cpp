// SPDX-License-Identifier: Apache-2.0
#include "qbf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbf {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng realization_rng(std::uint64_t master_seed, std::uint64_t index)
{
    std::uint64_t state = master_seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
    std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
    return Rng(seq);
}

cdouble complex_normal(Rng& rng, double variance)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace qbf

namespace qbf::channel {

double ChannelTaps::energy() const
{
    double e = 0.0;
    for (const auto& t : taps) e += t.squaredNorm();
    return e;
}

double Ray::rx_phase() const { return kPi * std::sin(aoa); }
double Ray::tx_phase() const { return kPi * std::sin(aod); }

CVec steering_vector(double phi, Eigen::Index antennas)
{
    if (antennas < 1) throw InvalidArgument("steering_vector: antenna count must be >= 1");
    CVec a(antennas);
    for (Eigen::Index m = 0; m < antennas; ++m) a(m) = std::polar(1.0, phi * static_cast<double>(m));
    return a;
}

std::vector<Ray> draw_rays(std::size_t count, Rng& rng)
{
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::vector<Ray> rays(count);
    for (auto& r : rays) {
        r.gain = complex_normal(rng);
        r.aoa = angle(rng);
        r.aod = angle(rng);
    }
    return rays;
}

CMat rays_to_matrix(std::span<const Ray> rays, Eigen::Index rx_antennas, Eigen::Index tx_antennas,
                    double scale)
{
    CMat h = CMat::Zero(rx_antennas, tx_antennas);
    for (const auto& r : rays) {
        const CVec ar = steering_vector(r.rx_phase(), rx_antennas);
        const CVec at = steering_vector(r.tx_phase(), tx_antennas);
        h.noalias() += (scale * r.gain) * ar * at.transpose();
    }
    return h;
}

ChannelTaps draw_ray_channel(std::size_t rays, Eigen::Index rx_antennas, Eigen::Index tx_antennas,
                             Rng& rng)
{
    if (rays < 1) throw InvalidArgument("draw_ray_channel: ray count must be >= 1");
    if (rx_antennas < 1 || tx_antennas < 1)
        throw InvalidArgument("draw_ray_channel: antenna counts must be >= 1");
    const auto set = draw_rays(rays, rng);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rays) * static_cast<double>(tx_antennas));
    return ChannelTaps{{rays_to_matrix(set, rx_antennas, tx_antennas, scale)}};
}

std::vector<double> pdp_variances(std::size_t max_delay, std::span<const std::size_t> positions,
                                  double decay)
{
    std::vector<double> v(max_delay, 0.0);
    double total = 0.0;
    for (auto l : positions) {
        if (l >= max_delay) throw InvalidArgument("pdp_variances: tap position out of range");
        v[l] = std::exp(-decay * static_cast<double>(l));
        total += v[l];
    }
    if (total <= 0.0) throw InvalidArgument("pdp_variances: no active taps");
    for (auto& x : v) x /= total;
    return v;
}

std::vector<std::size_t> draw_tap_positions(std::size_t max_delay, std::size_t active, Rng& rng)
{
    if (active < 1 || active > max_delay)
        throw InvalidArgument("draw_tap_positions: need 1 <= P <= L");
    // partial Fisher-Yates
    std::vector<std::size_t> idx(max_delay);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < active; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, max_delay - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(active);
    std::sort(idx.begin(), idx.end());
    return idx;
}

ChannelTaps pdp_channel_at(const PdpParams& params, std::span<const std::size_t> positions,
                           Eigen::Index rx_antennas, Eigen::Index tx_antennas, Rng& rng)
{
    if (params.active_taps < 1 || params.active_taps > params.max_delay)
        throw InvalidArgument("draw_pdp_channel: need 1 <= P <= L");
    const auto var = pdp_variances(params.max_delay, positions, params.decay);
    const double scale = 1.0 / std::sqrt(static_cast<double>(tx_antennas));

    ChannelTaps ch;
    ch.taps.assign(params.max_delay, CMat::Zero(rx_antennas, tx_antennas));
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (auto l : positions) {
        Ray r;
        r.gain = complex_normal(rng, var[l]);
        r.aoa = angle(rng);
        r.aod = angle(rng);
        ch.taps[l] = rays_to_matrix(std::span<const Ray>(&r, 1), rx_antennas, tx_antennas, scale);
    }
    return ch;
}

ChannelTaps draw_pdp_channel(const PdpParams& params, Eigen::Index rx_antennas,
                             Eigen::Index tx_antennas, Rng& rng)
{
    if (params.active_taps > params.max_delay)
        throw InvalidArgument("draw_pdp_channel: active taps exceed max delay");
    const auto pos = draw_tap_positions(params.max_delay, params.active_taps, rng);
    return pdp_channel_at(params, pos, rx_antennas, tx_antennas, rng);
}

ChannelFrequency to_frequency(const ChannelTaps& ch, std::size_t num_bins)
{
    const std::size_t taps = ch.num_taps();
    if (num_bins < taps || num_bins == 0)
        throw InvalidArgument("to_frequency: bin count must be >= number of taps");

    // Twiddles indexed by (n*l) mod N_f keep the phase exact for large products.
    std::vector<cdouble> twiddle(num_bins);
    for (std::size_t k = 0; k < num_bins; ++k)
        twiddle[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(num_bins));

    ChannelFrequency out;
    out.bins.assign(num_bins, CMat::Zero(ch.rows(), ch.cols()));
    for (std::size_t l = 0; l < taps; ++l) {
        if (ch.taps[l].isZero(0.0)) continue;
        for (std::size_t n = 0; n < num_bins; ++n)
            out.bins[n].noalias() += twiddle[(n * l) % num_bins] * ch.taps[l];
    }
    return out;
}

ChannelTaps to_time(const ChannelFrequency& freq, std::size_t num_taps)
{
    const std::size_t nb = freq.num_bins();
    if (num_taps > nb) throw InvalidArgument("to_time: more taps than bins");
    ChannelTaps out;
    out.taps.assign(num_taps, CMat::Zero(freq.rows(), freq.cols()));
    for (std::size_t l = 0; l < num_taps; ++l) {
        for (std::size_t n = 0; n < nb; ++n) {
            const double ang = kTwoPi * static_cast<double>((n * l) % nb) / static_cast<double>(nb);
            out.taps[l].noalias() += std::polar(1.0, ang) * freq.bins[n];
        }
        out.taps[l] /= static_cast<double>(nb);
    }
    return out;
}

std::size_t default_num_bins(std::size_t num_taps) { return std::max<std::size_t>(128, 2 * num_taps); }

}  // namespace qbf::channel
