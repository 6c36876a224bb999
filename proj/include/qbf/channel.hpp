// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qbf/types.hpp"

namespace qbf::channel {

/// Time-domain MIMO channel: tap l holds the M_R x M_T gain matrix at delay l samples.
struct ChannelTaps {
    std::vector<CMat> taps;

    std::size_t num_taps() const { return taps.size(); }
    Eigen::Index rows() const { return taps.empty() ? 0 : taps.front().rows(); }
    Eigen::Index cols() const { return taps.empty() ? 0 : taps.front().cols(); }
    /// Sum over taps of the squared Frobenius norm.
    double energy() const;
};

/// Channel sampled on N_f uniformly spaced frequency bins.
struct ChannelFrequency {
    std::vector<CMat> bins;

    std::size_t num_bins() const { return bins.size(); }
    Eigen::Index rows() const { return bins.empty() ? 0 : bins.front().rows(); }
    Eigen::Index cols() const { return bins.empty() ? 0 : bins.front().cols(); }
};

/// One propagation path. Angles in radians, uniform in [-pi, pi).
struct Ray {
    cdouble gain;
    double aoa;
    double aod;

    /// Phase shift between adjacent receive elements at half-wavelength spacing.
    double rx_phase() const;
    double tx_phase() const;
};

struct PdpParams {
    std::size_t max_delay = 32;   // L
    std::size_t active_taps = 16; // P
    double decay = 0.35;          // beta
};

/// [1, e^{j phi}, ..., e^{j (M-1) phi}]^T
CVec steering_vector(double phi, Eigen::Index antennas);

/// K independent rays with unit-variance gains and uniform angles.
std::vector<Ray> draw_rays(std::size_t count, Rng& rng);

/// Sum of rank-one ray contributions scaled by `scale`.
CMat rays_to_matrix(std::span<const Ray> rays, Eigen::Index rx_antennas, Eigen::Index tx_antennas,
                    double scale);

/// Flat K-ray channel normalized by 1/sqrt(K M_T) (single tap).
ChannelTaps draw_ray_channel(std::size_t rays, Eigen::Index rx_antennas, Eigen::Index tx_antennas,
                             Rng& rng);

/// Exponential power-delay profile restricted to `positions`, normalized to unit sum.
/// Entries outside `positions` are zero.
std::vector<double> pdp_variances(std::size_t max_delay, std::span<const std::size_t> positions,
                                  double decay);

/// P distinct tap positions drawn uniformly from {0, ..., L-1}, returned in ascending order.
std::vector<std::size_t> draw_tap_positions(std::size_t max_delay, std::size_t active, Rng& rng);

/// Multipath channel with one ray per active tap and exponential PDP.
ChannelTaps draw_pdp_channel(const PdpParams& params, Eigen::Index rx_antennas,
                             Eigen::Index tx_antennas, Rng& rng);

/// Same as draw_pdp_channel but with caller-chosen active positions.
ChannelTaps pdp_channel_at(const PdpParams& params, std::span<const std::size_t> positions,
                           Eigen::Index rx_antennas, Eigen::Index tx_antennas, Rng& rng);

/// H(f_n) = sum_l H[l] e^{-j 2 pi n l / N_f}, n = 0..N_f-1.
ChannelFrequency to_frequency(const ChannelTaps& ch, std::size_t num_bins);

/// Inverse of to_frequency, returning the first `num_taps` taps.
ChannelTaps to_time(const ChannelFrequency& freq, std::size_t num_taps);

/// max(128, 2L)
std::size_t default_num_bins(std::size_t num_taps);

}  // namespace qbf::channel
