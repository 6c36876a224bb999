// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "qbf/aqnm.hpp"
#include "qbf/channel.hpp"
#include "qbf/types.hpp"

namespace qbf::rate {

/// Whiten by R^{-1/2}, then pour N_f * p_tx over every eigenmode of every bin.
/// Returns (1/N_f) sum log2(1 + lambda p) in bps/Hz. Throws InvalidArgument
/// if the noise covariance is singular.
double waterfilling_rate(const channel::ChannelFrequency& h, const CMat& noise, double p_tx);

/// Water-level solution for parallel channels with gains `lambda` and a total budget.
std::vector<double> waterfill(const std::vector<double>& lambda, double budget);

/// Equal power over the top `streams` right singular vectors in each bin.
struct PrecodingPlan {
    std::vector<CMat> vectors; // per bin, M_T x streams, descending singular values
    std::size_t streams = 0;
    double p_tx = 0.0;

    /// R_x(f) = V S V^H with [S]_ii = p_tx / streams.
    CMat covariance(std::size_t bin) const;
    std::vector<CMat> covariances() const;
};
PrecodingPlan precoding_plan(const channel::ChannelFrequency& h, std::size_t streams, double p_tx);

/// Per bin, column k is H(f) v_k(f) for the k-th right singular vector
/// (unit power per stream). Shared by every SNR and quantizer configuration.
struct StreamFactors {
    std::vector<CMat> columns;
    std::size_t max_streams = 0;
};
StreamFactors stream_factors(const channel::ChannelFrequency& h, std::size_t max_streams);

/// rank(sum_l H[l])
std::size_t stream_limit(const channel::ChannelTaps& ch);

struct RateResult {
    double rate = 0.0;          // bps/Hz
    std::size_t best_streams = 0;
    std::vector<double> per_stream; // R(j), j = 1..S_max
    double clipped = 0.0;       // eigenvalue mass removed from R_ee, summed over j
};

/// (1/N_f) sum_f log2 det(I + R^{-1} H(f) R_x(f) H(f)^H)
double mutual_information(const std::vector<CMat>& h_f, const std::vector<CMat>& r_x, const CMat& noise);

/// log2 det of a Hermitian positive-definite matrix. Throws NumericalError otherwise.
double log2_det(const CMat& a);

/// Equal-power stream search on the linearized quantized system; `noise` is
/// the noise covariance at the quantizer input.
RateResult quantized_rate(const StreamFactors& factors, const CMat& noise, double p_tx,
                          const aqnm::QuantModel& model);

/// Full pipeline for a receiver with combiner `w` (empty means digital) and
/// antenna-domain noise covariance `noise`.
RateResult quantized_rate(const channel::ChannelTaps& ch, const CMat& w, const CMat& noise, double p_tx,
                          const aqnm::QuantModel& model, std::size_t num_bins);

/// Beam selection, combining, then quantized_rate on the combined system.
RateResult hybrid_rate(const channel::ChannelTaps& ch, Eigen::Index chains, Eigen::Index antennas_per_chain,
                       const CMat& noise, double p_tx, const aqnm::QuantModel& model, std::size_t num_bins);

/// Unquantized reference for the combined system: waterfilling after W^H R W whitening.
double hybrid_waterfilling_rate(const channel::ChannelTaps& ch, Eigen::Index chains,
                                Eigen::Index antennas_per_chain, const CMat& noise, double p_tx,
                                std::size_t num_bins);

} // namespace qbf::rate
