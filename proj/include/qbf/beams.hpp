// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "qbf/channel.hpp"
#include "qbf/types.hpp"

namespace qbf::beams {

/// Receive beam phases, uniformly spaced over [0, 2 pi). Each angle is the
/// Vandermonde phase step of the combining vector, not a spatial angle.
struct BeamCodebook {
    std::vector<double> angles;
    Eigen::Index antennas_per_chain = 1;
};

/// Block-diagonal analog combiner. Column i holds the steering vector of
/// beams[i] on rows i*M_C .. (i+1)*M_C - 1.
struct AnalogCombiner {
    std::vector<double> beams;
    Eigen::Index antennas_per_chain = 1;
    CMat matrix;

    Eigen::Index chains() const { return matrix.cols(); }
    Eigen::Index antennas() const { return matrix.rows(); }
};

/// |sin(M (pi/2) sin x) / (M sin((pi/2) sin x))| with x = theta - phi_b; 1 at x = 0.
double array_factor(double theta, double phi_b, Eigen::Index antennas);

/// (2/delta) * integral_0^{delta/2} (1 - AF(x, 0, M)) dx by adaptive Simpson.
double mean_beam_error(double delta, Eigen::Index antennas);

/// Beam spacing delta with mean_beam_error(delta) = epsilon (bisection on [1e-4, pi]).
/// Throws NoRootError if epsilon is not reached inside the bracket.
double solve_beam_spacing(double epsilon, Eigen::Index antennas);

/// ceil(2 pi / solve_beam_spacing(epsilon, M)).
std::size_t min_beam_count(double epsilon, Eigen::Index antennas);

/// `count` angles 2 pi k / count; count = 0 selects the 4 M rule.
BeamCodebook build_codebook(Eigen::Index antennas, std::size_t count = 0);

AnalogCombiner make_combiner(const std::vector<double>& beams, Eigen::Index antennas_per_chain);

/// Per-chain exhaustive scan: picks the codebook beam maximizing the received
/// energy sum_l ||w^H H_i[l]||^2 on that chain's subarray. Ties go to the lower index.
AnalogCombiner select_beams(const channel::ChannelTaps& ch, Eigen::Index chains, Eigen::Index antennas_per_chain,
                            const BeamCodebook& codebook);

/// Received energy of every codebook beam on chain `chain`.
std::vector<double> beam_energies(const channel::ChannelTaps& ch, Eigen::Index chain,
                                  Eigen::Index antennas_per_chain, const BeamCodebook& codebook);

struct CombinedSystem {
    channel::ChannelTaps channel; // W^H H[l]
    CMat noise;                   // W^H R W
};

CombinedSystem combine(const CMat& w, const channel::ChannelTaps& ch, const CMat& noise);

} // namespace qbf::beams
