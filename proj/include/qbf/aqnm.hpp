// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "qbf/quant.hpp"
#include "qbf/types.hpp"

namespace qbf::aqnm {

/// Exact keeps the off-diagonal quantization-error correlation; Diagonal drops it.
enum class QuantModelVariant { Exact, Diagonal };

std::string_view variant_name(QuantModelVariant v);
/// Accepts "exact" or "diagonal"; throws InvalidArgument otherwise.
QuantModelVariant parse_variant(std::string_view name);

/// Everything needed to linearize one quantizer configuration.
struct QuantModel {
    quant::QuantizerSpec spec;
    quant::AgcState agc;
    quant::OperatingPoint op;
    std::shared_ptr<const quant::GTable> table;
    QuantModelVariant variant = QuantModelVariant::Exact;

    bool unquantized() const { return spec.unquantized(); }
};

/// Builds the operating point and fetches (or builds) the shared correlation table.
QuantModel make_model(const quant::QuantizerSpec& spec, double agc_error = 0.0,
                      QuantModelVariant variant = QuantModelVariant::Exact);

/// W^H ((1/N_f) sum_f H(f) R_x(f) H(f)^H + R_noise) W. An empty `w` means W = I.
CMat receive_covariance(const std::vector<CMat>& h_f, const std::vector<CMat>& r_x, const CMat& noise,
                        const CMat& w = CMat());

/// Diagonal of F = (1 - rho) diag(R)^{-1/2}. Throws DegenerateInputError on a non-positive diagonal.
RVec bussgang_gain(const CMat& r_yy, double rho);

/// diag(R)^{-1/2} R diag(R)^{-1/2}
CMat normalized_correlation(const CMat& r_yy);

/// Output covariance of the elementwise quantizer in the normalized frame:
/// entry (i, k) is g(Re C_ik) + j g(Im C_ik), diagonal E[Qt^2].
/// Throws NumericalError if a normalized entry exceeds 1 + 1e-9 in magnitude.
CMat quantized_covariance_T(const CMat& r_yy, const quant::GTable& g);
CMat quantized_covariance_T(const CMat& r_yy, const QuantModel& model);

struct ErrorCovariance {
    CMat matrix;
    /// Sum of magnitudes of eigenvalues clipped to zero.
    double clipped = 0.0;
};

/// R_rr - (1 - rho)^2 C, symmetrized and projected onto the PSD cone.
/// Diagonal keeps only the diagonal.
ErrorCovariance error_covariance(const CMat& r_yy, const CMat& r_rr, double rho, QuantModelVariant variant);

struct EffectiveSystem {
    std::vector<CMat> channel; // F H(f) per bin
    CMat noise;                // F R_noise F + R_ee
    RVec gain;                 // diagonal of F
    CMat error;                // R_ee
    double clipped = 0.0;
};

/// Linearized system for channel bins `h_f` (already combined) driven by
/// transmit covariances `r_x`, with combined noise covariance `noise`.
EffectiveSystem effective_system(const std::vector<CMat>& h_f, const std::vector<CMat>& r_x, const CMat& noise,
                                 const QuantModel& model);

/// Noise part of the effective system given the receive covariance.
struct EffectiveNoise {
    RVec gain;
    CMat noise;
    CMat error;
    double clipped = 0.0;
};
EffectiveNoise effective_noise(const CMat& r_yy, const CMat& noise, const QuantModel& model);

} // namespace qbf::aqnm
