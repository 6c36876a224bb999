// SPDX-License-Identifier: Apache-2.0
#include "qbf/aqnm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace qbf::aqnm {

std::string_view variant_name(QuantModelVariant v)
{
    return v == QuantModelVariant::Exact ? "exact" : "diagonal";
}

QuantModelVariant parse_variant(std::string_view name)
{
    if (name == "exact") return QuantModelVariant::Exact;
    if (name == "diagonal") return QuantModelVariant::Diagonal;
    throw InvalidArgument("unknown quantization model variant '" + std::string(name) + "'");
}

QuantModel make_model(const quant::QuantizerSpec& spec, double agc_error, QuantModelVariant variant)
{
    QuantModel m;
    m.spec = spec;
    m.agc = quant::agc_zeta(spec, agc_error);
    m.op = quant::operating_point(spec, m.agc);
    m.table = quant::cached_table(spec, m.op);
    m.variant = variant;
    return m;
}

CMat receive_covariance(const std::vector<CMat>& h_f, const std::vector<CMat>& r_x, const CMat& noise,
                        const CMat& w)
{
    if (h_f.empty() || h_f.size() != r_x.size()) throw InvalidArgument("receive_covariance: bin count mismatch");
    const Eigen::Index m = h_f.front().rows();
    if (noise.rows() != m || noise.cols() != m) throw InvalidArgument("receive_covariance: noise dimension mismatch");
    CMat acc = CMat::Zero(m, m);
    for (std::size_t f = 0; f < h_f.size(); ++f) {
        if (h_f[f].rows() != m || r_x[f].rows() != h_f[f].cols() || r_x[f].cols() != h_f[f].cols())
            throw InvalidArgument("receive_covariance: dimension mismatch");
        acc.noalias() += h_f[f] * r_x[f] * h_f[f].adjoint();
    }
    acc /= static_cast<double>(h_f.size());
    acc += noise;
    if (w.size() != 0) {
        if (w.rows() != m) throw InvalidArgument("receive_covariance: combiner dimension mismatch");
        acc = (w.adjoint() * acc * w).eval();
    }
    return 0.5 * (acc + acc.adjoint());
}

RVec bussgang_gain(const CMat& r_yy, double rho)
{
    RVec f(r_yy.rows());
    for (Eigen::Index i = 0; i < r_yy.rows(); ++i) {
        const double d = r_yy(i, i).real();
        if (!(d > 0.0)) throw DegenerateInputError("receive covariance has a non-positive diagonal entry");
        f(i) = (1.0 - rho) / std::sqrt(d);
    }
    return f;
}

CMat normalized_correlation(const CMat& r_yy)
{
    const RVec d = bussgang_gain(r_yy, 0.0);
    CMat c = d.asDiagonal() * r_yy * d.asDiagonal();
    for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, i) = 1.0;
    return c;
}

CMat quantized_covariance_T(const CMat& r_yy, const quant::GTable& g)
{
    const CMat c = normalized_correlation(r_yy);
    const Eigen::Index m = c.rows();
    CMat out(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        out(i, i) = g.at_one();
        for (Eigen::Index k = i + 1; k < m; ++k) {
            const cdouble v = c(i, k);
            if (std::abs(v.real()) > 1.0 + 1e-9 || std::abs(v.imag()) > 1.0 + 1e-9)
                throw NumericalError("normalized correlation outside [-1, 1]");
            const cdouble r(g(std::clamp(v.real(), -1.0, 1.0)), g(std::clamp(v.imag(), -1.0, 1.0)));
            out(i, k) = r;
            out(k, i) = std::conj(r);
        }
    }
    return out;
}

CMat quantized_covariance_T(const CMat& r_yy, const QuantModel& model)
{
    return quantized_covariance_T(r_yy, *model.table);
}

ErrorCovariance error_covariance(const CMat& r_yy, const CMat& r_rr, double rho, QuantModelVariant variant)
{
    if (r_rr.rows() != r_yy.rows() || r_rr.cols() != r_yy.cols())
        throw InvalidArgument("error_covariance: dimension mismatch");
    const double g2 = (1.0 - rho) * (1.0 - rho);
    CMat e = r_rr - g2 * normalized_correlation(r_yy);
    e = 0.5 * (e + e.adjoint()).eval();
    ErrorCovariance out;
    if (variant == QuantModelVariant::Diagonal) {
        out.matrix = CMat::Zero(e.rows(), e.cols());
        for (Eigen::Index i = 0; i < e.rows(); ++i) out.matrix(i, i) = std::max(e(i, i).real(), 0.0);
        return out;
    }
    if (e.cwiseAbs().maxCoeff() == 0.0) {
        out.matrix = e;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(e);
    RVec lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < 0.0) {
            out.clipped += -lambda(i);
            lambda(i) = 0.0;
        }
    }
    if (out.clipped > 0.0) {
        out.matrix = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
        out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
    } else {
        out.matrix = e;
    }
    return out;
}

EffectiveNoise effective_noise(const CMat& r_yy, const CMat& noise, const QuantModel& model)
{
    EffectiveNoise out;
    const double rho = model.op.rho_eff;
    out.gain = bussgang_gain(r_yy, rho);
    auto err = error_covariance(r_yy, quantized_covariance_T(r_yy, model), rho, model.variant);
    out.error = std::move(err.matrix);
    out.clipped = err.clipped;
    out.noise = out.gain.asDiagonal() * noise * out.gain.asDiagonal();
    out.noise += out.error;
    out.noise = 0.5 * (out.noise + out.noise.adjoint()).eval();
    return out;
}

EffectiveSystem effective_system(const std::vector<CMat>& h_f, const std::vector<CMat>& r_x, const CMat& noise,
                                 const QuantModel& model)
{
    const CMat r_yy = receive_covariance(h_f, r_x, noise);
    auto en = effective_noise(r_yy, noise, model);
    EffectiveSystem out;
    out.channel.reserve(h_f.size());
    for (const auto& h : h_f) out.channel.push_back(en.gain.asDiagonal() * h);
    out.noise = std::move(en.noise);
    out.gain = std::move(en.gain);
    out.error = std::move(en.error);
    out.clipped = en.clipped;
    return out;
}

}  // namespace qbf::aqnm
