// SPDX-License-Identifier: Apache-2.0
#include "qbf/rate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qbf/beams.hpp"

namespace qbf::rate {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Eigenpairs sorted by descending eigenvalue.
struct Spectrum {
    RVec values;
    CMat vectors;
};

Spectrum descending_eigen(const CMat& a)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
    const Eigen::Index n = a.rows();
    Spectrum s{RVec(n), CMat(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        s.values(i) = std::max(es.eigenvalues()(n - 1 - i), 0.0);
        s.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return s;
}

// Cholesky factor, regularized by 1e-12 trace / M when the condition number exceeds 1e12.
Eigen::LLT<CMat> stable_cholesky(const CMat& r)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(r, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    CMat a = r;
    if (!(hi > 0.0)) throw NumericalError("effective noise covariance is not positive definite");
    if (lo <= 0.0 || hi / lo > 1e12) {
        const double jitter = 1e-12 * r.trace().real() / static_cast<double>(r.rows());
        a += jitter * CMat::Identity(r.rows(), r.cols());
    }
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("effective noise covariance is not positive definite");
    return llt;
}

CMat inverse_sqrt(const CMat& r)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(r);
    const RVec& lam = es.eigenvalues();
    const double hi = lam.maxCoeff();
    if (!(hi > 0.0) || lam.minCoeff() <= 1e-14 * hi) throw InvalidArgument("noise covariance is singular");
    return es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::vector<double> waterfill(const std::vector<double>& lambda, double budget)
{
    std::vector<double> p(lambda.size(), 0.0);
    double top = 0.0;
    for (double l : lambda)
        if (l > 0.0) top = std::max(top, 1.0 / l);
    if (top == 0.0 || !(budget > 0.0)) return p;
    auto poured = [&](double mu) {
        double s = 0.0;
        for (double l : lambda)
            if (l > 0.0) s += std::max(0.0, mu - 1.0 / l);
        return s;
    };
    double lo = 0.0;
    double hi = budget + top;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = poured(mid);
        if (std::abs(s - budget) <= 1e-10 * budget) {
            lo = hi = mid;
            break;
        }
        if (s > budget)
            hi = mid;
        else
            lo = mid;
    }
    // Exact level on the active set found by bisection.
    const double approx = 0.5 * (lo + hi);
    double inv_sum = 0.0;
    std::size_t active = 0;
    for (double l : lambda)
        if (l > 0.0 && 1.0 / l < approx) {
            inv_sum += 1.0 / l;
            ++active;
        }
    const double mu = active ? (budget + inv_sum) / static_cast<double>(active) : approx;
    for (std::size_t k = 0; k < lambda.size(); ++k)
        if (lambda[k] > 0.0) p[k] = std::max(0.0, mu - 1.0 / lambda[k]);
    return p;
}

double waterfilling_rate(const channel::ChannelFrequency& h, const CMat& noise, double p_tx)
{
    if (h.bins.empty()) throw InvalidArgument("waterfilling_rate: no frequency bins");
    if (noise.rows() != h.rows() || noise.cols() != h.rows())
        throw InvalidArgument("waterfilling_rate: noise dimension mismatch");
    const CMat whiten = inverse_sqrt(noise);
    std::vector<double> lambda;
    for (const auto& hf : h.bins) {
        const CMat g = whiten * hf;
        const CMat gram = g.rows() <= g.cols() ? CMat(g * g.adjoint()) : CMat(g.adjoint() * g);
        const RVec ev = Eigen::SelfAdjointEigenSolver<CMat>(gram, Eigen::EigenvaluesOnly).eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) lambda.push_back(ev(i));
    }
    const double peak = *std::max_element(lambda.begin(), lambda.end());
    for (auto& l : lambda)
        if (l <= 1e-14 * peak) l = 0.0;
    const auto nf = static_cast<double>(h.num_bins());
    const auto p = waterfill(lambda, nf * p_tx);
    double acc = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) acc += std::log1p(lambda[k] * p[k]);
    return acc / kLn2 / nf;
}

CMat PrecodingPlan::covariance(std::size_t bin) const
{
    const CMat& v = vectors.at(bin);
    return (p_tx / static_cast<double>(streams)) * v * v.adjoint();
}

std::vector<CMat> PrecodingPlan::covariances() const
{
    std::vector<CMat> out;
    out.reserve(vectors.size());
    for (std::size_t f = 0; f < vectors.size(); ++f) out.push_back(covariance(f));
    return out;
}

PrecodingPlan precoding_plan(const channel::ChannelFrequency& h, std::size_t streams, double p_tx)
{
    if (streams < 1 || static_cast<Eigen::Index>(streams) > h.cols())
        throw InvalidArgument("precoding_plan: stream count out of range");
    PrecodingPlan plan;
    plan.streams = streams;
    plan.p_tx = p_tx;
    for (const auto& hf : h.bins) {
        const auto s = descending_eigen(hf.adjoint() * hf);
        plan.vectors.push_back(s.vectors.leftCols(static_cast<Eigen::Index>(streams)));
    }
    return plan;
}

StreamFactors stream_factors(const channel::ChannelFrequency& h, std::size_t max_streams)
{
    const auto s = static_cast<Eigen::Index>(max_streams);
    if (s > std::min(h.rows(), h.cols())) throw InvalidArgument("stream_factors: more streams than rank bound");
    StreamFactors out;
    out.max_streams = max_streams;
    out.columns.reserve(h.num_bins());
    for (const auto& hf : h.bins) {
        if (hf.rows() <= hf.cols()) {
            // H v_k = sigma_k u_k
            const auto sp = descending_eigen(hf * hf.adjoint());
            out.columns.push_back(sp.vectors.leftCols(s) * sp.values.head(s).cwiseSqrt().asDiagonal());
        } else {
            const auto sp = descending_eigen(hf.adjoint() * hf);
            out.columns.push_back(hf * sp.vectors.leftCols(s));
        }
    }
    return out;
}

std::size_t stream_limit(const channel::ChannelTaps& ch)
{
    if (ch.taps.empty()) return 0;
    CMat sum = CMat::Zero(ch.rows(), ch.cols());
    for (const auto& t : ch.taps) sum += t;
    const RVec sv = Eigen::JacobiSVD<CMat>(sum).singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double tol = static_cast<double>(std::max(sum.rows(), sum.cols())) * 1e-12 * sv(0);
    return static_cast<std::size_t>((sv.array() > tol).count());
}

double log2_det(const CMat& a)
{
    Eigen::LLT<CMat> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("log-det argument is not positive definite");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::log(llt.matrixL()(i, i).real());
    return 2.0 * acc / kLn2;
}

double mutual_information(const std::vector<CMat>& h_f, const std::vector<CMat>& r_x, const CMat& noise)
{
    if (h_f.empty() || h_f.size() != r_x.size()) throw InvalidArgument("mutual_information: bin count mismatch");
    const auto llt = stable_cholesky(noise);
    double acc = 0.0;
    for (std::size_t f = 0; f < h_f.size(); ++f) {
        CMat x = h_f[f] * r_x[f] * h_f[f].adjoint();
        x = llt.matrixL().solve(x);
        x = llt.matrixL().solve(x.adjoint().eval()).adjoint();
        x = 0.5 * (x + x.adjoint()).eval();
        x += CMat::Identity(x.rows(), x.cols());
        acc += log2_det(x);
    }
    return acc / static_cast<double>(h_f.size());
}

RateResult quantized_rate(const StreamFactors& factors, const CMat& noise, double p_tx,
                          const aqnm::QuantModel& model)
{
    RateResult out;
    const std::size_t smax = factors.max_streams;
    if (smax == 0 || factors.columns.empty()) return out;
    const Eigen::Index m = noise.rows();
    const auto nf = static_cast<double>(factors.columns.size());

    // Running sum over streams of the band-averaged per-stream receive covariance.
    std::vector<CMat> cumulative(smax + 1, CMat::Zero(m, m));
    for (std::size_t k = 0; k < smax; ++k) {
        CMat a = CMat::Zero(m, m);
        for (const auto& g : factors.columns) {
            const auto col = g.col(static_cast<Eigen::Index>(k));
            a.noalias() += col * col.adjoint();
        }
        cumulative[k + 1] = cumulative[k] + a / nf;
    }

    out.per_stream.resize(smax);
    for (std::size_t j = 1; j <= smax; ++j) {
        const double power = p_tx / static_cast<double>(j);
        CMat r_yy = power * cumulative[j] + noise;
        r_yy = 0.5 * (r_yy + r_yy.adjoint()).eval();
        const auto en = aqnm::effective_noise(r_yy, noise, model);
        out.clipped += en.clipped;
        const auto llt = stable_cholesky(en.noise);
        const double amp = std::sqrt(power);
        const auto cols = static_cast<Eigen::Index>(j);
        double acc = 0.0;
        for (const auto& g : factors.columns) {
            CMat x = en.gain.asDiagonal() * g.leftCols(cols);
            x *= amp;
            llt.matrixL().solveInPlace(x);
            CMat k = x.adjoint() * x;
            k += CMat::Identity(cols, cols);
            acc += log2_det(k);
        }
        out.per_stream[j - 1] = acc / nf;
    }
    const auto best = std::max_element(out.per_stream.begin(), out.per_stream.end());
    out.best_streams = static_cast<std::size_t>(best - out.per_stream.begin()) + 1;
    out.rate = std::max(*best, 0.0);
    return out;
}

RateResult quantized_rate(const channel::ChannelTaps& ch, const CMat& w, const CMat& noise, double p_tx,
                          const aqnm::QuantModel& model, std::size_t num_bins)
{
    if (noise.rows() != ch.rows() || noise.cols() != ch.rows())
        throw InvalidArgument("quantized_rate: noise dimension mismatch");
    if (w.size() == 0) {
        const auto f = stream_factors(channel::to_frequency(ch, num_bins), stream_limit(ch));
        return quantized_rate(f, noise, p_tx, model);
    }
    const auto c = beams::combine(w, ch, noise);
    const auto f = stream_factors(channel::to_frequency(c.channel, num_bins), stream_limit(c.channel));
    return quantized_rate(f, c.noise, p_tx, model);
}

RateResult hybrid_rate(const channel::ChannelTaps& ch, Eigen::Index chains, Eigen::Index antennas_per_chain,
                       const CMat& noise, double p_tx, const aqnm::QuantModel& model, std::size_t num_bins)
{
    const auto cb = beams::build_codebook(antennas_per_chain);
    const auto comb = beams::select_beams(ch, chains, antennas_per_chain, cb);
    return quantized_rate(ch, comb.matrix, noise, p_tx, model, num_bins);
}

double hybrid_waterfilling_rate(const channel::ChannelTaps& ch, Eigen::Index chains,
                                Eigen::Index antennas_per_chain, const CMat& noise, double p_tx,
                                std::size_t num_bins)
{
    const auto cb = beams::build_codebook(antennas_per_chain);
    const auto comb = beams::select_beams(ch, chains, antennas_per_chain, cb);
    const auto c = beams::combine(comb.matrix, ch, noise);
    return waterfilling_rate(channel::to_frequency(c.channel, num_bins), c.noise, p_tx);
}

}  // namespace qbf::rate
