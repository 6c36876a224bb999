// SPDX-License-Identifier: Apache-2.0
#include "qbf/beams.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace qbf::beams {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
           + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

void check_antennas(Eigen::Index m)
{
    if (m < 1) throw InvalidArgument("antennas per chain must be >= 1");
}

}  // namespace

double array_factor(double theta, double phi_b, Eigen::Index antennas)
{
    check_antennas(antennas);
    const double m = static_cast<double>(antennas);
    const double u = 0.5 * kPi * std::sin(theta - phi_b);
    const double den = m * std::sin(u);
    if (std::abs(u) < 1e-12) return 1.0;
    return std::clamp(std::abs(std::sin(m * u) / den), 0.0, 1.0);
}

double mean_beam_error(double delta, Eigen::Index antennas)
{
    check_antennas(antennas);
    if (!(delta > 0.0) || delta > kPi) throw InvalidArgument("beam spacing must be in (0, pi]");
    if (antennas == 1) return 0.0;
    const auto integrand = [antennas](double x) { return 1.0 - array_factor(x, 0.0, antennas); };
    return 2.0 / delta * adaptive_simpson(integrand, 0.0, 0.5 * delta, 1e-9);
}

double solve_beam_spacing(double epsilon, Eigen::Index antennas)
{
    check_antennas(antennas);
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("mean beam error must be in (0, 1)");
    double lo = 1e-4;
    double hi = kPi;
    const double f_lo = mean_beam_error(lo, antennas) - epsilon;
    const double f_hi = mean_beam_error(hi, antennas) - epsilon;
    if (f_lo > 0.0 || f_hi < 0.0)
        throw NoRootError("mean beam error " + std::to_string(epsilon) + " not reachable for M_C = "
                          + std::to_string(antennas));
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_beam_error(mid, antennas) - epsilon > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::size_t min_beam_count(double epsilon, Eigen::Index antennas)
{
    return static_cast<std::size_t>(std::ceil(kTwoPi / solve_beam_spacing(epsilon, antennas)));
}

BeamCodebook build_codebook(Eigen::Index antennas, std::size_t count)
{
    check_antennas(antennas);
    if (count == 0) count = 4 * static_cast<std::size_t>(antennas);
    BeamCodebook cb;
    cb.antennas_per_chain = antennas;
    cb.angles.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        cb.angles[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
    return cb;
}

AnalogCombiner make_combiner(const std::vector<double>& beams, Eigen::Index antennas_per_chain)
{
    check_antennas(antennas_per_chain);
    const auto chains = static_cast<Eigen::Index>(beams.size());
    AnalogCombiner out;
    out.beams = beams;
    out.antennas_per_chain = antennas_per_chain;
    out.matrix = CMat::Zero(chains * antennas_per_chain, chains);
    for (Eigen::Index i = 0; i < chains; ++i)
        out.matrix.block(i * antennas_per_chain, i, antennas_per_chain, 1) =
            channel::steering_vector(beams[static_cast<std::size_t>(i)], antennas_per_chain);
    return out;
}

std::vector<double> beam_energies(const channel::ChannelTaps& ch, Eigen::Index chain,
                                  Eigen::Index antennas_per_chain, const BeamCodebook& codebook)
{
    check_antennas(antennas_per_chain);
    if ((chain + 1) * antennas_per_chain > ch.rows()) throw InvalidArgument("beam_energies: chain out of range");
    CMat gram = CMat::Zero(antennas_per_chain, antennas_per_chain);
    for (const auto& tap : ch.taps) {
        const auto block = tap.middleRows(chain * antennas_per_chain, antennas_per_chain);
        gram.noalias() += block * block.adjoint();
    }
    std::vector<double> p(codebook.angles.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const CVec w = channel::steering_vector(codebook.angles[j], antennas_per_chain);
        p[j] = (w.adjoint() * gram * w)(0, 0).real();
    }
    return p;
}

AnalogCombiner select_beams(const channel::ChannelTaps& ch, Eigen::Index chains, Eigen::Index antennas_per_chain,
                            const BeamCodebook& codebook)
{
    check_antennas(antennas_per_chain);
    if (chains < 1 || ch.rows() != chains * antennas_per_chain)
        throw InvalidArgument("select_beams: M_R must equal M_RFE * M_C");
    if (codebook.angles.empty()) throw InvalidArgument("select_beams: empty codebook");
    std::vector<double> chosen(static_cast<std::size_t>(chains));
    for (Eigen::Index i = 0; i < chains; ++i) {
        const auto p = beam_energies(ch, i, antennas_per_chain, codebook);
        std::size_t best = 0;
        for (std::size_t j = 1; j < p.size(); ++j)
            if (p[j] > p[best]) best = j;
        chosen[static_cast<std::size_t>(i)] = codebook.angles[best];
    }
    return make_combiner(chosen, antennas_per_chain);
}

CombinedSystem combine(const CMat& w, const channel::ChannelTaps& ch, const CMat& noise)
{
    if (w.rows() != ch.rows() || noise.rows() != w.rows() || noise.cols() != w.rows())
        throw InvalidArgument("combine: dimension mismatch");
    CombinedSystem out;
    out.channel.taps.reserve(ch.num_taps());
    for (const auto& tap : ch.taps) out.channel.taps.push_back(w.adjoint() * tap);
    out.noise = w.adjoint() * noise * w;
    out.noise = 0.5 * (out.noise + out.noise.adjoint()).eval();
    return out;
}

}  // namespace qbf::beams
