// SPDX-License-Identifier: Apache-2.0
#include "qbf/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "qbf/beams.hpp"
#include "qbf/rate.hpp"

namespace qbf::harness {

namespace {

struct QuantCase {
    int bits;
    aqnm::QuantModelVariant variant;
    double agc;
    aqnm::QuantModel model;
};

// Rows in emission order: per architecture, quantized cases then the baseline, each over the SNR grid.
struct Layout {
    std::vector<QuantCase> cases;
    std::size_t per_arch = 0;
    std::size_t snrs = 0;

    std::size_t quant_index(std::size_t arch, std::size_t c, std::size_t s) const
    {
        return arch * per_arch + c * snrs + s;
    }
    std::size_t baseline_index(std::size_t arch, std::size_t s) const
    {
        return arch * per_arch + cases.size() * snrs + s;
    }
};

channel::ChannelTaps draw_channel(const ScenarioConfig& cfg, Rng& rng)
{
    if (cfg.channel == ChannelKind::Rays)
        return channel::draw_ray_channel(cfg.rays, cfg.rx_antennas, cfg.tx_antennas, rng);
    return channel::draw_pdp_channel(cfg.pdp, cfg.rx_antennas, cfg.tx_antennas, rng);
}

void run_realization(const ScenarioConfig& cfg, const Layout& layout, std::size_t r,
                     std::vector<std::vector<double>>& raw)
{
    Rng rng = realization_rng(cfg.seed, r);
    const auto ch = draw_channel(cfg, rng);
    const double p_tx = cfg.transmit_power();
    for (std::size_t a = 0; a < cfg.architectures.size(); ++a) {
        const auto& arch = cfg.architectures[a];
        channel::ChannelTaps combined;
        CMat unit_noise;
        if (arch.hybrid) {
            const auto mc = static_cast<Eigen::Index>(arch.antennas_per_chain);
            const auto chains = static_cast<Eigen::Index>(cfg.rx_antennas / arch.antennas_per_chain);
            const auto comb = beams::select_beams(ch, chains, mc, beams::build_codebook(mc));
            auto c = beams::combine(comb.matrix, ch, CMat::Identity(ch.rows(), ch.rows()));
            combined = std::move(c.channel);
            unit_noise = std::move(c.noise);
        } else {
            combined = ch;
            unit_noise = CMat::Identity(ch.rows(), ch.rows());
        }
        const auto freq = channel::to_frequency(combined, cfg.bins());
        const auto factors = rate::stream_factors(freq, rate::stream_limit(combined));
        for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
            const CMat noise = calibrate_noise(cfg.snr_db[s]) * unit_noise;
            for (std::size_t c = 0; c < layout.cases.size(); ++c)
                raw[layout.quant_index(a, c, s)][r] = rate::quantized_rate(factors, noise, p_tx, layout.cases[c].model).rate;
            if (cfg.baseline) raw[layout.baseline_index(a, s)][r] = rate::waterfilling_rate(freq, noise, p_tx);
        }
    }
}

}  // namespace

double calibrate_noise(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

Summary summarize(const std::vector<double>& values)
{
    Summary s;
    if (values.empty()) return s;
    const auto n = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= n;
    if (values.size() < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return s;
}

RunResult run_scenario(const ScenarioConfig& cfg, std::size_t workers)
{
    cfg.validate();

    Layout layout;
    layout.snrs = cfg.snr_db.size();
    for (int b : cfg.bits) {
        const auto spec = quant::optimize_step(b);
        for (auto v : cfg.variants)
            for (double e : cfg.agc_errors) layout.cases.push_back({b, v, e, aqnm::make_model(spec, e, v)});
    }
    layout.per_arch = (layout.cases.size() + (cfg.baseline ? 1 : 0)) * layout.snrs;

    RunResult result;
    const std::size_t rows = layout.per_arch * cfg.architectures.size();
    result.raw.assign(rows, std::vector<double>(cfg.realizations, 0.0));

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.realizations);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= cfg.realizations) return;
            try {
                run_realization(cfg, layout, r, result.raw);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(cfg.realizations);
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    result.records.resize(rows);
    for (std::size_t a = 0; a < cfg.architectures.size(); ++a) {
        const auto& arch = cfg.architectures[a];
        power::FrontendConfig fe;
        fe.antennas = cfg.rx_antennas;
        fe.antennas_per_chain = arch.antennas_per_chain;
        fe.chains = cfg.rx_antennas / arch.antennas_per_chain;
        fe.sampling_ghz = cfg.sampling_ghz;
        auto fill = [&](std::size_t idx, int bits, std::string variant, double agc, std::size_t s) {
            RateRecord& rec = result.records[idx];
            rec.scenario = cfg.name;
            rec.arch = arch.label();
            rec.m_t = cfg.tx_antennas;
            rec.m_r = cfg.rx_antennas;
            rec.m_c = arch.antennas_per_chain;
            rec.bits = bits;
            rec.variant = std::move(variant);
            rec.agc = agc;
            rec.snr_db = cfg.snr_db[s];
            const auto sum = summarize(result.raw[idx]);
            rec.rate_mean = sum.mean;
            rec.rate_stderr = sum.std_error;
            if (bits > 0) {
                fe.bits = bits;
                rec.p_r_mw = power::frontend_power(fe, cfg.power);
                rec.ee = power::energy_efficiency(rec.rate_mean * cfg.bandwidth_hz, rec.p_r_mw * 1e-3);
            } else {
                rec.p_r_mw = std::nan("");
                rec.ee = std::nan("");
            }
            rec.realizations = cfg.realizations;
            rec.seed = cfg.seed;
        };
        for (std::size_t c = 0; c < layout.cases.size(); ++c) {
            const auto& qc = layout.cases[c];
            for (std::size_t s = 0; s < layout.snrs; ++s)
                fill(layout.quant_index(a, c, s), qc.bits, std::string(aqnm::variant_name(qc.variant)), qc.agc, s);
        }
        if (cfg.baseline)
            for (std::size_t s = 0; s < layout.snrs; ++s) fill(layout.baseline_index(a, s), 0, "unquantized", 0.0, s);
    }
    return result;
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<RateRecord>& records)
{
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.scenario << ',' << r.arch << ',' << r.m_t << ',' << r.m_r << ',' << r.m_c << ','
            << (r.bits > 0 ? std::to_string(r.bits) : std::string("inf")) << ',' << r.variant << ','
            << format_double(r.agc) << ',' << format_double(r.snr_db) << ',' << format_double(r.rate_mean) << ','
            << format_double(r.rate_stderr) << ',' << format_double(r.p_r_mw) << ',' << format_double(r.ee) << ','
            << r.realizations << ',' << r.seed << '\n';
    }
}

void write_raw(std::ostream& out, const RunResult& result)
{
    out << "record,arch,bits,variant,agc,snr_db,realization,rate\n";
    for (std::size_t i = 0; i < result.raw.size(); ++i) {
        const auto& rec = result.records[i];
        for (std::size_t r = 0; r < result.raw[i].size(); ++r)
            out << i << ',' << rec.arch << ',' << (rec.bits > 0 ? std::to_string(rec.bits) : std::string("inf")) << ','
                << rec.variant << ',' << format_double(rec.agc) << ',' << format_double(rec.snr_db) << ',' << r << ','
                << format_double(result.raw[i][r]) << '\n';
    }
}

}  // namespace qbf::harness
