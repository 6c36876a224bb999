// SPDX-License-Identifier: Apache-2.0
// qbf: run scenarios, print the beam table and the front-end power breakdown.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qbf/beams.hpp"
#include "qbf/harness.hpp"
#include "qbf/power.hpp"
#include "qbf/simd/kernels.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunOptions {
    std::string preset;
    std::string config;
    std::vector<std::string> settings;
    std::string arch, bits, snr, variant, agc;
    std::size_t realizations = 0;
    long long seed = -1;
    std::size_t workers = 0;
    std::string out = "-";
    std::string dump_raw;
};

qbf::harness::ScenarioConfig build_config(const RunOptions& o)
{
    using namespace qbf::harness;
    ScenarioConfig cfg = o.preset.empty() ? ScenarioConfig{} : preset(o.preset);
    if (!o.config.empty()) cfg = load_config(o.config, cfg);
    for (const auto& kv : o.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw qbf::ConfigError("--set expects key=value, got '" + kv + "'");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.arch.empty()) apply_setting(cfg, "arch", o.arch);
    if (!o.bits.empty()) apply_setting(cfg, "bits", o.bits);
    if (!o.snr.empty()) apply_setting(cfg, "snr", o.snr);
    if (!o.variant.empty()) apply_setting(cfg, "variant", o.variant);
    if (!o.agc.empty()) apply_setting(cfg, "agc", o.agc);
    if (o.realizations > 0) cfg.realizations = o.realizations;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    return cfg;
}

int cmd_run(const RunOptions& o)
{
    const auto cfg = build_config(o);
    const auto result = qbf::harness::run_scenario(cfg, o.workers);
    if (o.out == "-") {
        qbf::harness::write_csv(std::cout, result.records);
    } else {
        std::ofstream f(o.out);
        if (!f) throw qbf::ConfigError("cannot write '" + o.out + "'");
        qbf::harness::write_csv(f, result.records);
    }
    if (!o.dump_raw.empty()) {
        std::ofstream f(o.dump_raw);
        if (!f) throw qbf::ConfigError("cannot write '" + o.dump_raw + "'");
        qbf::harness::write_raw(f, result);
    }
    std::cerr << cfg.name << ": " << result.records.size() << " rows, " << cfg.realizations
              << " realizations, bandwidth " << qbf::harness::format_double(cfg.bandwidth_hz) << " Hz\n";
    return 0;
}

int cmd_beams(const std::vector<long>& mcs, double eps)
{
    std::printf("%6s %12s %10s %10s\n", "M_C", "delta", "beams", "4*M_C");
    for (long mc : mcs) {
        const double delta = qbf::beams::solve_beam_spacing(eps, mc);
        const auto n = qbf::beams::min_beam_count(eps, mc);
        std::printf("%6ld %12.6f %10zu %10ld\n", mc, delta, n, 4 * mc);
    }
    return 0;
}

int cmd_power(const RunOptions& o, const std::string& bits_text)
{
    auto cfg = build_config(o);
    cfg.validate();
    std::vector<int> bits = bits_text.empty() ? cfg.bits : qbf::harness::parse_int_list(bits_text);
    for (const auto& arch : cfg.architectures) {
        qbf::power::FrontendConfig fe;
        fe.antennas = cfg.rx_antennas;
        fe.antennas_per_chain = arch.antennas_per_chain;
        fe.chains = cfg.rx_antennas / arch.antennas_per_chain;
        fe.sampling_ghz = cfg.sampling_ghz;
        for (int b : bits) {
            fe.bits = b;
            const auto br = qbf::power::frontend_breakdown(fe, cfg.power);
            std::printf("%s M_R=%ld M_RFE=%ld M_C=%ld bits=%d\n", arch.label().c_str(), fe.antennas, fe.chains,
                        fe.antennas_per_chain, b);
            for (const auto& it : br.items)
                std::printf("  %-14s %6g x %9.4f mW = %10.4f mW\n", it.name.c_str(), it.count, it.unit_mw,
                            it.count * it.unit_mw);
            std::printf("  %-14s %33.4f mW\n", "P_R", br.total_mw);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Achievable rate and energy efficiency of quantized digital and hybrid beamforming receivers"};
    app.require_subcommand(1);
    std::string simd;
    app.add_option("--simd", simd, "Kernel level: scalar or avx2 (default: best available)")
        ->check(CLI::IsMember({"scalar", "avx2"}));

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Monte Carlo scenario run, CSV output");
    run_cmd->add_option("--preset", run.preset, "dl, ul, diagcmp32x1, diagcmp8x8, agc-siso");
    run_cmd->add_option("--config", run.config, "key = value file applied after the preset");
    run_cmd->add_option("--set", run.settings, "Extra key=value settings (repeatable)");
    run_cmd->add_option("--arch", run.arch, "Architectures, e.g. dbf,hbf:4");
    run_cmd->add_option("--bits", run.bits, "Bit depths, e.g. 1..8");
    run_cmd->add_option("--snr", run.snr, "SNR grid in dB, e.g. -30:5:30");
    run_cmd->add_option("--variant", run.variant, "exact, diagonal or both");
    run_cmd->add_option("--agc", run.agc, "AGC relative errors, e.g. 0,0.1,-0.1");
    run_cmd->add_option("--realizations", run.realizations, "Channel realizations");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--workers", run.workers, "Worker threads (0: all cores)");
    run_cmd->add_option("--out", run.out, "CSV output path ('-' for stdout)");
    run_cmd->add_option("--dump-raw", run.dump_raw, "Per-realization rates CSV");

    std::vector<long> mcs{2, 4, 8, 16, 32};
    double eps = 0.1;
    auto* beams_cmd = app.add_subcommand("beams", "Minimum number of beams for a mean beam error");
    beams_cmd->add_option("--mc", mcs, "Antennas per sub-array")->delimiter(',');
    beams_cmd->add_option("--eps", eps, "Target mean error");

    RunOptions pw;
    std::string pw_bits;
    auto* power_cmd = app.add_subcommand("power", "Front-end power breakdown");
    power_cmd->add_option("--preset", pw.preset, "Scenario preset");
    power_cmd->add_option("--config", pw.config, "key = value file");
    power_cmd->add_option("--set", pw.settings, "Extra key=value settings (repeatable)");
    power_cmd->add_option("--arch", pw.arch, "Architectures, e.g. dbf,hbf:4");
    power_cmd->add_option("--bits", pw_bits, "Bit depths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (!simd.empty())
            qbf::simd::set_active_level(simd == "avx2" ? qbf::simd::Level::Avx2 : qbf::simd::Level::Scalar);
        if (*run_cmd) return cmd_run(run);
        if (*beams_cmd) return cmd_beams(mcs, eps);
        if (*power_cmd) return cmd_power(pw, pw_bits);
    } catch (const qbf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qbf::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qbf::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const qbf::NoRootError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const qbf::DegenerateInputError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
