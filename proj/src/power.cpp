// SPDX-License-Identifier: Apache-2.0
#include "qbf/power.hpp"

#include <cmath>

#include "qbf/types.hpp"

namespace qbf::power {

void validate(const PowerTable& t)
{
    for (double v : {t.lo, t.lna, t.mixer, t.hybrid, t.limiting_amp, t.one_bit_adc, t.phase_shifter, t.vga, t.adc_fom})
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("power table entries must be finite and >= 0");
}

void validate(const FrontendConfig& cfg)
{
    if (cfg.antennas < 1 || cfg.chains < 1 || cfg.antennas_per_chain < 1)
        throw InvalidArgument("front-end antenna and chain counts must be >= 1");
    if (cfg.antennas != cfg.chains * cfg.antennas_per_chain)
        throw InvalidArgument("front-end requires M_R = M_RFE * M_C");
    if (cfg.bits < 1) throw InvalidArgument("front-end ADC resolution must be >= 1 bit");
    if (!(cfg.sampling_ghz > 0.0)) throw InvalidArgument("sampling rate must be positive");
}

double adc_power(const PowerTable& table, int bits, double sampling_ghz)
{
    return table.adc_fom * sampling_ghz * std::ldexp(1.0, bits);
}

PowerBreakdown frontend_breakdown(const FrontendConfig& cfg, const PowerTable& t)
{
    validate(cfg);
    validate(t);
    const auto mr = static_cast<double>(cfg.antennas);
    const auto rfe = static_cast<double>(cfg.chains);
    PowerBreakdown b;
    b.items.push_back({"LO", 1.0, t.lo});
    b.items.push_back({"LNA", mr, t.lna});
    b.items.push_back({"hybrid", mr, t.hybrid});
    b.items.push_back({"mixer", 2.0 * mr, t.mixer});
    if (cfg.combining()) b.items.push_back({"phase shifter", mr, t.phase_shifter});
    if (cfg.one_bit()) {
        b.items.push_back({"limiting amp", 2.0 * rfe, t.limiting_amp});
        if (t.one_bit_adc > 0.0) b.items.push_back({"1-bit ADC", 2.0 * rfe, t.one_bit_adc});
    } else {
        b.items.push_back({"VGA", 2.0 * rfe, t.vga});
        b.items.push_back({"ADC", 2.0 * rfe, adc_power(t, cfg.bits, cfg.sampling_ghz)});
    }
    for (const auto& it : b.items) b.total_mw += it.count * it.unit_mw;
    return b;
}

double frontend_power(const FrontendConfig& cfg, const PowerTable& table)
{
    return frontend_breakdown(cfg, table).total_mw;
}

double energy_efficiency(double rate_bps, double power_watts)
{
    if (!(power_watts > 0.0)) throw InvalidArgument("energy_efficiency: power must be positive");
    return rate_bps / power_watts;
}

}  // namespace qbf::power
