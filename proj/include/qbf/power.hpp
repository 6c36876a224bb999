// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace qbf::power {

/// Component powers in milliwatts. adc_fom is in mW per GHz per conversion step
/// (15 fJ/step = 0.015 mW/GHz).
struct PowerTable {
    double lo = 22.5;
    double lna = 5.4;
    double mixer = 0.3;
    double hybrid = 3.0;
    double limiting_amp = 0.8;
    double one_bit_adc = 0.0;
    double phase_shifter = 2.0;
    double vga = 2.0;
    double adc_fom = 0.015;
};

/// Throws InvalidArgument if any entry is negative or not finite.
void validate(const PowerTable& table);

struct FrontendConfig {
    long antennas = 1;           // M_R
    long chains = 1;             // M_RFE
    long antennas_per_chain = 1; // M_C
    int bits = 1;
    double sampling_ghz = 2.5;

    bool combining() const { return !(chains == antennas && antennas_per_chain == 1); }
    bool one_bit() const { return bits == 1; }
};

/// Throws InvalidArgument unless M_R = M_RFE M_C, all counts >= 1 and bits >= 1.
void validate(const FrontendConfig& cfg);

/// adc_fom * f_s * 2^b
double adc_power(const PowerTable& table, int bits, double sampling_ghz);

struct PowerBreakdown {
    struct Item {
        std::string name;
        double count;
        double unit_mw;
    };
    std::vector<Item> items;
    double total_mw = 0.0;
};

PowerBreakdown frontend_breakdown(const FrontendConfig& cfg, const PowerTable& table = {});

/// P_R in mW.
double frontend_power(const FrontendConfig& cfg, const PowerTable& table = {});

/// rate [bit/s] / power [W]. Throws InvalidArgument if power <= 0.
double energy_efficiency(double rate_bps, double power_watts);

} // namespace qbf::power
