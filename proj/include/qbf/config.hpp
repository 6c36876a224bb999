// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qbf/aqnm.hpp"
#include "qbf/channel.hpp"
#include "qbf/power.hpp"

namespace qbf::harness {

/// Digital beamforming (M_C = 1, no combiner) or sub-array hybrid with M_C antennas per chain.
struct Architecture {
    bool hybrid = false;
    long antennas_per_chain = 1;

    static Architecture digital() { return {}; }
    static Architecture sub_array(long mc) { return {true, mc}; }
    /// "DBF" or "HBF<M_C>"
    std::string label() const;
};

/// Parses "dbf", "hbf:4" or "hbf4" (case-insensitive).
Architecture parse_architecture(std::string_view text);

enum class ChannelKind { Rays, Pdp };

struct ScenarioConfig {
    std::string name = "custom";
    std::vector<Architecture> architectures{Architecture::digital()};
    long tx_antennas = 1; // M_T
    long rx_antennas = 1; // M_R
    ChannelKind channel = ChannelKind::Pdp;
    std::size_t rays = 7;
    channel::PdpParams pdp;
    std::vector<int> bits{1};
    std::vector<aqnm::QuantModelVariant> variants{aqnm::QuantModelVariant::Exact};
    std::vector<double> agc_errors{0.0};
    std::vector<double> snr_db{0.0};
    std::size_t realizations = 100;
    std::uint64_t seed = 42;
    std::size_t num_bins = 0; // 0: max(128, 2L)
    double p_tx = 0.0;        // 0: M_T
    bool baseline = true;     // also emit the unquantized waterfilling rows
    power::PowerTable power;
    double bandwidth_hz = 1e9;
    double sampling_ghz = 2.5;

    std::size_t channel_taps() const { return channel == ChannelKind::Rays ? 1 : pdp.max_delay; }
    std::size_t bins() const;
    double transmit_power() const { return p_tx > 0.0 ? p_tx : static_cast<double>(tx_antennas); }

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(std::string_view name);

/// "1..8", "1,2,4" or a mix such as "1..3,8".
std::vector<int> parse_int_list(std::string_view text);
/// "-30:5:30" (inclusive), "0,10,20" or a mix.
std::vector<double> parse_double_list(std::string_view text);

/// Applies one key/value setting. Keys mirror the ScenarioConfig fields,
/// e.g. "arch", "m_t", "bits", "snr", "power.lna". Throws ConfigError.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Reads "key = value" lines; '#' starts a comment. A "preset" key, if present,
/// must come first and resets the configuration to that preset.
ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {});

} // namespace qbf::harness
