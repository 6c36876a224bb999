// SPDX-License-Identifier: Apache-2.0
#include "qbf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "qbf/types.hpp"

namespace qbf::harness {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what)
{
    text = trim(text);
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
        throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

bool parse_bool(std::string_view text)
{
    const auto v = lower(trim(text));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean '" + v + "'");
}

std::vector<double> snr_grid(double lo, double step, double hi)
{
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

}  // namespace

std::string Architecture::label() const
{
    return hybrid ? "HBF" + std::to_string(antennas_per_chain) : "DBF";
}

Architecture parse_architecture(std::string_view text)
{
    const auto t = lower(trim(text));
    if (t == "dbf") return Architecture::digital();
    if (t.rfind("hbf", 0) == 0) {
        std::string_view rest = std::string_view(t).substr(3);
        if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
        const long mc = parse_number<long>(rest, "antennas per chain");
        if (mc < 1) throw ConfigError("antennas per chain must be >= 1");
        return Architecture::sub_array(mc);
    }
    throw ConfigError("unknown architecture '" + std::string(text) + "' (expected dbf or hbf:<M_C>)");
}

std::size_t ScenarioConfig::bins() const
{
    return num_bins > 0 ? num_bins : channel::default_num_bins(channel_taps());
}

void ScenarioConfig::validate() const
{
    auto fail = [this](const std::string& msg) { throw ConfigError("scenario '" + name + "': " + msg); };
    if (architectures.empty()) fail("no architectures");
    if (tx_antennas < 1 || rx_antennas < 1) fail("antenna counts must be >= 1");
    for (const auto& a : architectures) {
        if (a.antennas_per_chain < 1) fail("antennas per chain must be >= 1");
        if (rx_antennas % a.antennas_per_chain != 0)
            fail("M_R = " + std::to_string(rx_antennas) + " is not divisible by M_C = "
                 + std::to_string(a.antennas_per_chain));
    }
    if (channel == ChannelKind::Rays && rays < 1) fail("ray count must be >= 1");
    if (channel == ChannelKind::Pdp) {
        if (pdp.active_taps < 1 || pdp.active_taps > pdp.max_delay) fail("PDP needs 1 <= P <= L");
        if (!std::isfinite(pdp.decay)) fail("PDP decay must be finite");
    }
    if (bits.empty() && !baseline) fail("nothing to compute: no bit depths and baseline disabled");
    for (int b : bits)
        if (b < 1 || b > 16) fail("bit depths must be in [1, 16]");
    if (variants.empty()) fail("no quantization model variants");
    if (agc_errors.empty()) fail("no AGC errors");
    for (double e : agc_errors)
        if (!(e < 1.0) || !std::isfinite(e)) fail("AGC errors must be finite and < 1");
    if (snr_db.empty()) fail("empty SNR grid");
    for (double s : snr_db)
        if (!std::isfinite(s)) fail("SNR grid must be finite");
    if (realizations < 1) fail("realizations must be >= 1");
    if (num_bins > 0 && num_bins < channel_taps()) fail("bin count must be >= number of channel taps");
    if (p_tx < 0.0 || !std::isfinite(p_tx)) fail("transmit power must be positive");
    if (!(bandwidth_hz > 0.0)) fail("bandwidth must be positive");
    if (!(sampling_ghz > 0.0)) fail("sampling rate must be positive");
    try {
        power::validate(power);
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }
}

std::vector<std::string> preset_names() { return {"dl", "ul", "diagcmp32x1", "diagcmp8x8", "agc-siso"}; }

ScenarioConfig preset(std::string_view name)
{
    ScenarioConfig c;
    c.name = std::string(name);
    c.snr_db = snr_grid(-30.0, 5.0, 30.0);
    c.realizations = 100;
    if (name == "dl" || name == "ul") {
        c.tx_antennas = name == "dl" ? 64 : 8;
        c.rx_antennas = name == "dl" ? 8 : 64;
        c.architectures = {Architecture::digital(), Architecture::sub_array(4)};
        c.channel = ChannelKind::Pdp;
        c.pdp = {32, 16, 0.35};
        c.bits = {1, 2, 3, 4, 5, 6, 7, 8};
        return c;
    }
    if (name == "diagcmp32x1" || name == "diagcmp8x8") {
        c.tx_antennas = name == "diagcmp32x1" ? 1 : 8;
        c.rx_antennas = name == "diagcmp32x1" ? 32 : 8;
        c.channel = ChannelKind::Rays;
        c.rays = 7;
        c.bits = {1, 2, 3, 4, 5, 6, 7, 8};
        c.variants = {aqnm::QuantModelVariant::Exact, aqnm::QuantModelVariant::Diagonal};
        c.baseline = false;
        return c;
    }
    if (name == "agc-siso") {
        c.tx_antennas = 1;
        c.rx_antennas = 1;
        c.channel = ChannelKind::Pdp;
        c.pdp = {32, 16, 0.35};
        c.bits = {1, 2};
        c.agc_errors = {0.0, 0.1, -0.1, 0.2, -0.2, 0.4, -0.4, 0.8, -0.8};
        c.baseline = false;
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> out;
    for (auto item : split(text, ',')) {
        if (item.empty()) throw ConfigError("empty entry in list '" + std::string(text) + "'");
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(parse_number<int>(item, "integer"));
            continue;
        }
        const int lo = parse_number<int>(item.substr(0, dots), "range start");
        const int hi = parse_number<int>(item.substr(dots + 2), "range end");
        if (hi < lo) throw ConfigError("descending range '" + std::string(item) + "'");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view text)
{
    std::vector<double> out;
    for (auto item : split(text, ',')) {
        if (item.empty()) throw ConfigError("empty entry in list '" + std::string(text) + "'");
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(parse_number<double>(item, "number"));
        } else if (parts.size() == 3) {
            const double lo = parse_number<double>(parts[0], "grid start");
            const double step = parse_number<double>(parts[1], "grid step");
            const double hi = parse_number<double>(parts[2], "grid end");
            if (!(step > 0.0) || hi < lo) throw ConfigError("invalid grid '" + std::string(item) + "'");
            const auto g = snr_grid(lo, step, hi);
            out.insert(out.end(), g.begin(), g.end());
        } else {
            throw ConfigError("invalid grid '" + std::string(item) + "' (expected start:step:end)");
        }
    }
    return out;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key_in, std::string_view value)
{
    const auto key = lower(trim(key_in));
    value = trim(value);
    if (key == "preset") {
        cfg = preset(value);
    } else if (key == "name" || key == "scenario") {
        cfg.name = std::string(value);
    } else if (key == "arch" || key == "architectures") {
        cfg.architectures.clear();
        for (auto a : split(value, ',')) cfg.architectures.push_back(parse_architecture(a));
    } else if (key == "m_t") {
        cfg.tx_antennas = parse_number<long>(value, "M_T");
    } else if (key == "m_r") {
        cfg.rx_antennas = parse_number<long>(value, "M_R");
    } else if (key == "channel") {
        const auto v = lower(value);
        if (v == "rays")
            cfg.channel = ChannelKind::Rays;
        else if (v == "pdp")
            cfg.channel = ChannelKind::Pdp;
        else
            throw ConfigError("unknown channel model '" + v + "' (expected rays or pdp)");
    } else if (key == "rays") {
        cfg.rays = parse_number<std::size_t>(value, "ray count");
    } else if (key == "pdp.max_delay" || key == "l") {
        cfg.pdp.max_delay = parse_number<std::size_t>(value, "max delay");
    } else if (key == "pdp.active_taps" || key == "p") {
        cfg.pdp.active_taps = parse_number<std::size_t>(value, "active taps");
    } else if (key == "pdp.decay" || key == "beta") {
        cfg.pdp.decay = parse_number<double>(value, "decay");
    } else if (key == "bits") {
        cfg.bits = value == "none" ? std::vector<int>{} : parse_int_list(value);
    } else if (key == "variant" || key == "variants") {
        cfg.variants.clear();
        for (auto v : split(value, ',')) {
            try {
                cfg.variants.push_back(aqnm::parse_variant(lower(v)));
            } catch (const InvalidArgument& e) {
                throw ConfigError(e.what());
            }
        }
    } else if (key == "agc" || key == "agc_errors") {
        cfg.agc_errors = parse_double_list(value);
    } else if (key == "snr" || key == "snr_db") {
        cfg.snr_db = parse_double_list(value);
    } else if (key == "realizations") {
        cfg.realizations = parse_number<std::size_t>(value, "realization count");
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value, "seed");
    } else if (key == "num_bins" || key == "n_f") {
        cfg.num_bins = parse_number<std::size_t>(value, "bin count");
    } else if (key == "p_tx") {
        cfg.p_tx = parse_number<double>(value, "transmit power");
    } else if (key == "baseline") {
        cfg.baseline = parse_bool(value);
    } else if (key == "bandwidth_hz") {
        cfg.bandwidth_hz = parse_number<double>(value, "bandwidth");
    } else if (key == "sampling_ghz") {
        cfg.sampling_ghz = parse_number<double>(value, "sampling rate");
    } else if (key.rfind("power.", 0) == 0) {
        const auto field = key.substr(6);
        const double v = parse_number<double>(value, key);
        auto& t = cfg.power;
        if (field == "lo") t.lo = v;
        else if (field == "lna") t.lna = v;
        else if (field == "mixer") t.mixer = v;
        else if (field == "hybrid") t.hybrid = v;
        else if (field == "limiting_amp") t.limiting_amp = v;
        else if (field == "one_bit_adc") t.one_bit_adc = v;
        else if (field == "phase_shifter") t.phase_shifter = v;
        else if (field == "vga") t.vga = v;
        else if (field == "adc_fom") t.adc_fom = v;
        else throw ConfigError("unknown power table entry '" + std::string(field) + "'");
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

ScenarioConfig parse_config(std::istream& in, ScenarioConfig base)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

ScenarioConfig load_config(const std::string& path, ScenarioConfig base)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, std::move(base));
}

}  // namespace qbf::harness
