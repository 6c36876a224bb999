// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qbf/config.hpp"

namespace qbf::harness {

/// 10^(-snr/10): both channel models deliver unit average power per receive antenna.
double calibrate_noise(double snr_db);

/// One output row. bits == 0 marks the unquantized baseline.
struct RateRecord {
    std::string scenario;
    std::string arch;
    long m_t = 0;
    long m_r = 0;
    long m_c = 1;
    int bits = 0;
    std::string variant;
    double agc = 0.0;
    double snr_db = 0.0;
    double rate_mean = 0.0;
    double rate_stderr = 0.0;
    double p_r_mw = 0.0;
    double ee = 0.0;
    std::size_t realizations = 0;
    std::uint64_t seed = 0;
};

struct RunResult {
    std::vector<RateRecord> records;
    /// raw[i][r]: rate of record i in realization r.
    std::vector<std::vector<double>> raw;
};

/// Validates, then averages over realizations. Output is identical for any worker count
/// (0 selects the hardware concurrency).
RunResult run_scenario(const ScenarioConfig& cfg, std::size_t workers = 0);

inline constexpr const char* kCsvHeader =
    "scenario,arch,M_T,M_R,M_C,bits,variant,agc,snr_db,rate_mean,rate_stderr,p_r_mw,ee,realizations,seed";

/// Shortest decimal that round-trips; "nan"/"inf" for non-finite values.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<RateRecord>& records);
/// Per-realization rates, one line per record and realization.
void write_raw(std::ostream& out, const RunResult& result);

/// Mean and sample standard deviation over sqrt(n).
struct Summary {
    double mean = 0.0;
    double std_error = 0.0;
};
Summary summarize(const std::vector<double>& values);

} // namespace qbf::harness
