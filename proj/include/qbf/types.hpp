// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qbf {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Pseudo-random engine used for every channel realization.
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error hierarchy. The CLI maps ConfigError to exit code 2 and
// NumericalError to exit code 3.

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Bisection could not bracket a root.
struct NoRootError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input that is well-formed but degenerate (zero receive power, etc).
struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical conditioning failure: correlations outside [-1, 1], non-PD log-det argument.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Independent, reproducible stream for realization `index` of a run seeded with `master_seed`.
/// The stream does not depend on how realizations are scheduled across workers.
Rng realization_rng(std::uint64_t master_seed, std::uint64_t index);

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
cdouble complex_normal(Rng& rng, double variance = 1.0);

}  // namespace qbf
