// common.hpp -- shared aliases, error types and small numeric helpers.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace scrc {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched or empty shapes (vector lengths, channel counts, alignment).
struct DimensionError : Error {
  using Error::Error;
};

/// Invalid parameter values (non-positive sigma, bad window config, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Input data violates a contract (degenerate columns, short recordings,
/// malformed files).
struct DataError : Error {
  using Error::Error;
};

/// Non-finite values or a failed numeric procedure.
struct NumericError : Error {
  using Error::Error;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// splitmix64 step; used to derive independent substreams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace scrc
