#ifndef SPECTRAL_BACKSTEP_TYPES_HPP
#define SPECTRAL_BACKSTEP_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spectral_backstep {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Sine (odd) or cosine (even) sector of the periodic eigenbasis.
enum class Parity { Odd, Even };

inline const char* to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }

/// First mode index of a sector: sines start at n = 1, cosines at n = 0.
inline int first_mode(Parity p) { return p == Parity::Odd ? 1 : 0; }

// Error hierarchy. Every error names the operation that raised it.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid physical or multiplier parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mismatched parity, mode count or truncation between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Sobolev index or other parameter outside the admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Input violates the hypothesis of an estimate (e.g. sum exponent too large).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned or failed dense linear algebra.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_TYPES_HPP
