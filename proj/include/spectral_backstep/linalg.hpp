#ifndef SPECTRAL_BACKSTEP_LINALG_HPP
#define SPECTRAL_BACKSTEP_LINALG_HPP

#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "spectral_backstep/types.hpp"

namespace spectral_backstep {

/// Condition numbers above this are treated as numerically degenerate.
inline constexpr double kDegenerateCondition = 1e12;

/// Singular values in decreasing order.
inline RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector();
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues();
}

struct Conditioning {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  /// sigma_max / sigma_min; infinite when sigma_min == 0.
  double cond = std::numeric_limits<double>::infinity();
  bool degenerate = true;
};

inline Conditioning conditioning(const CMatrix& m) {
  Conditioning c;
  const RVector s = singular_values(m);
  if (s.size() == 0) return c;
  c.sigma_max = s(0);
  c.sigma_min = s(s.size() - 1);
  if (c.sigma_min > 0.0) c.cond = c.sigma_max / c.sigma_min;
  c.degenerate = !(c.cond <= kDegenerateCondition);
  return c;
}

inline Eigen::Index numerical_rank(const CMatrix& m, double rel_tol = 1e-12) {
  const RVector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

inline double operator_norm(const CMatrix& m) {
  const RVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Dense LU solve followed by a few rounds of iterative refinement.
///
/// Throws NumericalError when the reciprocal condition estimate of the LU
/// factorisation says the system is singular to working precision.
inline CVector solve_refined(const CMatrix& a, const CVector& b, const std::string& op,
                             double max_cond = kDegenerateCondition, int refinements = 2,
                             double* cond_estimate = nullptr) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw ShapeError(op + ": system shape mismatch");
  Eigen::PartialPivLU<CMatrix> lu(a);
  const double rc = lu.rcond();
  const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (cond_estimate) *cond_estimate = cond;
  if (!(cond <= max_cond)) {
    throw NumericalError(op + ": matrix numerically singular (condition estimate " +
                         std::to_string(cond) + " > " + std::to_string(max_cond) + ")");
  }
  CVector x = lu.solve(b);
  for (int k = 0; k < refinements; ++k) {
    const CVector res = b - a * x;
    x += lu.solve(res);
  }
  return x;
}

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_LINALG_HPP
