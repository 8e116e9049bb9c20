#ifndef SPECTRAL_BACKSTEP_CONTROLLABILITY_HPP
#define SPECTRAL_BACKSTEP_CONTROLLABILITY_HPP

// Null controllability of u_n' = lambda_n u_n + b_n v(t) by the moment method.
//
// With f_n(s) = exp(-lambda_n s) = exp(i omega_n s), u(T) = 0 is equivalent to
// the moment problem  int_0^T f_n(s) v(s) ds = -u0_n / b_n. The minimal L^2
// solution lies in span{conj(f_m)}: v = sum_m c_m conj(f_m), G c = d, where
// G(n, m) = int_0^T f_n conj(f_m) is the Gram matrix of the exponentials.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "spectral_backstep/feedback_synthesis.hpp"
#include "spectral_backstep/linalg.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep {

struct CondBReport {
  bool pass = false;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// min/max |b_n|; passes iff every b_n (including b_0 in the even sector) is nonzero.
inline CondBReport check_condB(const ControlProfile& B) {
  CondBReport rep;
  if (B.size() == 0) return rep;
  rep.c1 = B.c1();
  rep.c2 = B.c2();
  rep.pass = rep.c1 > 0.0 && std::isfinite(rep.c2);
  return rep;
}

struct GapRow {
  int N0 = 0;
  /// min_{n >= N0} |omega_(n+1) - omega_n|.
  double gamma = 0.0;
  /// 2 pi / gamma, the horizon above which the gap theorem applies.
  double min_horizon = std::numeric_limits<double>::infinity();
};

struct GapReport {
  /// Smallest adjacent gap of omega_n = |lambda_n|.
  double omega = 0.0;
  std::vector<GapRow> rows;
  bool pass = false;
  bool gamma_non_decreasing = true;
};

/// Adjacent-gap profile of the frequencies, tabulated at N0 = first mode, then powers of two.
inline GapReport ingham_gap_report(const Spectrum& spectrum) {
  const Eigen::Index size = spectrum.size();
  if (size < 3) throw RangeError("ingham_gap_report: need at least 3 modes");
  const RVector om = spectrum.frequencies();
  RVector gaps(size - 1);
  for (Eigen::Index i = 0; i + 1 < size; ++i) gaps(i) = std::abs(om(i + 1) - om(i));

  GapReport rep;
  rep.omega = gaps.minCoeff();
  rep.pass = rep.omega > 0.0;

  std::vector<int> starts{spectrum.first()};
  for (int n0 = 1; n0 < spectrum.truncation(); n0 *= 2)
    if (n0 > spectrum.first()) starts.push_back(n0);
  for (int n0 : starts) {
    const Eigen::Index i0 = n0 - spectrum.first();
    GapRow row;
    row.N0 = n0;
    row.gamma = gaps.tail(gaps.size() - i0).minCoeff();
    if (row.gamma > 0.0) row.min_horizon = 2.0 * std::numbers::pi / row.gamma;
    if (!rep.rows.empty() && row.gamma < rep.rows.back().gamma) rep.gamma_non_decreasing = false;
    rep.rows.push_back(row);
  }
  return rep;
}

using LComplex = std::complex<long double>;
using LCVector = Eigen::Matrix<LComplex, Eigen::Dynamic, 1>;
using LCMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

/// int_0^T exp(i delta s) ds, stable as delta -> 0.
template <typename Real>
std::complex<Real> exp_integral(Real delta, Real T) {
  const Real half = Real(0.5) * delta * T;
  const Real sinc = half == Real(0) ? Real(1) : std::sin(half) / half;
  return T * sinc * std::exp(std::complex<Real>(Real(0), half));
}

template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> gram_entries(const RVector& om,
                                                                                Real T_horizon) {
  const Eigen::Index N = om.size();
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> G(N, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    G(n, n) = T_horizon;
    for (Eigen::Index m = n + 1; m < N; ++m) {
      const Real delta = Real(om(n)) - Real(om(m));
      if (delta == Real(0))
        throw NumericalError("gram_matrix: duplicate frequencies make the Gram matrix singular");
      G(n, m) = exp_integral(delta, T_horizon);
      G(m, n) = std::conj(G(n, m));
    }
  }
  return G;
}

}  // namespace detail

/// G(n, m) = int_0^T exp(i (omega_n - omega_m) s) ds, Hermitian by construction.
inline CMatrix gram_matrix(const Spectrum& spectrum, double T_horizon) {
  if (!(T_horizon > 0.0)) throw RangeError("gram_matrix: horizon must be > 0");
  return detail::gram_entries<double>(spectrum.frequencies(), T_horizon);
}

/// Same matrix in extended precision.
inline LCMatrix gram_matrix_ext(const Spectrum& spectrum, double T_horizon) {
  if (!(T_horizon > 0.0)) throw RangeError("gram_matrix: horizon must be > 0");
  return detail::gram_entries<long double>(spectrum.frequencies(), T_horizon);
}

namespace detail {

inline LCVector moment_targets_ext(const CoeffVector& u0, const ControlProfile& B) {
  LCVector d(u0.size());
  for (Eigen::Index n = 0; n < u0.size(); ++n)
    d(n) = -LComplex(u0.coeffs(n)) / LComplex(B.b(n));
  return d;
}

}  // namespace detail

struct ControlPlan {
  double T_horizon = 1.0;
  CMatrix G;
  /// Moment targets d_n = -u0_n / b_n.
  CVector d;
  /// v(s) = sum_m c_m exp(-i omega_m s), rounded to double.
  CVector c;
  /// The coefficients as solved, in extended precision. Large Gram condition
  /// numbers make |c| big enough that double rounding alone perturbs the moments.
  LCVector c_ext;
  RVector omega;
  double gram_cond = 0.0;
  double control_norm = 0.0;

  Complex control_at(double s) const {
    LComplex v{0.0L, 0.0L};
    for (Eigen::Index m = 0; m < c_ext.size(); ++m)
      v += c_ext(m) * std::exp(LComplex(0.0L, -static_cast<long double>(omega(m)) * s));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
  }
};

/// Minimal-norm L^2(0, T) control steering u0 to zero.
inline ControlPlan minimal_norm_control(const CoeffVector& u0, const ControlProfile& B,
                                        const Spectrum& spectrum, double T_horizon,
                                        double max_cond = kDegenerateCondition) {
  if (u0.parity != spectrum.parity || u0.size() != spectrum.size())
    throw ShapeError("minimal_norm_control: state does not match the spectrum");
  detail::require_same_shape(B, spectrum, "minimal_norm_control");
  if (!check_condB(B).pass)
    throw ConfigError("minimal_norm_control: control profile violates condB");

  ControlPlan plan;
  plan.T_horizon = T_horizon;
  plan.G = gram_matrix(spectrum, T_horizon);
  plan.omega = spectrum.frequencies();
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(plan.G, Eigen::EigenvaluesOnly);
  const RVector ev = eig.eigenvalues();
  plan.gram_cond = ev(0) > 0.0 ? ev(ev.size() - 1) / ev(0) : std::numeric_limits<double>::infinity();
  if (!(plan.gram_cond <= max_cond)) {
    throw NumericalError("minimal_norm_control: Gram matrix condition " +
                         std::to_string(plan.gram_cond) + " too large at T = " +
                         std::to_string(T_horizon) + "; try a larger horizon");
  }
  plan.d = -u0.coeffs.cwiseQuotient(B.b);
  // Double-precision LU, residuals in extended precision.
  const LCMatrix G_ext = gram_matrix_ext(spectrum, T_horizon);
  const LCVector d_ext = detail::moment_targets_ext(u0, B);
  Eigen::PartialPivLU<CMatrix> lu(plan.G);
  plan.c_ext = lu.solve(plan.d).cast<LComplex>();
  for (int k = 0; k < 4; ++k) {
    const LCVector res = d_ext - G_ext * plan.c_ext;
    plan.c_ext += lu.solve(res.cast<Complex>()).cast<LComplex>();
  }
  plan.c = plan.c_ext.cast<Complex>();
  const long double energy = (plan.c_ext.adjoint() * G_ext * plan.c_ext)(0).real();
  plan.control_norm = std::sqrt(std::max(0.0, static_cast<double>(energy)));
  return plan;
}

/// Inverse Gram matrix: column m holds the coefficients of the biorthogonal g_m
/// on conj(f_k), so that int f_n g_m = delta_nm.
inline CMatrix biorthogonal_coefficients(const ControlPlan& plan) {
  return plan.G.inverse();
}

struct NullControlReport {
  /// |u(T)| / |u0| from the closed-form moments.
  double final_relative_norm = 0.0;
  /// Same quantity with the moments taken by composite Gauss-Legendre quadrature.
  double quadrature_relative_norm = 0.0;
  /// max_n |int f_n v - d_n| (closed form).
  double max_moment_residual = 0.0;
  /// max_n |closed-form moment - quadrature moment|.
  double max_quadrature_discrepancy = 0.0;
};

/// Integrates each mode exactly by Duhamel: u_n(T) = e^(lambda_n T) (u0_n + b_n int f_n v).
inline NullControlReport verify_null_control(const CoeffVector& u0, const ControlPlan& plan,
                                             const ControlProfile& B, const Spectrum& spectrum,
                                             double dt) {
  if (u0.size() != spectrum.size() || plan.c_ext.size() != spectrum.size())
    throw ShapeError("verify_null_control: size mismatch");
  if (!(dt > 0.0)) throw RangeError("verify_null_control: quadrature step must be > 0");
  const Eigen::Index N = spectrum.size();
  const double T = plan.T_horizon;

  const LCVector moments_ext = gram_matrix_ext(spectrum, T) * plan.c_ext;
  const CVector moments = moments_ext.cast<Complex>();

  using Rule = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> nodes, weights;
  const auto& xa = Rule::abscissa();
  const auto& wa = Rule::weights();
  for (std::size_t j = 0; j < xa.size(); ++j) {
    nodes.push_back(xa[j]);
    weights.push_back(wa[j]);
    if (xa[j] != 0.0) {
      nodes.push_back(-xa[j]);
      weights.push_back(wa[j]);
    }
  }
  const auto panels = static_cast<long>(std::ceil(T / dt - 1e-9));
  const double h = T / static_cast<double>(panels);
  CVector quad = CVector::Zero(N);
  for (long k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double s = mid + 0.5 * h * nodes[j];
      const Complex v = plan.control_at(s) * (0.5 * h * weights[j]);
      for (Eigen::Index n = 0; n < N; ++n) quad(n) += std::exp(-spectrum.values(n) * s) * v;
    }
  }

  NullControlReport rep;
  const double u0n = u0.coeffs.norm();
  CVector uT(N), uT_quad(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const Complex phase = std::exp(spectrum.values(n) * T);
    uT(n) = phase * (u0.coeffs(n) + B.b(n) * moments(n));
    uT_quad(n) = phase * (u0.coeffs(n) + B.b(n) * quad(n));
  }
  rep.final_relative_norm = u0n > 0.0 ? uT.norm() / u0n : uT.norm();
  rep.quadrature_relative_norm = u0n > 0.0 ? uT_quad.norm() / u0n : uT_quad.norm();
  rep.max_moment_residual = static_cast<double>(
      (moments_ext - detail::moment_targets_ext(u0, B)).cwiseAbs().maxCoeff());
  rep.max_quadrature_discrepancy = (moments - quad).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_CONTROLLABILITY_HPP
