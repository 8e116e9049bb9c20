#ifndef SPECTRAL_BACKSTEP_FEEDBACK_SYNTHESIS_HPP
#define SPECTRAL_BACKSTEP_FEEDBACK_SYNTHESIS_HPP

// Backstepping gains from the TB = B condition, the transform
// T = tau_K tau S, and the certificates that go with it.
//
// Notation: b_n are the coefficients of the control profile B on phi_n,
// K_n = K(phi_n) are the feedback gains and k_n = -(b_n K_n + lambda) their
// regular part. In unweighted coordinates
//
//   T(p, n) = (-K_n) b_p / (lambda_n - lambda_p + lambda).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spectral_backstep/linalg.hpp"
#include "spectral_backstep/riesz_analysis.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep {

/// Coefficients b_n of the control operator B in one parity sector.
struct ControlProfile {
  Parity parity = Parity::Odd;
  CVector b;

  Eigen::Index size() const { return b.size(); }
  double c1() const { return b.size() ? b.cwiseAbs().minCoeff() : 0.0; }
  double c2() const { return b.size() ? b.cwiseAbs().maxCoeff() : 0.0; }

  static ControlProfile unit(Parity parity, Eigen::Index size) {
    return {parity, CVector::Ones(size)};
  }

  /// b_n = 1 + amplitude sin(n).
  static ControlProfile sinusoidal(Parity parity, Eigen::Index size, double amplitude) {
    ControlProfile B{parity, CVector(size)};
    for (Eigen::Index i = 0; i < size; ++i)
      B.b(i) = 1.0 + amplitude * std::sin(static_cast<double>(first_mode(parity) + i));
    return B;
  }

  static ControlProfile from_values(Parity parity, CVector values) {
    return {parity, std::move(values)};
  }

  static ControlProfile unit_for(const Spectrum& s) { return unit(s.parity, s.size()); }
};

struct FeedbackGains {
  CVector K;
  /// k_n = -(b_n K_n + lambda).
  CVector k;
  double lambda = 1.0;
  /// Residual of the TB = B solve in the H^-3/4 weighted norm, relative to |b|.
  double relative_residual = 0.0;
  /// Reciprocal-condition based estimate for the weighted TB = B matrix.
  double condition_estimate = 0.0;
};

namespace detail {

inline void require_same_shape(const ControlProfile& B, const Spectrum& spectrum, const char* op) {
  if (B.parity != spectrum.parity) throw ShapeError(std::string(op) + ": parity mismatch");
  if (B.size() != spectrum.size()) throw ShapeError(std::string(op) + ": mode count mismatch");
}

/// Unweighted T(p, n) = (-K_n) b_p / (lambda_n - lambda_p + lambda).
inline CMatrix transform_matrix(const CVector& K, const ControlProfile& B, const Spectrum& spectrum,
                                double lambda) {
  const CMatrix Q = weighted_resolvent_matrix(spectrum, lambda, 0.0);
  return B.b.asDiagonal() * Q * (-K).asDiagonal();
}

}  // namespace detail

/// Solves TB = B for the gains.
///
/// Row p of the system reads sum_n x_n b_p / (lambda_n - lambda_p + lambda) = b_p
/// with x_n = -K_n b_n. The system is solved after the diagonal similarity to
/// H^-3/4 coordinates, which leaves K unchanged.
inline FeedbackGains solve_feedback(const ControlProfile& B, const Spectrum& spectrum,
                                    double lambda) {
  detail::require_same_shape(B, spectrum, "solve_feedback");
  if (!(lambda > 0.0)) throw RangeError("solve_feedback: decay rate lambda must be > 0");
  if (!(B.c1() > 0.0))
    throw ConfigError("solve_feedback: control profile violates condB (some b_n = 0)");

  const Eigen::Index N = spectrum.size();
  const RVector w = sobolev_weights(spectrum.parity, N, -0.75);
  // M(p, n) = b_p / (lambda_n - lambda_p + lambda), weighted as w_p M w_n^-1.
  const CMatrix M = B.b.asDiagonal() * detail::weighted_resolvent_matrix(spectrum, lambda, -0.75);
  const CVector rhs = w.cast<Complex>().asDiagonal() * B.b;

  FeedbackGains gains;
  gains.lambda = lambda;
  double cond = 0.0;
  const CVector y = solve_refined(M, rhs, "solve_feedback", kDegenerateCondition, 2, &cond);
  gains.condition_estimate = cond;
  gains.relative_residual = (M * y - rhs).norm() / rhs.norm();
  if (!(gains.relative_residual <= 1e-10)) {
    throw NumericalError("solve_feedback: TB = B residual " +
                         std::to_string(gains.relative_residual) + " exceeds 1e-10");
  }
  const CVector x = w.cast<Complex>().cwiseInverse().asDiagonal() * y;
  gains.K = -x.cwiseQuotient(B.b);
  gains.k = -(B.b.cwiseProduct(gains.K).array() + lambda).matrix();
  return gains;
}

/// Gains object for arbitrary K (used for wiring checks and K = 0 runs).
inline FeedbackGains gains_from_K(const CVector& K, const ControlProfile& B, double lambda) {
  FeedbackGains g;
  g.K = K;
  g.k = -(B.b.cwiseProduct(K).array() + lambda).matrix();
  g.lambda = lambda;
  return g;
}

/// k_n recomputed from the series
/// k_n = lambda sum_{m != n} K_m b_m / (lambda_m - lambda_n + lambda).
inline CVector k_from_series(const FeedbackGains& gains, const ControlProfile& B,
                             const Spectrum& spectrum) {
  detail::require_same_shape(B, spectrum, "k_from_series");
  const Eigen::Index N = spectrum.size();
  CVector k(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    Complex acc{0.0, 0.0};
    for (Eigen::Index m = 0; m < N; ++m) {
      if (m == n) continue;
      acc += gains.K(m) * B.b(m) / (spectrum.values(m) - spectrum.values(n) + gains.lambda);
    }
    k(n) = gains.lambda * acc;
  }
  return k;
}

/// T and its factors in H^r-orthonormal coordinates.
struct TransformBundle {
  CMatrix T;
  CMatrix S;
  /// Diagonal of tau, i.e. b.
  CVector tau;
  CMatrix tauK;
  double r = 0.0;
  Eigen::Index N = 0;
  Parity parity = Parity::Odd;
  double sigma_min = 0.0;
  double cond = std::numeric_limits<double>::infinity();
  /// max |T - tauK tau S| relative to max(1, max |T|).
  double factorization_residual = 0.0;

  /// T in unweighted phi coordinates.
  CMatrix unweighted_T() const {
    const RVector w = sobolev_weights(parity, N, r);
    return w.cwiseInverse().cast<Complex>().asDiagonal() * T * w.cast<Complex>().asDiagonal();
  }
};

/// Assembles T = tau_K tau S. tau_K is the operator acting as -K_n on the
/// basis (n^-r tau q_n), so in coordinates tau_K = Y diag(-K) Y^-1 with
/// Y = tau S.
inline TransformBundle build_T(const FeedbackGains& gains, const ControlProfile& B,
                               const Spectrum& spectrum, double r, bool with_svd = true) {
  detail::require_same_shape(B, spectrum, "build_T");
  if (gains.K.size() != spectrum.size()) throw ShapeError("build_T: gain count mismatch");
  require_admissible_r(r, spectrum.alpha, "build_T");

  TransformBundle tb;
  tb.r = r;
  tb.N = spectrum.size();
  tb.parity = spectrum.parity;
  tb.S = detail::weighted_resolvent_matrix(spectrum, gains.lambda, r);
  tb.tau = B.b;
  const CMatrix Y = B.b.asDiagonal() * tb.S;
  tb.T = Y * (-gains.K).asDiagonal();

  // tauK Y = T  <=>  Y^T tauK^T = T^T.
  Eigen::PartialPivLU<CMatrix> lu(Y.transpose());
  tb.tauK = lu.solve(tb.T.transpose()).transpose();
  const CMatrix recomposed = tb.tauK * tb.tau.asDiagonal() * tb.S;
  tb.factorization_residual = max_abs(tb.T - recomposed) / std::max(1.0, max_abs(tb.T));

  if (with_svd) {
    const Conditioning c = conditioning(tb.T);
    tb.sigma_min = c.sigma_min;
    tb.cond = c.cond;
  }
  return tb;
}

/// max over n of |(T A + B K - (A - lambda) T) phi_n| in the H^-3/4 norm.
inline double operator_equality_residual(const TransformBundle& bundle, const FeedbackGains& gains,
                                         const ControlProfile& B, const Spectrum& spectrum) {
  detail::require_same_shape(B, spectrum, "operator_equality_residual");
  if (bundle.N != spectrum.size() || gains.K.size() != spectrum.size())
    throw ShapeError("operator_equality_residual: truncation mismatch");
  const CMatrix T = bundle.unweighted_T();
  const CVector& l = spectrum.values;
  const Eigen::Index N = spectrum.size();
  const RVector w = sobolev_weights(spectrum.parity, N, -0.75);
  double worst = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    double col = 0.0;
    for (Eigen::Index p = 0; p < N; ++p) {
      const Complex res =
          l(n) * T(p, n) + B.b(p) * gains.K(n) - (l(p) - gains.lambda) * T(p, n);
      col += std::norm(w(p) * res);
    }
    worst = std::max(worst, std::sqrt(col));
  }
  return worst;
}

/// |T b - b| in H^(r_test).
inline double tbb_residual(const FeedbackGains& gains, const ControlProfile& B,
                           const Spectrum& spectrum, double r_test = -0.75) {
  detail::require_same_shape(B, spectrum, "tbb_residual");
  const CMatrix T = detail::transform_matrix(gains.K, B, spectrum, gains.lambda);
  const CVector diff = T * B.b - B.b;
  const RVector w = sobolev_weights(spectrum.parity, spectrum.size(), r_test);
  return (w.cast<Complex>().asDiagonal() * diff).norm();
}

struct GainLowerBound {
  /// Smallest mode with |b_n K_n| >= lambda / 2 for every later mode; -1 if none.
  int n0 = -1;
  double min_tail = 0.0;
  double min_all = 0.0;
};

inline GainLowerBound gain_lower_bound(const FeedbackGains& gains, const ControlProfile& B,
                                       const Spectrum& spectrum) {
  detail::require_same_shape(B, spectrum, "gain_lower_bound");
  const RVector bk = B.b.cwiseProduct(gains.K).cwiseAbs();
  GainLowerBound out;
  out.min_all = bk.minCoeff();
  Eigen::Index start = bk.size();
  while (start > 0 && bk(start - 1) >= gains.lambda / 2.0) --start;
  if (start < bk.size()) {
    out.n0 = spectrum.mode(start);
    out.min_tail = bk.tail(bk.size() - start).minCoeff();
  }
  return out;
}

/// Layered decomposition -K_n = e^0_n + ... + e^i_n + k^i_n.
struct RefinementLayers {
  /// s_i = (3/2 - alpha) + (1 - alpha) i for each computed layer.
  std::vector<double> schedule;
  std::vector<CVector> e;
  std::vector<CVector> k;
  std::vector<double> sup_k;
  /// First level with s_M < 0, or -1 when the depth cap was hit first.
  int M = -1;
  /// Whether sup_n |k^i_n| is non-increasing across the computed levels.
  bool sup_non_increasing = true;
  /// max over levels of |sum_j e^j + k^i + K|.
  double decomposition_residual = 0.0;
};

/// Smallest i with (3/2 - alpha) + (1 - alpha) i < 0.
inline int refinement_levels(double alpha) {
  const double s0 = 1.5 - alpha;
  int i = 0;
  while (s0 + (1.0 - alpha) * i >= 0.0) ++i;
  return i;
}

/// Splits the regular part of the gains into layers
///   e^(i+1)_n = -lambda sum_{m != n} e^i_m / (lambda_m - lambda_n + lambda)
/// (same map for k^(i+1)), starting from e^0 = lambda, k^0 = k. Requires b = 1.
inline RefinementLayers asymptotic_refinement(const FeedbackGains& gains, const Spectrum& spectrum,
                                              const ControlProfile& B, int depth) {
  detail::require_same_shape(B, spectrum, "asymptotic_refinement");
  if ((B.b.array() != Complex(1.0, 0.0)).any())
    throw ConfigError("asymptotic_refinement: unsupported normalization, requires b_n = 1");
  const double alpha = spectrum.alpha;
  if (!(alpha > 1.0 && alpha <= 1.5))
    throw RangeError("asymptotic_refinement: requires alpha in (1, 3/2]");
  if (depth < 0) throw RangeError("asymptotic_refinement: depth must be >= 0");

  const Eigen::Index N = spectrum.size();
  const double lambda = gains.lambda;
  CMatrix op(N, N);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index m = 0; m < N; ++m)
      op(n, m) = m == n ? Complex(0.0, 0.0)
                        : -lambda / (spectrum.values(m) - spectrum.values(n) + lambda);

  RefinementLayers out;
  const double s0 = 1.5 - alpha;
  CVector e_sum = CVector::Zero(N);
  CVector e = CVector::Constant(N, lambda);
  CVector k = gains.k;
  for (int i = 0;; ++i) {
    const double si = s0 + (1.0 - alpha) * i;
    out.schedule.push_back(si);
    out.e.push_back(e);
    out.k.push_back(k);
    out.sup_k.push_back(k.cwiseAbs().maxCoeff());
    e_sum += e;
    out.decomposition_residual =
        std::max(out.decomposition_residual, (e_sum + k + gains.K).cwiseAbs().maxCoeff());
    if (i > 0 && out.sup_k[i] > out.sup_k[i - 1]) out.sup_non_increasing = false;
    if (si < 0.0) {
      out.M = i;
      break;
    }
    if (i == depth) break;
    e = op * e;
    k = op * k;
  }
  return out;
}

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_FEEDBACK_SYNTHESIS_HPP
