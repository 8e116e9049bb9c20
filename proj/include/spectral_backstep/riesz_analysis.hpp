#ifndef SPECTRAL_BACKSTEP_RIESZ_ANALYSIS_HPP
#define SPECTRAL_BACKSTEP_RIESZ_ANALYSIS_HPP

// The resolvent-type family q_n = sum_p phi_p / (lambda_n - lambda_p + lambda),
// the operator S : n^-r phi_n -> n^-r q_n with its split S = Id/lambda + S_c,
// and the finite-N frame-bound and sum-estimate diagnostics around them.
//
// Matrices are expressed in H^r-orthonormal coordinates e_n = n^-r phi_n, so
// entry (p, n) carries the factor p^r n^-r.

#include <cmath>
#include <limits>
#include <vector>

#include "spectral_backstep/linalg.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep {

/// Coefficients of q_n on phi_p, truncated to the modes of the spectrum.
inline CoeffVector q_vector(int n, const Spectrum& spectrum, double lambda) {
  if (!(lambda > 0.0)) throw RangeError("q_vector: decay rate lambda must be > 0");
  const Eigen::Index col = n - spectrum.first();
  if (col < 0 || col >= spectrum.size()) throw RangeError("q_vector: mode outside truncation");
  CoeffVector q = CoeffVector::zeros(spectrum.parity, spectrum.size());
  const Complex ln = spectrum.values(col);
  for (Eigen::Index p = 0; p < spectrum.size(); ++p)
    q.coeffs(p) = 1.0 / (ln - spectrum.values(p) + lambda);
  // Exact diagonal: lambda_n - lambda_n vanishes identically.
  q.coeffs(col) = 1.0 / lambda;
  return q;
}

namespace detail {

/// Matrix with entry (p, n) = w_p / w_n / (lambda_n - lambda_p + lambda), w = n^r.
inline CMatrix weighted_resolvent_matrix(const Spectrum& spectrum, double lambda, double r) {
  const Eigen::Index N = spectrum.size();
  const RVector w = sobolev_weights(spectrum.parity, N, r);
  CMatrix m(N, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index p = 0; p < N; ++p) {
      const Complex denom = p == n ? Complex(lambda, 0.0)
                                   : spectrum.values(n) - spectrum.values(p) + lambda;
      m(p, n) = (w(p) / w(n)) / denom;
    }
  }
  return m;
}

}  // namespace detail

/// The family (n^-r q_n) as columns in H^r-orthonormal coordinates.
struct RieszFamily {
  Spectrum spectrum;
  double lambda = 1.0;
  double r = 0.0;
  CMatrix Q;

  Eigen::Index N() const { return Q.cols(); }
};

inline RieszFamily build_riesz_family(const Spectrum& spectrum, double lambda, double r) {
  if (!(lambda > 0.0)) throw RangeError("build_riesz_family: decay rate lambda must be > 0");
  return {spectrum, lambda, r, detail::weighted_resolvent_matrix(spectrum, lambda, r)};
}

/// S together with its compact part S_c = S - Id / lambda.
struct FredholmSplit {
  CMatrix S;
  CMatrix Sc;
  double r = 0.0;
  double lambda = 1.0;
  /// Smoothing gain of S_c from H^r into H^(r + epsilon).
  double epsilon = 0.1;
  Parity parity = Parity::Odd;
};

inline FredholmSplit build_S(const Spectrum& spectrum, double lambda, double r,
                             double epsilon = 0.1) {
  if (!(lambda > 0.0)) throw RangeError("build_S: decay rate lambda must be > 0");
  require_admissible_r(r, spectrum.alpha, "build_S");
  FredholmSplit split;
  split.S = detail::weighted_resolvent_matrix(spectrum, lambda, r);
  split.Sc = split.S;
  split.Sc.diagonal().setZero();
  split.r = r;
  split.lambda = lambda;
  split.epsilon = epsilon;
  split.parity = spectrum.parity;
  return split;
}

struct RieszBounds {
  /// sigma_min(Q)^2 and sigma_max(Q)^2.
  double C1 = 0.0;
  double C2 = 0.0;
  /// C2 / C1.
  double cond = std::numeric_limits<double>::infinity();
  bool degenerate = true;
};

/// Frame bounds of the columns of Q viewed as a family in an orthonormal frame.
/// Never throws; a rank-deficient Q yields C1 = 0 and the degeneracy flag.
inline RieszBounds riesz_bounds(const CMatrix& Q) {
  RieszBounds b;
  const RVector s = singular_values(Q);
  if (s.size() == 0) return b;
  b.C2 = s(0) * s(0);
  const double smin = s(s.size() - 1);
  // Below this the smallest singular value is rounding noise.
  const double floor = std::numeric_limits<double>::epsilon() * s(0) * static_cast<double>(s.size());
  if (!(smin > floor)) {
    b.C1 = 0.0;
    return b;
  }
  b.C1 = smin * smin;
  b.cond = b.C2 / b.C1;
  b.degenerate = !(s(0) / smin <= kDegenerateCondition);
  return b;
}

inline RieszBounds riesz_bounds(const RieszFamily& family) { return riesz_bounds(family.Q); }

/// Operator norm of D^epsilon S_c, D the diagonal of mode indices.
inline double compact_tail_diagnostic(const FredholmSplit& split, double epsilon) {
  const RVector d = sobolev_weights(split.parity, split.Sc.rows(), epsilon);
  return operator_norm(d.cast<Complex>().asDiagonal() * split.Sc);
}

struct SumBoundRow {
  int p = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct SumBoundTable {
  double s = 0.0;
  double alpha = 1.5;
  int p_max = 0;
  /// Oversampled truncation of the n-sum.
  int N_big = 0;
  std::vector<SumBoundRow> rows;
  double sup_ratio = 0.0;
};

/// Tabulates sum_{n != p} n^s / |lambda_n - lambda_p| against
/// p^(1 - alpha + s) log p + p^-alpha for p = 1..p_max, with the n-sum
/// truncated at 16 p_max.
inline SumBoundTable sum_bound_check(double s, const SystemSpec& spec, int p_max) {
  const double alpha = spec.growth_exponent();
  if (!(s < alpha - 1.0)) {
    throw HypothesisError("sum_bound_check: exponent s = " + std::to_string(s) +
                          " violates s < alpha - 1 = " + std::to_string(alpha - 1.0));
  }
  if (p_max < 1) throw RangeError("sum_bound_check: p_max must be >= 1");
  SumBoundTable t;
  t.s = s;
  t.alpha = alpha;
  t.p_max = p_max;
  t.N_big = 16 * p_max;
  const Spectrum sp = make_spectrum(spec, t.N_big, Parity::Odd);
  std::vector<double> ns(t.N_big);
  for (int n = 1; n <= t.N_big; ++n) ns[n - 1] = std::pow(static_cast<double>(n), s);

  t.rows.reserve(p_max);
  for (int p = 1; p <= p_max; ++p) {
    double lhs = 0.0;
    const Complex lp = sp.values(p - 1);
    for (int n = 1; n <= t.N_big; ++n) {
      if (n == p) continue;
      lhs += ns[n - 1] / std::abs(sp.values(n - 1) - lp);
    }
    const double pd = static_cast<double>(p);
    const double rhs = std::pow(pd, 1.0 - alpha + s) * std::log(pd) + std::pow(pd, -alpha);
    t.rows.push_back({p, lhs, rhs, lhs / rhs});
    t.sup_ratio = std::max(t.sup_ratio, lhs / rhs);
  }
  return t;
}

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_RIESZ_ANALYSIS_HPP
