#ifndef SPECTRAL_BACKSTEP_CLOSED_LOOP_HPP
#define SPECTRAL_BACKSTEP_CLOSED_LOOP_HPP

// Truncated closed loop u' = (A + B K) u, its spectrum, trajectories, and the
// three norms tracked along them (L^2, H^r and the transformed norm |T u|).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "spectral_backstep/feedback_synthesis.hpp"
#include "spectral_backstep/linalg.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep {

/// A + B K in H^r-orthonormal coordinates.
struct ClosedLoopMatrix {
  CMatrix A;
  CVector lambdas;
  double r = 0.0;
  double lambda = 1.0;
  Parity parity = Parity::Odd;

  Eigen::Index N() const { return A.rows(); }
  RVector weights() const { return sobolev_weights(parity, N(), r); }
};

/// Entry (p, n) = lambda_p delta_pn + b_p K_n, conjugated by diag(n^r).
inline ClosedLoopMatrix assemble_closed_loop(const Spectrum& spectrum, const ControlProfile& B,
                                             const FeedbackGains& gains, double r) {
  detail::require_same_shape(B, spectrum, "assemble_closed_loop");
  if (gains.K.size() != spectrum.size()) throw ShapeError("assemble_closed_loop: gain count mismatch");
  ClosedLoopMatrix mat;
  mat.lambdas = spectrum.values;
  mat.r = r;
  mat.lambda = gains.lambda;
  mat.parity = spectrum.parity;
  const RVector w = sobolev_weights(spectrum.parity, spectrum.size(), r);
  const CVector wb = w.cast<Complex>().cwiseProduct(B.b);
  const CVector Kw = gains.K.cwiseQuotient(w.cast<Complex>());
  mat.A = wb * Kw.transpose();
  mat.A.diagonal() += spectrum.values;
  return mat;
}

namespace detail {

inline void sort_by_imag(CVector& v) {
  std::sort(v.data(), v.data() + v.size(), [](const Complex& a, const Complex& b) {
    return a.imag() != b.imag() ? a.imag() > b.imag() : a.real() > b.real();
  });
}

}  // namespace detail

/// Eigenvalues of the closed loop, sorted by decreasing imaginary part.
inline CVector closed_loop_spectrum(const ClosedLoopMatrix& mat) {
  Eigen::ComplexEigenSolver<CMatrix> es(mat.A, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("closed_loop_spectrum: eigen-solver failed (condition " +
                         std::to_string(conditioning(mat.A).cond) + ")");
  CVector ev = es.eigenvalues();
  detail::sort_by_imag(ev);
  return ev;
}

struct PoleShiftReport {
  CVector eigenvalues;
  /// lambda_n - lambda, same ordering as eigenvalues.
  CVector targets;
  CVector mismatch;
  double max_abs_mismatch = 0.0;
  /// max_abs_mismatch / (1 + max |lambda_n|).
  double max_rel_mismatch = 0.0;
};

inline PoleShiftReport pole_shift_report(const ClosedLoopMatrix& mat) {
  PoleShiftReport rep;
  rep.eigenvalues = closed_loop_spectrum(mat);
  rep.targets = (mat.lambdas.array() - mat.lambda).matrix();
  detail::sort_by_imag(rep.targets);
  rep.mismatch = rep.eigenvalues - rep.targets;
  rep.max_abs_mismatch = rep.mismatch.cwiseAbs().maxCoeff();
  rep.max_rel_mismatch = rep.max_abs_mismatch / (1.0 + mat.lambdas.cwiseAbs().maxCoeff());
  return rep;
}

struct NormSample {
  double l2 = 0.0;
  double hr = 0.0;
  /// |T u| in H^(bundle r); NaN when no transform was supplied.
  double d = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<double> times;
  /// States on phi_n (unweighted coordinates).
  std::vector<CoeffVector> states;
  std::vector<NormSample> norms;
  /// Sobolev index of the hr column.
  double r = 0.0;
  bool used_fallback = false;
};

/// |T u| measured in H^r with the bundle's r.
inline double d_norm(const CoeffVector& u, const TransformBundle& bundle) {
  if (u.size() != bundle.N || u.parity != bundle.parity)
    throw ShapeError("d_norm: state does not match the transform");
  const RVector w = sobolev_weights(bundle.parity, bundle.N, bundle.r);
  return (bundle.T * (w.cast<Complex>().asDiagonal() * u.coeffs)).norm();
}

/// Propagates u0 through the closed loop on t_grid.
///
/// Uses the eigendecomposition of A + B K; if the eigenvector basis is worse
/// conditioned than 1e10, switches to the scaled-and-squared matrix exponential.
inline Trajectory simulate(const ClosedLoopMatrix& mat, const CoeffVector& u0,
                           const std::vector<double>& t_grid,
                           const TransformBundle* bundle = nullptr) {
  if (u0.size() != mat.N() || u0.parity != mat.parity)
    throw ShapeError("simulate: initial state does not match the closed loop");
  if (t_grid.empty() || t_grid.front() != 0.0) throw RangeError("simulate: t_grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw RangeError("simulate: t_grid must be increasing");

  Trajectory traj;
  traj.r = mat.r;
  traj.times = t_grid;
  const RVector w = mat.weights();
  const CVector x0 = w.cast<Complex>().asDiagonal() * u0.coeffs;

  std::vector<CVector> xs;
  xs.reserve(t_grid.size());
  Eigen::ComplexEigenSolver<CMatrix> es(mat.A, true);
  bool use_eig = es.info() == Eigen::Success;
  Eigen::PartialPivLU<CMatrix> lu;
  if (use_eig) {
    lu.compute(es.eigenvectors());
    const double rc = lu.rcond();
    use_eig = rc > 0.0 && 1.0 / rc <= 1e10;
  }
  if (use_eig) {
    const CVector c = lu.solve(x0);
    const CMatrix& V = es.eigenvectors();
    const CVector& ev = es.eigenvalues();
    for (double t : t_grid) xs.push_back(V * (ev.array() * t).exp().matrix().cwiseProduct(c));
  } else {
    traj.used_fallback = true;
    CVector x = x0;
    xs.push_back(x);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const CMatrix step = (mat.A * (t_grid[i] - t_grid[i - 1])).exp();
      x = step * x;
      xs.push_back(x);
    }
  }

  const RVector winv = w.cwiseInverse();
  for (const CVector& x : xs) {
    CoeffVector u{u0.parity, u0.r, winv.cast<Complex>().asDiagonal() * x};
    NormSample ns;
    ns.l2 = u.coeffs.norm();
    ns.hr = x.norm();
    if (bundle) ns.d = d_norm(u, *bundle);
    traj.norms.push_back(ns);
    traj.states.push_back(std::move(u));
  }
  return traj;
}

/// Uniform grid of `points` samples on [0, horizon].
inline std::vector<double> uniform_grid(double horizon, int points) {
  if (points < 2) throw RangeError("uniform_grid: need at least 2 points");
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = horizon * i / (points - 1);
  return t;
}

enum class NormKind { L2, Hr, Dnorm };

struct DecayFit {
  /// Least-squares slope of log-norm versus time.
  double rate = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

/// Fits log |u(t)| = a + rate t over the samples in [t0, t1]. Samples whose
/// norm has underflowed below 1e-300 end the window.
inline DecayFit decay_rate(const Trajectory& traj, NormKind kind, double t0, double t1) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < t0 || t > t1) continue;
    const NormSample& s = traj.norms[i];
    const double v = kind == NormKind::L2 ? s.l2 : kind == NormKind::Hr ? s.hr : s.d;
    if (!(v > 1e-300)) break;
    xs.push_back(t);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 8) throw RangeError("decay_rate: fewer than 8 usable samples in the window");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  DecayFit fit;
  fit.samples = static_cast<int>(xs.size());
  fit.rate = sxy / sxx;
  const double sse = syy - fit.rate * sxy;
  fit.r2 = syy > 0.0 ? 1.0 - std::max(0.0, sse) / syy : 1.0;
  return fit;
}

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_CLOSED_LOOP_HPP
