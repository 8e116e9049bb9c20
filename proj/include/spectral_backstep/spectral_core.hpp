#ifndef SPECTRAL_BACKSTEP_SPECTRAL_CORE_HPP
#define SPECTRAL_BACKSTEP_SPECTRAL_CORE_HPP

// Spectra of skew-adjoint Fourier multipliers on the torus, parity sectors
// and Sobolev-weighted coefficient algebra.
//
// Every state is stored by its coefficients on the sine basis (odd sector,
// modes n = 1..N) or the cosine basis (even sector, modes n = 0..N). The
// H^r inner product weights mode n by n^r, with the constant mode n = 0
// weighted by 1.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "spectral_backstep/types.hpp"

namespace spectral_backstep {

enum class SystemKind { WaterWave, GenericMultiplier };

/// Built-in dispersion laws for the generic multiplier i h(|D|).
enum class MultiplierShape { PowerLaw, WaterWaveDispersion, Tabulated, Custom };

/// Physical or multiplier parameters that fix the spectrum.
struct SystemSpec {
  SystemKind kind = SystemKind::WaterWave;
  double g = 9.81;
  double depth = 1.0;
  /// Surface tension, normalised to one.
  double sigma = 1.0;
  /// Growth exponent of |h(s)| ~ s^alpha; only read for GenericMultiplier.
  double alpha = 1.5;
  MultiplierShape shape = MultiplierShape::PowerLaw;
  /// Tabulated h(n) for n = 0, 1, 2, ...
  std::vector<double> table;
  std::function<double(double)> custom;

  static SystemSpec water_wave(double g = 9.81, double depth = 1.0) {
    SystemSpec s;
    s.g = g;
    s.depth = depth;
    return s;
  }

  static SystemSpec power_law(double alpha) {
    SystemSpec s;
    s.kind = SystemKind::GenericMultiplier;
    s.shape = MultiplierShape::PowerLaw;
    s.alpha = alpha;
    return s;
  }

  /// The water-wave dispersion relation seen as a generic multiplier.
  static SystemSpec water_wave_multiplier(double g = 9.81, double depth = 1.0) {
    SystemSpec s;
    s.kind = SystemKind::GenericMultiplier;
    s.shape = MultiplierShape::WaterWaveDispersion;
    s.alpha = 1.5;
    s.g = g;
    s.depth = depth;
    return s;
  }

  static SystemSpec tabulated(double alpha, std::vector<double> values) {
    SystemSpec s;
    s.kind = SystemKind::GenericMultiplier;
    s.shape = MultiplierShape::Tabulated;
    s.alpha = alpha;
    s.table = std::move(values);
    return s;
  }

  static SystemSpec custom_multiplier(double alpha, std::function<double(double)> h) {
    SystemSpec s;
    s.kind = SystemKind::GenericMultiplier;
    s.shape = MultiplierShape::Custom;
    s.alpha = alpha;
    s.custom = std::move(h);
    return s;
  }

  /// Exponent alpha with |lambda_n| ~ n^alpha (3/2 for water waves).
  double growth_exponent() const {
    return kind == SystemKind::WaterWave ? 1.5 : alpha;
  }

  bool uses_water_wave_law() const {
    return kind == SystemKind::WaterWave || shape == MultiplierShape::WaterWaveDispersion;
  }

  void validate() const {
    if (sigma != 1.0) throw ConfigError("SystemSpec: surface tension sigma is fixed at 1");
    if (uses_water_wave_law()) {
      if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("SystemSpec: gravity g must be > 0");
      if (!(depth > 0.0) || !std::isfinite(depth))
        throw ConfigError("SystemSpec: depth must be > 0");
    }
    if (kind == SystemKind::GenericMultiplier) {
      if (!(alpha > 1.0) || !std::isfinite(alpha))
        throw ConfigError("SystemSpec: growth exponent alpha must be > 1");
      if (shape == MultiplierShape::Tabulated && table.empty())
        throw ConfigError("SystemSpec: tabulated multiplier has no values");
      if (shape == MultiplierShape::Custom && !custom)
        throw ConfigError("SystemSpec: custom multiplier has no callable");
    }
  }

  /// h(s) >= 0 such that lambda_n = -i h(n).
  double dispersion(double s) const {
    if (uses_water_wave_law()) {
      const double x = depth * s;
      // tanh saturates to 1 in double precision long before this point.
      const double th = x > 350.0 ? 1.0 : std::tanh(x);
      return std::sqrt(s * (g + sigma * s * s) * th);
    }
    switch (shape) {
      case MultiplierShape::PowerLaw:
        return std::pow(s, alpha);
      case MultiplierShape::Tabulated: {
        const auto n = static_cast<std::size_t>(std::llround(s));
        if (n >= table.size())
          throw RangeError("SystemSpec: tabulated multiplier has no value for n = " +
                           std::to_string(n));
        return table[n];
      }
      case MultiplierShape::Custom:
        return custom(s);
      case MultiplierShape::WaterWaveDispersion:
        break;
    }
    return 0.0;
  }
};

/// Admissible Sobolev indices (1/2 - alpha, alpha - 1/2).
inline std::pair<double, double> admissible_r_range(double alpha) {
  return {0.5 - alpha, alpha - 0.5};
}

inline void require_admissible_r(double r, double alpha, const char* op) {
  const auto [lo, hi] = admissible_r_range(alpha);
  if (!(r > lo && r < hi)) {
    throw RangeError(std::string(op) + ": Sobolev index r = " + std::to_string(r) +
                     " outside the admissible range (" + std::to_string(lo) + ", " +
                     std::to_string(hi) + ")");
  }
}

/// Weight of mode n in the H^r norm.
inline double sobolev_weight(int n, double r) {
  return n == 0 ? 1.0 : std::pow(static_cast<double>(n), r);
}

inline RVector sobolev_weights(Parity parity, Eigen::Index size, double r) {
  RVector w(size);
  const int first = first_mode(parity);
  for (Eigen::Index i = 0; i < size; ++i) w(i) = sobolev_weight(first + static_cast<int>(i), r);
  return w;
}

/// lambda_n = -i h(n); exactly zero real part by construction.
inline Complex eigenvalue(int n, const SystemSpec& spec) {
  spec.validate();
  if (n < 0) throw RangeError("eigenvalue: mode index must be >= 0");
  if (n == 0 && spec.uses_water_wave_law()) return {0.0, 0.0};
  return {0.0, -spec.dispersion(static_cast<double>(n))};
}

/// Truncated spectrum of one parity sector.
struct Spectrum {
  Parity parity = Parity::Odd;
  /// lambda at modes first_mode(parity) .. first_mode(parity) + size - 1.
  CVector values;
  /// Growth exponent of the generating multiplier.
  double alpha = 1.5;

  Eigen::Index size() const { return values.size(); }
  int first() const { return first_mode(parity); }
  int mode(Eigen::Index i) const { return first() + static_cast<int>(i); }
  /// Highest mode index (the truncation level N).
  int truncation() const { return mode(size() - 1); }

  RVector frequencies() const { return values.cwiseAbs(); }

  /// Raw spectrum from given values; invariants are not enforced.
  static Spectrum from_values(CVector values, Parity parity = Parity::Odd, double alpha = 1.5) {
    Spectrum s;
    s.parity = parity;
    s.values = std::move(values);
    s.alpha = alpha;
    return s;
  }

  /// Purely imaginary values with |lambda_n| strictly increasing for n >= 1.
  bool satisfies_invariants() const {
    double prev = -1.0;
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (values(i).real() != 0.0) return false;
      if (mode(i) == 0) continue;
      const double a = std::abs(values(i));
      if (!(a > prev)) return false;
      prev = a;
    }
    return true;
  }
};

/// Spectrum of the odd sector (modes 1..N) or even sector (modes 0..N).
inline Spectrum make_spectrum(const SystemSpec& spec, int N, Parity parity = Parity::Odd) {
  spec.validate();
  if (N < 1) throw RangeError("make_spectrum: truncation N must be >= 1");
  const int first = first_mode(parity);
  const int count = N - first + 1;
  CVector values(count);
  for (int i = 0; i < count; ++i) values(i) = eigenvalue(first + i, spec);
  return Spectrum::from_values(std::move(values), parity, spec.growth_exponent());
}

/// Coefficients of a state on the eigenbasis of one sector.
struct CoeffVector {
  Parity parity = Parity::Odd;
  double r = 0.0;
  CVector coeffs;

  Eigen::Index size() const { return coeffs.size(); }
  int mode(Eigen::Index i) const { return first_mode(parity) + static_cast<int>(i); }

  static CoeffVector zeros(Parity parity, Eigen::Index size, double r = 0.0) {
    return {parity, r, CVector::Zero(size)};
  }

  /// Unit coordinate vector phi_n.
  static CoeffVector unit(Parity parity, Eigen::Index size, int n, double r = 0.0) {
    CoeffVector v = zeros(parity, size, r);
    const Eigen::Index i = n - first_mode(parity);
    if (i < 0 || i >= size) throw ShapeError("CoeffVector::unit: mode out of range");
    v.coeffs(i) = 1.0;
    return v;
  }
};

inline Complex sobolev_inner(const CoeffVector& u, const CoeffVector& v, double r) {
  if (u.parity != v.parity) throw ShapeError("sobolev_inner: parity mismatch");
  if (u.size() != v.size()) throw ShapeError("sobolev_inner: mode count mismatch");
  const RVector w = sobolev_weights(u.parity, u.size(), r);
  Complex acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += w(i) * w(i) * u.coeffs(i) * std::conj(v.coeffs(i));
  return acc;
}

inline double sobolev_norm(const CoeffVector& u, double r) {
  return (sobolev_weights(u.parity, u.size(), r).cast<Complex>().asDiagonal() * u.coeffs).norm();
}

/// Split [c_0, s_1, c_1, s_2, c_2, ..., s_N, c_N] into sine and cosine parts.
inline std::pair<CoeffVector, CoeffVector> parity_decompose(const CVector& full, double r = 0.0) {
  if (full.size() % 2 == 0)
    throw ShapeError("parity_decompose: expected 2N + 1 interleaved coefficients");
  const Eigen::Index N = (full.size() - 1) / 2;
  CoeffVector odd = CoeffVector::zeros(Parity::Odd, N, r);
  CoeffVector even = CoeffVector::zeros(Parity::Even, N + 1, r);
  even.coeffs(0) = full(0);
  for (Eigen::Index n = 1; n <= N; ++n) {
    odd.coeffs(n - 1) = full(2 * n - 1);
    even.coeffs(n) = full(2 * n);
  }
  return {odd, even};
}

inline CVector parity_recombine(const CoeffVector& odd, const CoeffVector& even) {
  if (odd.parity != Parity::Odd || even.parity != Parity::Even)
    throw ShapeError("parity_recombine: expected (odd, even) pair");
  if (even.size() != odd.size() + 1) throw ShapeError("parity_recombine: mode count mismatch");
  const Eigen::Index N = odd.size();
  CVector full(2 * N + 1);
  full(0) = even.coeffs(0);
  for (Eigen::Index n = 1; n <= N; ++n) {
    full(2 * n - 1) = odd.coeffs(n - 1);
    full(2 * n) = even.coeffs(n);
  }
  return full;
}

/// Empirical constants of the multiplier hypotheses over 1 <= s <= N.
struct MultiplierConstants {
  /// min over n1 > n2 of |h(n1) - h(n2)| / (|n1 - n2| n1^(alpha-1)).
  double gap_lower = 0.0;
  /// min and max over s of |h(s)| / s^alpha.
  double growth_lower = 0.0;
  double growth_upper = 0.0;
};

struct ValidationReport {
  int N = 0;
  MultiplierConstants at_N;
  /// Same constants restricted to s <= N/2, used to detect drift to 0 or infinity.
  MultiplierConstants at_half_N;
  bool pass = false;
  std::string reason;
};

namespace detail {

inline MultiplierConstants multiplier_constants(const std::vector<double>& h, int M, double alpha) {
  MultiplierConstants c;
  c.gap_lower = std::numeric_limits<double>::infinity();
  c.growth_lower = std::numeric_limits<double>::infinity();
  c.growth_upper = 0.0;
  for (int s = 1; s <= M; ++s) {
    const double ratio = std::abs(h[s]) / std::pow(s, alpha);
    c.growth_lower = std::min(c.growth_lower, ratio);
    c.growth_upper = std::max(c.growth_upper, ratio);
    const double scale = std::pow(s, alpha - 1.0);
    for (int m = 1; m < s; ++m) {
      c.gap_lower = std::min(c.gap_lower, std::abs(h[s] - h[m]) / ((s - m) * scale));
    }
  }
  return c;
}

}  // namespace detail

/// Checks the growth and gap hypotheses on the multiplier numerically.
///
/// At finite N every constant is positive, so a hypothesis is also rejected
/// when its constant drifts by more than 25% between N/2 and N, which is how
/// a lower constant tending to zero (or an upper one tending to infinity)
/// shows up on a finite sample.
inline ValidationReport validate_multiplier(const SystemSpec& spec, int N) {
  if (spec.kind != SystemKind::GenericMultiplier)
    throw ConfigError("validate_multiplier: requires a generic multiplier spec");
  spec.validate();
  if (N < 2) throw RangeError("validate_multiplier: insufficient sample, need N >= 2");

  std::vector<double> h(N + 1);
  for (int s = 0; s <= N; ++s) h[s] = spec.dispersion(static_cast<double>(s));
  const double alpha = spec.growth_exponent();

  ValidationReport rep;
  rep.N = N;
  rep.at_N = detail::multiplier_constants(h, N, alpha);
  rep.at_half_N = detail::multiplier_constants(h, std::max(2, N / 2), alpha);

  constexpr double kDrift = 0.75;
  const auto positive_finite = [](double x) { return x > 0.0 && std::isfinite(x); };
  const MultiplierConstants& a = rep.at_N;
  const MultiplierConstants& b = rep.at_half_N;
  if (!positive_finite(a.gap_lower)) {
    rep.reason = "gap constant is not positive";
  } else if (!positive_finite(a.growth_lower) || !positive_finite(a.growth_upper)) {
    rep.reason = "growth ratio bounds are not positive and finite";
  } else if (N >= 8 && a.gap_lower < kDrift * b.gap_lower) {
    rep.reason = "gap constant decays toward 0 with N";
  } else if (N >= 8 && a.growth_lower < kDrift * b.growth_lower) {
    rep.reason = "lower growth ratio decays toward 0 with N";
  } else if (N >= 8 && a.growth_upper * kDrift > b.growth_upper) {
    rep.reason = "upper growth ratio grows without bound";
  } else {
    rep.pass = true;
  }
  return rep;
}

/// min over modes n > m >= 1 of |lambda_n - lambda_m| / ((n - m) sqrt(n)).
inline double gap_constant(const Spectrum& spectrum) {
  double best = std::numeric_limits<double>::infinity();
  int pairs = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const int n = spectrum.mode(i);
    if (n < 1) continue;
    const double root = std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < i; ++j) {
      const int m = spectrum.mode(j);
      if (m < 1) continue;
      best = std::min(best, std::abs(spectrum.values(i) - spectrum.values(j)) / ((n - m) * root));
      ++pairs;
    }
  }
  if (pairs == 0) throw RangeError("gap_constant: need at least two modes with n >= 1");
  return best;
}

/// Range of |lambda_n| / n^alpha over modes n >= 1.
inline std::pair<double, double> growth_ratio_range(const Spectrum& spectrum) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const int n = spectrum.mode(i);
    if (n < 1) continue;
    const double ratio = std::abs(spectrum.values(i)) / std::pow(n, spectrum.alpha);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

}  // namespace spectral_backstep

#endif  // SPECTRAL_BACKSTEP_SPECTRAL_CORE_HPP
