#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "spectral_backstep/spectral_core.hpp"

using namespace spectral_backstep;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

double water_wave_frequency_hp(int n, double g, double depth) {
  const Big nb(n);
  const Big value = sqrt(nb * (Big(g) + nb * nb) * tanh(Big(depth) * nb));
  return value.convert_to<double>();
}

CoeffVector make_coeffs(Parity parity, std::initializer_list<Complex> values, double r = 0.0) {
  CoeffVector u = CoeffVector::zeros(parity, static_cast<Eigen::Index>(values.size()), r);
  Eigen::Index i = 0;
  for (const Complex& v : values) u.coeffs(i++) = v;
  return u;
}

}  // namespace

TEST(Eigenvalue, WaterWaveFirstModeMatchesHighPrecision) {
  const Complex l1 = eigenvalue(1, SystemSpec::water_wave());
  const double expected = water_wave_frequency_hp(1, 9.81, 1.0);
  EXPECT_EQ(l1.real(), 0.0);
  EXPECT_NEAR(l1.imag(), -expected, 1e-14 * expected);
  EXPECT_NEAR(-l1.imag(), 2.8692913455907, 1e-12);
}

TEST(Eigenvalue, WaterWaveAgreesWithHighPrecisionAcrossModes) {
  for (int n : {2, 5, 17, 100, 400, 1000}) {
    const double expected = water_wave_frequency_hp(n, 9.81, 1.0);
    EXPECT_NEAR(-eigenvalue(n, SystemSpec::water_wave()).imag(), expected, 1e-14 * expected) << n;
  }
}

TEST(Eigenvalue, EvenSectorZeroModeVanishes) {
  EXPECT_EQ(eigenvalue(0, SystemSpec::water_wave()), Complex(0.0, 0.0));
  const Spectrum even = make_spectrum(SystemSpec::water_wave(), 4, Parity::Even);
  EXPECT_EQ(even.size(), 5);
  EXPECT_EQ(even.values(0), Complex(0.0, 0.0));
}

TEST(Eigenvalue, PowerLaw) {
  EXPECT_NEAR(eigenvalue(4, SystemSpec::power_law(1.5)).imag(), -8.0, 1e-14);
  EXPECT_EQ(eigenvalue(4, SystemSpec::power_law(1.5)).real(), 0.0);
}

TEST(Eigenvalue, LargeModeSaturatesTanh) {
  const SystemSpec spec = SystemSpec::water_wave(9.81, 10.0);
  const double expected = std::sqrt(500.0 * (9.81 + 250000.0));
  EXPECT_NEAR(-eigenvalue(500, spec).imag(), expected, 1e-13 * expected);
}

TEST(SystemSpec, InvalidParametersRejected) {
  EXPECT_THROW(make_spectrum(SystemSpec::power_law(1.0), 4), ConfigError);
  EXPECT_THROW(make_spectrum(SystemSpec::water_wave(-1.0, 1.0), 4), ConfigError);
  EXPECT_THROW(make_spectrum(SystemSpec::water_wave(9.81, 0.0), 4), ConfigError);
}

TEST(AdmissibleRange, FollowsGrowthExponent) {
  const auto [lo, hi] = admissible_r_range(1.2);
  EXPECT_NEAR(lo, -0.7, 1e-15);
  EXPECT_NEAR(hi, 0.7, 1e-15);
  EXPECT_THROW(require_admissible_r(1.0, 1.5, "test"), RangeError);
  EXPECT_NO_THROW(require_admissible_r(0.99, 1.5, "test"));
}

TEST(Spectrum, InvariantsHold) {
  for (Parity p : {Parity::Odd, Parity::Even}) {
    const Spectrum sp = make_spectrum(SystemSpec::water_wave(), 256, p);
    EXPECT_TRUE(sp.satisfies_invariants());
    for (Eigen::Index i = 0; i < sp.size(); ++i) EXPECT_EQ(sp.values(i).real(), 0.0);
  }
  const Spectrum bad = Spectrum::from_values((CVector(2) << Complex(0, -2), Complex(0, -1)).finished());
  EXPECT_FALSE(bad.satisfies_invariants());
}

TEST(Spectrum, WaterWaveGrowthRatio) {
  const double delta = 0.05;
  for (int N : {32, 128, 512}) {
    const auto [lo, hi] = growth_ratio_range(make_spectrum(SystemSpec::water_wave(), N));
    EXPECT_GE(lo, std::sqrt(std::tanh(1.0)) * (1 - delta));
    EXPECT_LE(hi, std::sqrt(1 + 9.81) * (1 + delta));
  }
}

TEST(SobolevInner, UnitVectors) {
  const CoeffVector phi2 = CoeffVector::unit(Parity::Odd, 4, 2);
  const CoeffVector phi3 = CoeffVector::unit(Parity::Odd, 4, 3);
  EXPECT_NEAR(std::abs(sobolev_inner(phi2, phi2, 1.0) - 4.0), 0.0, 1e-15);
  EXPECT_EQ(sobolev_inner(phi2, phi3, 0.7), Complex(0.0, 0.0));
}

TEST(SobolevInner, HandComputed) {
  const CoeffVector u = make_coeffs(Parity::Odd, {{1, 0}, {0, 1}});
  const CoeffVector v = make_coeffs(Parity::Odd, {{1, 0}, {1, 0}});
  const Complex got = sobolev_inner(u, v, 0.5);
  EXPECT_NEAR(got.real(), 1.0, 1e-15);
  EXPECT_NEAR(got.imag(), 2.0, 1e-15);
}

TEST(SobolevInner, ConjugateSymmetricAndReducesAtZero) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  CoeffVector u = CoeffVector::zeros(Parity::Even, 9), v = CoeffVector::zeros(Parity::Even, 9);
  for (Eigen::Index i = 0; i < 9; ++i) {
    u.coeffs(i) = {nd(rng), nd(rng)};
    v.coeffs(i) = {nd(rng), nd(rng)};
  }
  const Complex uv = sobolev_inner(u, v, 0.3);
  const Complex vu = sobolev_inner(v, u, 0.3);
  EXPECT_NEAR(std::abs(uv - std::conj(vu)), 0.0, 1e-13);
  const Complex plain = v.coeffs.dot(u.coeffs);
  EXPECT_NEAR(std::abs(sobolev_inner(u, v, 0.0) - plain), 0.0, 1e-13);
  EXPECT_NEAR(sobolev_norm(u, 0.3) * sobolev_norm(u, 0.3), sobolev_inner(u, u, 0.3).real(), 1e-12);
}

TEST(SobolevInner, EvenZeroModeHasUnitWeight) {
  const CoeffVector phi0 = CoeffVector::unit(Parity::Even, 3, 0);
  EXPECT_NEAR(sobolev_norm(phi0, 0.9), 1.0, 1e-15);
  EXPECT_NEAR(sobolev_norm(phi0, -0.9), 1.0, 1e-15);
}

TEST(SobolevInner, MismatchRejected) {
  EXPECT_THROW(sobolev_inner(CoeffVector::zeros(Parity::Odd, 3), CoeffVector::zeros(Parity::Even, 3), 0),
               ShapeError);
  EXPECT_THROW(sobolev_inner(CoeffVector::zeros(Parity::Odd, 3), CoeffVector::zeros(Parity::Odd, 4), 0),
               ShapeError);
}

TEST(ParityDecompose, Routing) {
  // Layout [c0, s1, c1, s2, c2]: sin(x) + cos(2x).
  CVector full = CVector::Zero(5);
  full(1) = 1.0;
  full(4) = 1.0;
  const auto [odd, even] = parity_decompose(full);
  EXPECT_EQ(odd.coeffs, CoeffVector::unit(Parity::Odd, 2, 1).coeffs);
  EXPECT_EQ(even.coeffs, CoeffVector::unit(Parity::Even, 3, 2).coeffs);
}

TEST(ParityDecompose, PureSineHasNoEvenPart) {
  CVector full = CVector::Zero(7);
  full(1) = {0.3, -1.0};
  full(3) = 2.0;
  full(5) = {0.0, 4.0};
  const auto [odd, even] = parity_decompose(full);
  EXPECT_TRUE(even.coeffs.isZero(0.0));
  EXPECT_FALSE(odd.coeffs.isZero(0.0));
}

TEST(ParityDecompose, ZeroAndRoundTrip) {
  const auto [zo, ze] = parity_decompose(CVector::Zero(9));
  EXPECT_TRUE(zo.coeffs.isZero(0.0));
  EXPECT_TRUE(ze.coeffs.isZero(0.0));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  CVector full(21);
  for (Eigen::Index i = 0; i < full.size(); ++i) full(i) = {nd(rng), nd(rng)};
  const auto [odd, even] = parity_decompose(full);
  EXPECT_EQ(parity_recombine(odd, even), full);
  EXPECT_THROW(parity_decompose(CVector::Zero(4)), ShapeError);
}

TEST(ValidateMultiplier, PowerLawPasses) {
  const ValidationReport rep = validate_multiplier(SystemSpec::power_law(1.5), 64);
  EXPECT_TRUE(rep.pass) << rep.reason;
  EXPECT_NEAR(rep.at_N.growth_lower, 1.0, 1e-14);
  EXPECT_NEAR(rep.at_N.growth_upper, 1.0, 1e-14);
}

TEST(ValidateMultiplier, LogarithmFails) {
  const SystemSpec spec = SystemSpec::custom_multiplier(1.2, [](double s) { return std::log1p(s); });
  const ValidationReport rep = validate_multiplier(spec, 64);
  EXPECT_FALSE(rep.pass);
  // Independent scan: the lower growth ratio log(1 + s) / s^1.2 keeps shrinking.
  const double at_64 = std::log1p(64.0) / std::pow(64.0, 1.2);
  EXPECT_NEAR(rep.at_N.growth_lower, at_64, 1e-14);
}

TEST(ValidateMultiplier, WaterWaveDispersionPasses) {
  const ValidationReport rep = validate_multiplier(SystemSpec::water_wave_multiplier(), 256);
  EXPECT_TRUE(rep.pass) << rep.reason;
  const double floor = 0.9 * std::sqrt(std::tanh(1.0));
  EXPECT_GE(rep.at_N.gap_lower, floor);
  EXPECT_GE(rep.at_N.growth_lower, floor);
}

TEST(ValidateMultiplier, Preconditions) {
  EXPECT_THROW(validate_multiplier(SystemSpec::power_law(1.5), 1), RangeError);
  EXPECT_THROW(validate_multiplier(SystemSpec::water_wave(), 16), ConfigError);
}

TEST(ValidateMultiplier, TabulatedLookup) {
  std::vector<double> table;
  for (int n = 0; n <= 32; ++n) table.push_back(std::pow(n, 1.5));
  const SystemSpec spec = SystemSpec::tabulated(1.5, table);
  EXPECT_NEAR(eigenvalue(4, spec).imag(), -8.0, 1e-14);
  EXPECT_TRUE(validate_multiplier(spec, 32).pass);
}

TEST(GapConstant, TwoModes) {
  const Spectrum sp = Spectrum::from_values((CVector(2) << Complex(0, -1), Complex(0, -4)).finished());
  EXPECT_NEAR(gap_constant(sp), 3.0 / std::sqrt(2.0), 1e-15);
}

TEST(GapConstant, PowerLawAgainstPairScan) {
  const int N = 16;
  double scan = 1e300, adjacent = 1e300;
  for (int n = 2; n <= N; ++n) {
    for (int m = 1; m < n; ++m) {
      const double ratio = (std::pow(n, 1.5) - std::pow(m, 1.5)) / ((n - m) * std::sqrt(n));
      scan = std::min(scan, ratio);
      if (m == n - 1) adjacent = std::min(adjacent, ratio);
    }
  }
  const double c = gap_constant(make_spectrum(SystemSpec::power_law(1.5), N));
  EXPECT_NEAR(c, scan, 1e-13);
  // The minimum over all pairs cannot exceed the minimum over adjacent pairs.
  EXPECT_LE(c, adjacent);
}

TEST(GapConstant, WaterWavePositiveAndPinned) {
  const double c = gap_constant(make_spectrum(SystemSpec::water_wave(), 128));
  EXPECT_GT(c, 0.0);
  EXPECT_NEAR(c, 1.00618, 5e-5);
}

TEST(GapConstant, InvariantUnderConjugation) {
  const Spectrum sp = make_spectrum(SystemSpec::water_wave(), 64);
  const Spectrum neg = Spectrum::from_values(-sp.values);
  EXPECT_EQ(gap_constant(sp), gap_constant(neg));
}

TEST(GapConstant, NeedsTwoModes) {
  EXPECT_THROW(gap_constant(make_spectrum(SystemSpec::water_wave(), 1)), RangeError);
}
