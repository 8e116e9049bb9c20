#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "spectral_backstep/controllability.hpp"
#include "spectral_backstep/harness/output.hpp"

using namespace spectral_backstep;
using spectral_backstep::harness::random_unit_state;

namespace {

Spectrum water(int N) { return make_spectrum(SystemSpec::water_wave(), N); }

Spectrum imaginary_spectrum(std::initializer_list<double> omegas) {
  CVector v(static_cast<Eigen::Index>(omegas.size()));
  Eigen::Index i = 0;
  for (double w : omegas) v(i++) = Complex(0.0, -w);
  return Spectrum::from_values(v);
}

}  // namespace

TEST(CondB, Profiles) {
  const CondBReport unit = check_condB(ControlProfile::unit(Parity::Odd, 8));
  EXPECT_TRUE(unit.pass);
  EXPECT_EQ(unit.c1, 1.0);
  EXPECT_EQ(unit.c2, 1.0);

  ControlProfile hole = ControlProfile::unit(Parity::Odd, 8);
  hole.b(2) = 0.0;
  EXPECT_FALSE(check_condB(hole).pass);

  const CondBReport sine = check_condB(ControlProfile::sinusoidal(Parity::Odd, 200, 0.5));
  EXPECT_TRUE(sine.pass);
  EXPECT_GE(sine.c1, 0.5);

  ControlProfile even = ControlProfile::unit(Parity::Even, 5);
  even.b(0) = 0.0;
  EXPECT_FALSE(check_condB(even).pass);
}

TEST(GapReport, WaterWave) {
  const GapReport rep = ingham_gap_report(water(64));
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.omega, 0.0);
  double g1 = 0.0, g32 = 0.0;
  for (const GapRow& row : rep.rows) {
    if (row.N0 == 1) g1 = row.gamma;
    if (row.N0 == 32) g32 = row.gamma;
    EXPECT_NEAR(row.min_horizon, 2 * std::numbers::pi / row.gamma, 1e-12);
  }
  EXPECT_GT(g32, g1);
  EXPECT_TRUE(rep.gamma_non_decreasing);
}

TEST(GapReport, UniformGaps) {
  const GapReport rep = ingham_gap_report(imaginary_spectrum({1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_NEAR(rep.omega, 1.0, 1e-15);
  for (const GapRow& row : rep.rows) EXPECT_NEAR(row.gamma, 1.0, 1e-15);
}

TEST(GapReport, DegenerateFrequencies) {
  const GapReport rep = ingham_gap_report(imaginary_spectrum({1, 1, 2}));
  EXPECT_EQ(rep.omega, 0.0);
  EXPECT_FALSE(rep.pass);
  EXPECT_THROW(ingham_gap_report(imaginary_spectrum({1, 2})), RangeError);
}

TEST(Gram, SingleMode) {
  const CMatrix G = gram_matrix(water(1), 2.5);
  ASSERT_EQ(G.rows(), 1);
  EXPECT_EQ(G(0, 0), Complex(2.5, 0.0));
}

TEST(Gram, FullPeriodOrthogonal) {
  const CMatrix G = gram_matrix(imaginary_spectrum({1.0, 1.0 + 2 * std::numbers::pi}), 1.0);
  EXPECT_NEAR(std::abs(G(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(G(1, 0)), 0.0, 1e-15);
}

TEST(Gram, ClosedFormAndQuadrature) {
  const Spectrum sp = water(6);
  const double T = 0.7;
  const CMatrix G = gram_matrix(sp, T);
  const RVector om = sp.frequencies();
  for (int n = 0; n < 6; ++n)
    for (int m = 0; m < 6; ++m) {
      if (n == m) continue;
      const double d = om(n) - om(m);
      const Complex closed = (std::exp(Complex(0, d * T)) - 1.0) / Complex(0, d);
      EXPECT_NEAR(std::abs(G(n, m) - closed), 0.0, 1e-14);
    }
}

TEST(Gram, HermitianPositiveDefinite) {
  const CMatrix G = gram_matrix(water(16), 1.0);
  EXPECT_LE(max_abs(G - G.adjoint()), 1e-14);
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(G);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  EXPECT_LE(max_abs(gram_matrix_ext(water(16), 1.0).cast<Complex>() - G), 1e-15);
}

TEST(Gram, DuplicateFrequencies) {
  EXPECT_THROW(gram_matrix(imaginary_spectrum({1, 1, 2}), 1.0), NumericalError);
  EXPECT_THROW(gram_matrix(water(3), 0.0), RangeError);
}

TEST(Control, ZeroState) {
  const Spectrum sp = water(8);
  const ControlProfile B = ControlProfile::unit_for(sp);
  const ControlPlan plan = minimal_norm_control(CoeffVector::zeros(Parity::Odd, 8), B, sp, 1.0);
  EXPECT_TRUE(plan.c.isZero(0.0));
  EXPECT_EQ(plan.control_norm, 0.0);
  EXPECT_EQ(plan.control_at(0.3), Complex(0.0, 0.0));
}

TEST(Control, SingleModeByHand) {
  const Spectrum sp = water(1);
  const ControlProfile B = ControlProfile::unit_for(sp);
  const CoeffVector u0 = CoeffVector::unit(Parity::Odd, 1, 1);
  const ControlPlan plan = minimal_norm_control(u0, B, sp, 1.0);
  EXPECT_NEAR(std::abs(plan.c(0) - Complex(-1.0, 0.0)), 0.0, 1e-15);
  const NullControlReport rep = verify_null_control(u0, plan, B, sp, 1.0 / 4096);
  EXPECT_LE(rep.final_relative_norm, 1e-12);
  EXPECT_LE(rep.quadrature_relative_norm, 1e-12);
}

TEST(Control, FreeEvolutionIsometric) {
  const Spectrum sp = water(8);
  const ControlProfile B = ControlProfile::unit_for(sp);
  std::mt19937_64 rng(1);
  const CoeffVector u0 = random_unit_state(Parity::Odd, 8, rng);
  ControlPlan idle;
  idle.T_horizon = 1.3;
  idle.omega = sp.frequencies();
  idle.c = CVector::Zero(8);
  idle.c_ext = LCVector::Zero(8);
  EXPECT_NEAR(verify_null_control(u0, idle, B, sp, 0.01).final_relative_norm, 1.0, 1e-14);
}

TEST(Control, WaterWaveN16) {
  const Spectrum sp = water(16);
  const ControlProfile B = ControlProfile::unit_for(sp);
  std::mt19937_64 rng(42);
  const CoeffVector u0 = random_unit_state(Parity::Odd, 16, rng);
  const ControlPlan plan = minimal_norm_control(u0, B, sp, 1.0);
  EXPECT_NEAR(plan.gram_cond, 4.601e7, 0.01e7);
  EXPECT_LE(plan.control_norm, 1000.0);
  const NullControlReport rep = verify_null_control(u0, plan, B, sp, 1.0 / 4096);
  EXPECT_LE(rep.final_relative_norm, 1e-6);
  EXPECT_LE(rep.max_moment_residual, 1e-10);
  EXPECT_LE(rep.max_quadrature_discrepancy, 1e-8);
}

TEST(Control, NonUnitProfile) {
  const Spectrum sp = water(12);
  const ControlProfile B = ControlProfile::sinusoidal(Parity::Odd, 12, 0.5);
  std::mt19937_64 rng(6);
  const CoeffVector u0 = random_unit_state(Parity::Odd, 12, rng);
  const ControlPlan plan = minimal_norm_control(u0, B, sp, 1.5);
  const NullControlReport rep = verify_null_control(u0, plan, B, sp, 1.5 / 4096);
  EXPECT_LE(rep.final_relative_norm, 1e-6);
  EXPECT_LE(rep.max_moment_residual, 1e-10);
}

TEST(Control, Linearity) {
  const Spectrum sp = water(10);
  const ControlProfile B = ControlProfile::unit_for(sp);
  std::mt19937_64 rng(13);
  CoeffVector u0 = random_unit_state(Parity::Odd, 10, rng);
  const ControlPlan a = minimal_norm_control(u0, B, sp, 1.0);
  u0.coeffs *= 2.0;
  const ControlPlan b = minimal_norm_control(u0, B, sp, 1.0);
  EXPECT_LE((b.c - 2.0 * a.c).norm(), 1e-9 * a.c.norm());
  EXPECT_NEAR(b.control_norm, 2.0 * a.control_norm, 1e-9 * a.control_norm);
}

TEST(Control, Errors) {
  const Spectrum sp = water(8);
  ControlProfile B = ControlProfile::unit_for(sp);
  const CoeffVector u0 = CoeffVector::unit(Parity::Odd, 8, 2);
  EXPECT_THROW(minimal_norm_control(u0, B, sp, 1.0, 10.0), NumericalError);
  EXPECT_THROW(minimal_norm_control(CoeffVector::unit(Parity::Odd, 7, 2), B, sp, 1.0), ShapeError);
  B.b(4) = 0.0;
  EXPECT_THROW(minimal_norm_control(u0, B, sp, 1.0), ConfigError);
}

TEST(Biorthogonal, DualToExponentials) {
  const Spectrum sp = water(8);
  const ControlProfile B = ControlProfile::unit_for(sp);
  const ControlPlan plan = minimal_norm_control(CoeffVector::unit(Parity::Odd, 8, 1), B, sp, 2.0);
  const CMatrix coeffs = biorthogonal_coefficients(plan);
  // int f_n g_m = sum_k coeffs(k, m) G(n, k) = delta_nm.
  EXPECT_LE(max_abs(plan.G * coeffs - CMatrix::Identity(8, 8)), 1e-8);
}
