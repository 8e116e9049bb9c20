#include <cmath>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "spectral_backstep/riesz_analysis.hpp"

using namespace spectral_backstep;

namespace {

Spectrum two_mode_spectrum() {
  return Spectrum::from_values((CVector(2) << Complex(0, -1), Complex(0, -4)).finished());
}

Spectrum water(int N) { return make_spectrum(SystemSpec::water_wave(), N); }

}  // namespace

TEST(QVector, SingleMode) {
  const CoeffVector q = q_vector(1, water(1), 2.0);
  ASSERT_EQ(q.size(), 1);
  EXPECT_EQ(q.coeffs(0), Complex(0.5, 0.0));
}

TEST(QVector, TwoModesByHand) {
  const CoeffVector q = q_vector(1, two_mode_spectrum(), 1.0);
  EXPECT_EQ(q.coeffs(0), Complex(1.0, 0.0));
  const Complex expected = 1.0 / Complex(1.0, 3.0);
  EXPECT_NEAR(std::abs(q.coeffs(1) - expected), 0.0, 1e-16);
}

TEST(QVector, DiagonalIsInverseLambda) {
  const Spectrum sp = water(20);
  for (int n = 1; n <= 20; ++n) EXPECT_EQ(q_vector(n, sp, 0.7).coeffs(n - 1), Complex(1.0 / 0.7, 0.0));
  EXPECT_THROW(q_vector(21, sp, 0.7), RangeError);
}

TEST(BuildS, SingleMode) {
  const FredholmSplit split = build_S(water(1), 4.0, 0.0);
  EXPECT_EQ(split.S(0, 0), Complex(0.25, 0.0));
  EXPECT_EQ(split.Sc(0, 0), Complex(0.0, 0.0));
}

TEST(BuildS, UnweightedEntriesAtZeroIndex) {
  const Spectrum sp = water(12);
  const FredholmSplit split = build_S(sp, 1.0, 0.0);
  for (int p = 0; p < 12; ++p)
    for (int n = 0; n < 12; ++n) {
      if (p == n) continue;
      const Complex expected = 1.0 / (sp.values(n) - sp.values(p) + 1.0);
      EXPECT_NEAR(std::abs(split.S(p, n) - expected), 0.0, 1e-16);
    }
}

TEST(BuildS, WeightedEntries) {
  const Spectrum sp = water(10);
  const double r = 0.6;
  const FredholmSplit split = build_S(sp, 1.5, r);
  for (int p = 1; p <= 10; ++p)
    for (int n = 1; n <= 10; ++n) {
      const Complex denom = p == n ? Complex(1.5, 0) : sp.values(n - 1) - sp.values(p - 1) + 1.5;
      const Complex expected = std::pow(double(p), r) * std::pow(double(n), -r) / denom;
      EXPECT_NEAR(std::abs(split.S(p - 1, n - 1) - expected), 0.0, 1e-14 * std::abs(expected));
    }
}

TEST(BuildS, FredholmSplit) {
  const FredholmSplit split = build_S(water(64), 2.0, -0.4);
  EXPECT_TRUE(split.Sc.diagonal().isZero(0.0));
  const CMatrix recomposed = split.Sc + CMatrix::Identity(64, 64) / 2.0;
  EXPECT_EQ(max_abs(recomposed - split.S), 0.0);
}

TEST(BuildS, AdmissibleRange) {
  EXPECT_THROW(build_S(water(8), 1.0, 1.0), RangeError);
  EXPECT_THROW(build_S(water(8), 1.0, -1.0), RangeError);
  EXPECT_NO_THROW(build_S(water(8), 1.0, 0.95));
  const Spectrum sp12 = make_spectrum(SystemSpec::power_law(1.2), 8);
  EXPECT_THROW(build_S(sp12, 1.0, 0.75), RangeError);
}

TEST(BuildS, SigmaMinPositiveAndStable) {
  double previous = 0.0;
  for (int N : {32, 64, 128, 256}) {
    const double smin = conditioning(build_S(water(N), 1.0, 0.0).S).sigma_min;
    EXPECT_GT(smin, 0.0) << N;
    if (N == 256) EXPECT_LE(std::abs(smin - previous) / previous, 0.10);
    previous = smin;
  }
  EXPECT_NEAR(previous, 0.3562, 5e-4);
}

TEST(RieszBounds, SingleColumn) {
  const RieszBounds b = riesz_bounds(build_riesz_family(water(1), 2.0, 0.0));
  EXPECT_NEAR(b.C1, 0.25, 1e-16);
  EXPECT_NEAR(b.C2, 0.25, 1e-16);
  EXPECT_FALSE(b.degenerate);
}

TEST(RieszBounds, UnitaryColumns) {
  EXPECT_NEAR(riesz_bounds(CMatrix::Identity(10, 10)).C1, 1.0, 1e-15);
  const CMatrix random = CMatrix::Random(12, 12);
  const CMatrix Q = Eigen::HouseholderQR<CMatrix>(random).householderQ();
  const RieszBounds b = riesz_bounds(Q);
  EXPECT_NEAR(b.C1, 1.0, 1e-12);
  EXPECT_NEAR(b.C2, 1.0, 1e-12);
  EXPECT_NEAR(b.cond, 1.0, 1e-12);
}

TEST(RieszBounds, RankDeficientFlagged) {
  CMatrix m = CMatrix::Random(6, 6);
  m.col(3) = m.col(1);
  const RieszBounds b = riesz_bounds(m);
  EXPECT_EQ(b.C1, 0.0);
  EXPECT_TRUE(b.degenerate);
}

TEST(RieszBounds, ConditionStableUnderRefinement) {
  const RieszBounds a = riesz_bounds(build_riesz_family(water(128), 1.0, 0.0));
  const RieszBounds b = riesz_bounds(build_riesz_family(water(256), 1.0, 0.0));
  EXPECT_TRUE(std::isfinite(b.cond));
  EXPECT_LE(std::abs(b.cond - a.cond) / a.cond, 0.10);
  EXPECT_NEAR(b.cond, 31.379, 5e-3);
}

TEST(RieszBounds, ConjugationDualityByRank) {
  // Entrywise conjugate of q_n with the roles of lambda_n and lambda_p swapped.
  const Spectrum sp = water(40);
  const CMatrix Q = build_riesz_family(sp, 1.0, 0.3).Q;
  CMatrix dual(40, 40);
  for (int p = 0; p < 40; ++p)
    for (int n = 0; n < 40; ++n) {
      const Complex denom = p == n ? Complex(1.0, 0) : sp.values(p) - sp.values(n) + 1.0;
      dual(p, n) = std::conj((std::pow(p + 1.0, 0.3) / std::pow(n + 1.0, 0.3)) / denom);
    }
  EXPECT_EQ(numerical_rank(Q), 40);
  EXPECT_EQ(numerical_rank(dual), numerical_rank(Q));
}

TEST(CompactTail, TrivialCases) {
  EXPECT_EQ(compact_tail_diagnostic(build_S(water(1), 1.0, 0.0), 0.1), 0.0);
  const FredholmSplit split = build_S(water(16), 1.0, 0.0);
  EXPECT_NEAR(compact_tail_diagnostic(split, 0.0), operator_norm(split.Sc), 1e-14);
}

TEST(CompactTail, BoundedAcrossTruncations) {
  // Truncations are principal submatrices, so the norm can only creep upward;
  // boundedness shows as growth within 5% per doubling.
  for (double eps : {0.05, 0.1, 0.2}) {
    double previous = 0.0;
    for (int N : {64, 128, 256}) {
      const double v = compact_tail_diagnostic(build_S(water(N), 1.0, 0.0), eps);
      EXPECT_TRUE(std::isfinite(v));
      if (previous > 0.0) EXPECT_LE(v, previous * 1.05) << "eps " << eps << " N " << N;
      previous = v;
    }
  }
}

TEST(SumBound, FirstRowByHand) {
  const SumBoundTable t = sum_bound_check(0.0, SystemSpec::water_wave(), 4);
  EXPECT_EQ(t.N_big, 64);
  double lhs = 0.0;
  for (int n = 2; n <= 64; ++n)
    lhs += 1.0 / std::abs(eigenvalue(n, SystemSpec::water_wave()) - eigenvalue(1, SystemSpec::water_wave()));
  EXPECT_NEAR(t.rows[0].lhs, lhs, 1e-13 * lhs);
  // p = 1: log 1 = 0, so the bound reduces to 1.
  EXPECT_NEAR(t.rows[0].rhs, 1.0, 1e-15);
}

TEST(SumBound, StableSupRatio) {
  const double a = sum_bound_check(0.4, SystemSpec::water_wave(), 64).sup_ratio;
  const double b = sum_bound_check(0.4, SystemSpec::water_wave(), 128).sup_ratio;
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_LE(std::abs(b - a) / a, 0.15);
}

TEST(SumBound, HypothesisEnforced) {
  EXPECT_THROW(sum_bound_check(0.6, SystemSpec::water_wave(), 8), HypothesisError);
  EXPECT_THROW(sum_bound_check(0.5, SystemSpec::water_wave(), 8), HypothesisError);
  EXPECT_THROW(sum_bound_check(0.2, SystemSpec::power_law(1.1), 8), HypothesisError);
}
