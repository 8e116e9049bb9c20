#ifndef SPECTRAL_BACKSTEP_HARNESS_ACCEPTANCE_HPP
#define SPECTRAL_BACKSTEP_HARNESS_ACCEPTANCE_HPP

// The acceptance criteria of the toolkit, each a self-contained numerical
// experiment with its tolerance fixed here. Shared by the acceptance test
// binary and the `acceptance` subcommand.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spectral_backstep/closed_loop.hpp"
#include "spectral_backstep/controllability.hpp"
#include "spectral_backstep/feedback_synthesis.hpp"
#include "spectral_backstep/harness/output.hpp"
#include "spectral_backstep/riesz_analysis.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep::harness {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace acceptance {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// printf-style formatting into a std::string.
template <typename... Args>
std::string fmt(const char* f, Args... args) {
  const int n = std::snprintf(nullptr, 0, f, args...);
  std::string s(static_cast<std::size_t>(n), '\0');
  std::snprintf(s.data(), s.size() + 1, f, args...);
  return s;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << (ok ? "" : "FAILED ") << what;
    pass = pass && ok;
  }
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Synthesis + closed-loop pole check for one system at N = 64.
inline void pole_shift_case(Check& c, const SystemSpec& spec, const char* label) {
  const auto t0 = std::chrono::steady_clock::now();
  const Spectrum sp = make_spectrum(spec, 64);
  const ControlProfile B = ControlProfile::unit_for(sp);
  const FeedbackGains gains = solve_feedback(B, sp, 1.0);
  const ClosedLoopMatrix mat = assemble_closed_loop(sp, B, gains, 0.0);
  const PoleShiftReport rep = pole_shift_report(mat);
  const double dt = seconds_since(t0);
  c.expect(rep.max_rel_mismatch <= 1e-8,
           fmt("%s max rel mismatch %.3e <= 1e-8", label, rep.max_rel_mismatch));
  c.expect(dt < 2.0, fmt("%s runtime %.3fs < 2s", label, dt));
}

inline CriterionResult c1_pole_shift() {
  Check c;
  pole_shift_case(c, SystemSpec::water_wave(), "water waves");
  return {1, "pole shift (water waves, N=64, lambda=1)", c.pass, c.detail.str()};
}

/// Closed loop, transform and seeded initial states for the decay criteria.
struct DecaySetup {
  Spectrum sp;
  ControlProfile B;
  FeedbackGains gains;
  TransformBundle bundle;
  ClosedLoopMatrix mat;
};

inline DecaySetup decay_setup(double lambda, double hr_index) {
  DecaySetup s;
  s.sp = make_spectrum(SystemSpec::water_wave(), 64);
  s.B = ControlProfile::unit_for(s.sp);
  s.gains = solve_feedback(s.B, s.sp, lambda);
  s.bundle = build_T(s.gains, s.B, s.sp, 0.0, false);
  s.mat = assemble_closed_loop(s.sp, s.B, s.gains, hr_index);
  return s;
}

inline CriterionResult c2_dnorm_decay(std::uint64_t seed) {
  Check c;
  const std::vector<double> grid = uniform_grid(6.0, 256);
  for (double lambda : {0.5, 1.0, 5.0}) {
    const DecaySetup s = decay_setup(lambda, 0.0);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const CoeffVector u0 = random_unit_state(Parity::Odd, 64, rng);
      const Trajectory traj = simulate(s.mat, u0, grid, &s.bundle);
      const double d0 = std::log(traj.norms.front().d);
      for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(std::log(traj.norms[i].d) + lambda * grid[i] - d0));
    }
    c.expect(worst <= 1e-6, fmt("lambda=%g max |log d + lambda t - log d0| %.3e <= 1e-6", lambda, worst));
  }
  return {2, "exact d-norm decay (N=64, 10 states)", c.pass, c.detail.str()};
}

inline CriterionResult c3_sobolev_decay(std::uint64_t seed) {
  Check c;
  for (double lambda : {0.5, 1.0, 5.0}) {
    const DecaySetup s = decay_setup(lambda, 0.5);
    const std::vector<double> grid = uniform_grid(6.0 / lambda, 256);
    std::mt19937_64 rng(seed);
    double worst_rel[2] = {0.0, 0.0};
    double worst_r2[2] = {1.0, 1.0};
    for (int trial = 0; trial < 10; ++trial) {
      const CoeffVector u0 = random_unit_state(Parity::Odd, 64, rng);
      const Trajectory traj = simulate(s.mat, u0, grid);
      const NormKind kinds[2] = {NormKind::L2, NormKind::Hr};
      for (int k = 0; k < 2; ++k) {
        const DecayFit fit = decay_rate(traj, kinds[k], 1.0 / lambda, 6.0 / lambda);
        worst_rel[k] = std::max(worst_rel[k], std::abs(fit.rate + lambda) / lambda);
        worst_r2[k] = std::min(worst_r2[k], fit.r2);
      }
    }
    const char* names[2] = {"L2", "H^0.5"};
    for (int k = 0; k < 2; ++k) {
      c.expect(worst_rel[k] <= 0.02 && worst_r2[k] >= 0.999,
               fmt("lambda=%g %s rate rel err %.4f <= 0.02, r2 %.5f >= 0.999", lambda, names[k],
                   worst_rel[k], worst_r2[k]));
    }
  }
  return {3, "Sobolev decay rate fits over [1/lambda, 6/lambda]", c.pass, c.detail.str()};
}

inline CriterionResult c4_gains() {
  Check c;
  const SystemSpec spec = SystemSpec::water_wave();
  const Spectrum sp256 = make_spectrum(spec, 256);
  const Spectrum sp512 = make_spectrum(spec, 512);
  const FeedbackGains g256 = solve_feedback(ControlProfile::unit_for(sp256), sp256, 1.0);
  const FeedbackGains g512 = solve_feedback(ControlProfile::unit_for(sp512), sp512, 1.0);

  const double max256 = g256.K.cwiseAbs().maxCoeff();
  const double max512 = g512.K.cwiseAbs().maxCoeff();
  c.expect(max512 <= 1.2 * max256, fmt("max|K| N=512 %.6f <= 1.2 x N=256 %.6f", max512, max256));

  double sup_all = 0.0, sup_16 = 0.0;
  for (Eigen::Index i = 0; i < g512.k.size(); ++i) {
    const double v = std::abs(g512.k(i)) * std::pow(static_cast<double>(i + 1), 0.4);
    sup_all = std::max(sup_all, v);
    if (i < 16) sup_16 = std::max(sup_16, v);
  }
  c.expect(sup_all <= 2.0 * sup_16, fmt("sup |k_n| n^0.4 %.4f <= 2 x sup_{n<=16} %.4f", sup_all, sup_16));

  double rel = 0.0;
  for (Eigen::Index i = 0; i < 128; ++i)
    rel = std::max(rel, std::abs(g512.K(i) - g256.K(i)) / std::abs(g256.K(i)));
  c.expect(rel <= 1e-4, fmt("K_n N=256 vs N=512 (n<=128) max rel diff %.3e <= 1e-4", rel));
  return {4, "gain boundedness, decay and truncation convergence", c.pass, c.detail.str()};
}

inline CriterionResult c5_riesz_stability() {
  Check c;
  const SystemSpec spec = SystemSpec::water_wave();
  const Spectrum sp128 = make_spectrum(spec, 128);
  const Spectrum sp256 = make_spectrum(spec, 256);
  for (double r : {-0.9, 0.0, 0.9}) {
    const RieszBounds a = riesz_bounds(build_riesz_family(sp128, 1.0, r));
    const RieszBounds b = riesz_bounds(build_riesz_family(sp256, 1.0, r));
    const double change = std::abs(b.cond - a.cond) / a.cond;
    c.expect(a.C1 > 0.0 && b.C1 > 0.0 && change <= 0.10,
             fmt("r=%g cond %.4f -> %.4f (change %.4f <= 0.10), sigma_min^2 %.4e, %.4e", r, a.cond,
                 b.cond, change, a.C1, b.C1));
  }
  return {5, "Riesz frame stability N=128 -> 256", c.pass, c.detail.str()};
}

inline CriterionResult c6_operator_equality(std::uint64_t seed) {
  Check c;
  {
    const Spectrum sp = make_spectrum(SystemSpec::water_wave(), 256);
    const ControlProfile B = ControlProfile::unit_for(sp);
    const FeedbackGains gains = solve_feedback(B, sp, 1.0);
    const TransformBundle tb = build_T(gains, B, sp, 0.0);
    const double res = operator_equality_residual(tb, gains, B, sp);
    const double norm_t = operator_norm(tb.T);
    c.expect(res <= 1e-10 * norm_t, fmt("N=256 residual %.3e <= 1e-10 |T| = %.3e", res, 1e-10 * norm_t));
  }
  {
    const Spectrum sp = make_spectrum(SystemSpec::water_wave(), 8);
    const ControlProfile B = ControlProfile::unit_for(sp);
    std::mt19937_64 rng(seed);
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const CoeffVector K = random_unit_state(Parity::Odd, 8, rng);
      const FeedbackGains gains = gains_from_K(K.coeffs, B, 1.0);
      const TransformBundle tb = build_T(gains, B, sp, 0.0);
      const double norm_t = operator_norm(tb.T);
      worst_ratio = std::max(worst_ratio, operator_equality_residual(tb, gains, B, sp) / norm_t);
    }
    c.expect(worst_ratio <= 1e-10, fmt("100 random gains N=8 max residual/|T| %.3e <= 1e-10", worst_ratio));
  }
  return {6, "operator equality TA + BK = (A - lambda)T", c.pass, c.detail.str()};
}

inline CriterionResult c7_null_control(std::uint64_t seed) {
  Check c;
  const Spectrum sp = make_spectrum(SystemSpec::water_wave(), 16);
  const ControlProfile B = ControlProfile::unit_for(sp);
  std::mt19937_64 rng(seed);
  const CoeffVector u0 = random_unit_state(Parity::Odd, 16, rng);
  const ControlPlan plan = minimal_norm_control(u0, B, sp, 1.0);
  const NullControlReport rep = verify_null_control(u0, plan, B, sp, 1.0 / 4096.0);
  c.expect(rep.final_relative_norm <= 1e-6, fmt("|u(T)|/|u0| %.3e <= 1e-6", rep.final_relative_norm));
  c.expect(rep.max_moment_residual <= 1e-10, fmt("moment residual %.3e <= 1e-10", rep.max_moment_residual));
  c.expect(rep.max_quadrature_discrepancy <= 1e-8,
           fmt("quadrature vs closed form %.3e <= 1e-8", rep.max_quadrature_discrepancy));
  c.expect(true, fmt("Gram cond %.3e, |v| %.4f", plan.gram_cond, plan.control_norm));
  return {7, "null controllability (N=16, T=1)", c.pass, c.detail.str()};
}

inline CriterionResult c8_gap_and_sums() {
  Check c;
  const SystemSpec spec = SystemSpec::water_wave();
  const double g128 = gap_constant(make_spectrum(spec, 128));
  const double g256 = gap_constant(make_spectrum(spec, 256));
  c.expect(g256 > 0.0 && std::abs(g256 - g128) / g128 <= 0.05,
           fmt("gap constant %.5f (N=128) -> %.5f (N=256)", g128, g256));
  for (double s : {-0.5, 0.0, 0.4}) {
    const double a = sum_bound_check(s, spec, 64).sup_ratio;
    const double b = sum_bound_check(s, spec, 128).sup_ratio;
    const double change = std::abs(b - a) / a;
    c.expect(std::isfinite(a) && std::isfinite(b) && change <= 0.15,
             fmt("s=%g sup ratio %.4f -> %.4f (change %.4f <= 0.15)", s, a, b, change));
  }
  return {8, "gap constant and sum estimates", c.pass, c.detail.str()};
}

inline CriterionResult c9_refinement_schedule() {
  Check c;
  const Spectrum sp = make_spectrum(SystemSpec::power_law(1.2), 256);
  const ControlProfile B = ControlProfile::unit_for(sp);
  const FeedbackGains gains = solve_feedback(B, sp, 1.0);
  const RefinementLayers layers = asymptotic_refinement(gains, sp, B, 16);
  bool schedule_ok = true;
  for (std::size_t i = 0; i < layers.schedule.size(); ++i)
    schedule_ok = schedule_ok && std::abs(layers.schedule[i] - (0.3 - 0.2 * i)) <= 1e-12;
  c.expect(schedule_ok, "schedule s_i = 0.3 - 0.2 i");
  c.expect(layers.M == 2, fmt("terminates at M = %d (expected 2)", layers.M));
  std::string sups;
  for (double v : layers.sup_k) sups += fmt("%s%.4f", sups.empty() ? "" : ", ", v);
  c.expect(layers.sup_non_increasing, "sup_n |k^i_n| non-increasing over i: " + sups);
  return {9, "layered gain refinement (alpha=1.2, N=256)", c.pass, c.detail.str()};
}

inline CriterionResult c10_general_alpha() {
  Check c;
  pole_shift_case(c, SystemSpec::power_law(1.2), "alpha=1.2");
  pole_shift_case(c, SystemSpec::power_law(2.0), "alpha=2");
  return {10, "pole shift for h(s)=s^alpha (N=64)", c.pass, c.detail.str()};
}

}  // namespace acceptance

inline constexpr int kCriterionCount = 10;

/// Runs one criterion (1..10); errors raised inside count as failures.
inline CriterionResult run_criterion(int id, std::uint64_t seed = acceptance::kDefaultSeed) {
  using namespace acceptance;
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult res;
  try {
    switch (id) {
      case 1: res = c1_pole_shift(); break;
      case 2: res = c2_dnorm_decay(seed); break;
      case 3: res = c3_sobolev_decay(seed); break;
      case 4: res = c4_gains(); break;
      case 5: res = c5_riesz_stability(); break;
      case 6: res = c6_operator_equality(seed); break;
      case 7: res = c7_null_control(seed); break;
      case 8: res = c8_gap_and_sums(); break;
      case 9: res = c9_refinement_schedule(); break;
      case 10: res = c10_general_alpha(); break;
      default: throw RangeError("acceptance: unknown criterion " + std::to_string(id));
    }
  } catch (const std::exception& e) {
    res.id = id;
    res.name = "criterion " + std::to_string(id);
    res.pass = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds = seconds_since(t0);
  return res;
}

inline std::vector<CriterionResult> run_acceptance(std::uint64_t seed = acceptance::kDefaultSeed) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, seed));
  return out;
}

inline std::string format_result(const CriterionResult& r) {
  return acceptance::fmt("[%s] %2d %s (%.2fs): %s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                         r.seconds, r.detail.c_str());
}

}  // namespace spectral_backstep::harness

#endif  // SPECTRAL_BACKSTEP_HARNESS_ACCEPTANCE_HPP
