#ifndef SPECTRAL_BACKSTEP_HARNESS_COMMANDS_HPP
#define SPECTRAL_BACKSTEP_HARNESS_COMMANDS_HPP

// Subcommands of the command-line tool. Each one writes CSV artifacts under
// the output directory, prints a short summary and returns 0 when every
// invariant it checks holds, 1 otherwise. Module errors propagate.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "spectral_backstep/closed_loop.hpp"
#include "spectral_backstep/controllability.hpp"
#include "spectral_backstep/feedback_synthesis.hpp"
#include "spectral_backstep/harness/acceptance.hpp"
#include "spectral_backstep/harness/config.hpp"
#include "spectral_backstep/harness/output.hpp"
#include "spectral_backstep/riesz_analysis.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep::harness {

inline const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"spectrum", "riesz",   "feedback", "poleshift",
                                              "simulate", "control", "sweep",    "acceptance"};
  return names;
}

namespace detail {

/// Records invariant checks and prints the violated ones.
class InvariantLog {
 public:
  explicit InvariantLog(std::ostream& out) : out_(out) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      out_ << "invariant violated: " << what << '\n';
      failed_ = true;
    }
  }

  int status() const { return failed_ ? 1 : 0; }

 private:
  std::ostream& out_;
  bool failed_ = false;
};

inline OutputOptions with_dir(const OutputOptions& opts, const std::filesystem::path& dir) {
  OutputOptions o = opts;
  o.dir = dir;
  return o;
}

inline void write_effective_config(const RunConfig& cfg, const OutputOptions& opts) {
  std::filesystem::create_directories(opts.dir);
  std::ofstream out(opts.dir / "effective_config.json");
  if (!out) throw Error("cannot write effective_config.json in '" + opts.dir.string() + "'");
  out << to_json(cfg).dump(2) << '\n';
}

inline Spectrum config_spectrum(const RunConfig& cfg, int N) {
  return make_spectrum(cfg.system, N, cfg.parity);
}

/// Trajectory CSV: t, the three norms, then Re/Im of the first modes.
inline void write_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                             const Spectrum& sp, int dump_width, const OutputOptions& opts) {
  const auto width = std::min<Eigen::Index>(dump_width, sp.size());
  std::vector<std::string> cols{"t", "norm_L2", "norm_Hr", "norm_d"};
  for (Eigen::Index i = 0; i < width; ++i) {
    const std::string n = std::to_string(sp.mode(i));
    cols.push_back("re_u" + n);
    cols.push_back("im_u" + n);
  }
  CsvWriter csv(path, cols, opts);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    std::vector<double> row{traj.times[j], traj.norms[j].l2, traj.norms[j].hr, traj.norms[j].d};
    for (Eigen::Index i = 0; i < width; ++i) {
      row.push_back(traj.states[j].coeffs(i).real());
      row.push_back(traj.states[j].coeffs(i).imag());
    }
    csv.row(row);
  }
}

/// max over the grid of |log d(t) + lambda t - log d(0)|.
inline double d_norm_decay_error(const Trajectory& traj, double lambda) {
  const double d0 = std::log(traj.norms.front().d);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    worst = std::max(worst, std::abs(std::log(traj.norms[i].d) + lambda * traj.times[i] - d0));
  return worst;
}

struct SimulationRun {
  Spectrum sp;
  Trajectory traj;
  double decay_error = 0.0;
};

inline SimulationRun run_simulation(const RunConfig& cfg, double lambda, double horizon) {
  SimulationRun run;
  run.sp = config_spectrum(cfg, cfg.N);
  const ControlProfile B = make_profile(cfg, cfg.parity, run.sp.size());
  const FeedbackGains gains = solve_feedback(B, run.sp, lambda);
  const TransformBundle bundle = build_T(gains, B, run.sp, cfg.r, false);
  const ClosedLoopMatrix mat = assemble_closed_loop(run.sp, B, gains, cfg.hr_index);
  std::mt19937_64 rng(cfg.seed);
  const CoeffVector u0 = random_unit_state(cfg.parity, run.sp.size(), rng);
  run.traj = simulate(mat, u0, uniform_grid(horizon, cfg.sim_points), &bundle);
  run.decay_error = d_norm_decay_error(run.traj, lambda);
  return run;
}

inline int thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SPECTRAL_BACKSTEP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return cap;
}

}  // namespace detail

inline int cmd_spectrum(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  const Spectrum sp = detail::config_spectrum(cfg, cfg.N);
  {
    CsvWriter csv(opts.dir / "spectrum.csv", {"n", "re_lambda", "im_lambda", "omega"}, opts);
    const RVector om = sp.frequencies();
    for (Eigen::Index i = 0; i < sp.size(); ++i)
      csv.row({static_cast<double>(sp.mode(i)), sp.values(i).real(), sp.values(i).imag(), om(i)});
  }
  inv.check(sp.satisfies_invariants(), "spectrum: eigenvalues purely imaginary with increasing modulus");

  const GapReport gaps = ingham_gap_report(sp);
  {
    CsvWriter csv(opts.dir / "gaps.csv", {"N0", "gamma", "min_horizon"}, opts);
    for (const GapRow& row : gaps.rows) csv.row({static_cast<double>(row.N0), row.gamma, row.min_horizon});
  }
  inv.check(gaps.pass, "spectrum: adjacent frequency gap must be positive");
  const double gc = gap_constant(sp);
  const auto [lo, hi] = growth_ratio_range(sp);
  out << "modes " << sp.first() << ".." << sp.truncation() << ", alpha " << sp.alpha
      << ", gap constant " << format_number(gc) << ", |lambda_n|/n^alpha in [" << format_number(lo)
      << ", " << format_number(hi) << "]\n";

  if (cfg.system.kind == SystemKind::GenericMultiplier) {
    const ValidationReport rep = validate_multiplier(cfg.system, cfg.N);
    out << "multiplier hypotheses: " << (rep.pass ? "hold" : "violated") << " (gap_lower "
        << format_number(rep.at_N.gap_lower) << ", growth in [" << format_number(rep.at_N.growth_lower)
        << ", " << format_number(rep.at_N.growth_upper) << "])\n";
    inv.check(rep.pass, "spectrum: multiplier hypotheses: " + rep.reason);
  }
  return inv.status();
}

inline int cmd_riesz(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  require_admissible_r(cfg.r, cfg.system.growth_exponent(), "riesz");
  {
    CsvWriter csv(opts.dir / "riesz.csv", {"N", "C1", "C2", "cond", "tail_norm"}, opts);
    for (int N : {std::max(1, cfg.N / 2), cfg.N}) {
      const Spectrum sp = detail::config_spectrum(cfg, N);
      const RieszBounds b = riesz_bounds(build_riesz_family(sp, cfg.lambda, cfg.r));
      const double tail = compact_tail_diagnostic(build_S(sp, cfg.lambda, cfg.r), 0.1);
      csv.row({static_cast<double>(N), b.C1, b.C2, b.cond, tail});
      out << "N=" << N << " C1 " << format_number(b.C1) << " C2 " << format_number(b.C2) << " cond "
          << format_number(b.cond) << '\n';
      inv.check(b.C1 > 0.0 && !b.degenerate,
                "riesz: family degenerate at N=" + std::to_string(N));
    }
  }
  if (cfg.parity == Parity::Odd) {
    const int p_max = std::min(cfg.N, 128);
    const SumBoundTable t = sum_bound_check(cfg.sum_exponent, cfg.system, p_max);
    CsvWriter csv(opts.dir / "sum_bound.csv", {"p", "lhs", "rhs", "ratio"}, opts);
    for (const SumBoundRow& row : t.rows) csv.row({static_cast<double>(row.p), row.lhs, row.rhs, row.ratio});
    out << "sum bound s=" << t.s << " sup ratio " << format_number(t.sup_ratio) << '\n';
    inv.check(std::isfinite(t.sup_ratio), "riesz: sum bound ratio not finite");
  }
  return inv.status();
}

inline int cmd_feedback(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  const Spectrum sp = detail::config_spectrum(cfg, cfg.N);
  const ControlProfile B = make_profile(cfg, cfg.parity, sp.size());
  const FeedbackGains gains = solve_feedback(B, sp, cfg.lambda);
  {
    CsvWriter csv(opts.dir / "gains.csv", {"n", "re_K", "im_K", "re_k", "im_k"}, opts);
    for (Eigen::Index i = 0; i < sp.size(); ++i)
      csv.row({static_cast<double>(sp.mode(i)), gains.K(i).real(), gains.K(i).imag(),
               gains.k(i).real(), gains.k(i).imag()});
  }
  const TransformBundle tb = build_T(gains, B, sp, cfg.r);
  const double norm_t = operator_norm(tb.T);
  const double op_eq = operator_equality_residual(tb, gains, B, sp);
  const double tbb = tbb_residual(gains, B, sp);
  const GainLowerBound glb = gain_lower_bound(gains, B, sp);

  std::ofstream txt(opts.dir / "feedback.txt");
  auto line = [&](const std::string& key, double v) {
    txt << key << " = " << format_number(v) << '\n';
    out << key << " = " << format_number(v) << '\n';
  };
  if (opts.timestamp) txt << "# generated " << utc_timestamp() << '\n';
  txt << "# seed=" << opts.seed << '\n';
  line("lambda", cfg.lambda);
  line("solve_relative_residual", gains.relative_residual);
  line("solve_condition_estimate", gains.condition_estimate);
  line("tbb_residual", tbb);
  line("operator_equality_residual", op_eq);
  line("T_norm", norm_t);
  line("T_sigma_min", tb.sigma_min);
  line("T_cond", tb.cond);
  line("factorization_residual", tb.factorization_residual);
  line("max_abs_K", gains.K.cwiseAbs().maxCoeff());
  line("gain_floor_n0", glb.n0);

  const double alpha = sp.alpha;
  const bool unit_b = (B.b.array() == Complex(1.0, 0.0)).all();
  if (unit_b && alpha > 1.0 && alpha <= 1.5) {
    const RefinementLayers layers = asymptotic_refinement(gains, sp, B, cfg.refinement_depth);
    CsvWriter csv(opts.dir / "refinement.csv", {"level", "s", "sup_k"}, opts);
    for (std::size_t i = 0; i < layers.schedule.size(); ++i)
      csv.row({static_cast<double>(i), layers.schedule[i], layers.sup_k[i]});
    line("refinement_M", layers.M);
    line("refinement_sup_non_increasing", layers.sup_non_increasing ? 1.0 : 0.0);
    inv.check(layers.decomposition_residual <= 1e-8 * std::max(1.0, gains.K.cwiseAbs().maxCoeff()),
              "feedback: refinement layers do not sum to -K");
  }

  inv.check(tbb <= 1e-8 * B.b.norm(), "feedback: T B = B residual above 1e-8 |B|");
  inv.check(op_eq <= 1e-10 * norm_t, "feedback: operator equality residual above 1e-10 |T|");
  inv.check(tb.sigma_min > 0.0, "feedback: transform T is singular");
  return inv.status();
}

inline int cmd_poleshift(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  const Spectrum sp = detail::config_spectrum(cfg, cfg.N);
  const ControlProfile B = make_profile(cfg, cfg.parity, sp.size());
  const FeedbackGains gains = solve_feedback(B, sp, cfg.lambda);
  const PoleShiftReport rep = pole_shift_report(assemble_closed_loop(sp, B, gains, cfg.r));
  CsvWriter csv(opts.dir / "poleshift.csv",
                {"n", "re_eig", "im_eig", "re_target", "im_target", "abs_mismatch"}, opts);
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    csv.row({static_cast<double>(sp.mode(i)), rep.eigenvalues(i).real(), rep.eigenvalues(i).imag(),
             rep.targets(i).real(), rep.targets(i).imag(), std::abs(rep.mismatch(i))});
  out << "max abs mismatch " << format_number(rep.max_abs_mismatch) << ", max rel mismatch "
      << format_number(rep.max_rel_mismatch) << '\n';
  inv.check(rep.max_rel_mismatch <= 1e-8, "poleshift: closed-loop spectrum differs from lambda_n - lambda");
  return inv.status();
}

inline int cmd_simulate(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  const detail::SimulationRun run = detail::run_simulation(cfg, cfg.lambda, cfg.effective_horizon());
  detail::write_trajectory(opts.dir / "trajectory.csv", run.traj, run.sp, cfg.dump_width, opts);
  const double t1 = cfg.effective_horizon();
  const double t0 = std::min(1.0 / cfg.lambda, t1 / 2.0);
  const DecayFit l2 = decay_rate(run.traj, NormKind::L2, t0, t1);
  const DecayFit hr = decay_rate(run.traj, NormKind::Hr, t0, t1);
  out << "d-norm decay error " << format_number(run.decay_error) << ", L2 rate "
      << format_number(l2.rate) << " (r2 " << format_number(l2.r2) << "), H^" << cfg.hr_index
      << " rate " << format_number(hr.rate) << " (r2 " << format_number(hr.r2) << ")"
      << (run.traj.used_fallback ? ", matrix exponential fallback" : "") << '\n';
  inv.check(run.decay_error <= 1e-6, "simulate: |T u(t)| does not decay like exp(-lambda t)");
  return inv.status();
}

inline int cmd_control(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  const Spectrum sp = detail::config_spectrum(cfg, cfg.control_modes);
  const ControlProfile B = make_profile(cfg, cfg.parity, sp.size());
  std::mt19937_64 rng(cfg.seed);
  const CoeffVector u0 = random_unit_state(cfg.parity, sp.size(), rng);
  const ControlPlan plan = minimal_norm_control(u0, B, sp, cfg.T_horizon);
  const NullControlReport rep = verify_null_control(u0, plan, B, sp, cfg.effective_dt());
  {
    CsvWriter csv(opts.dir / "control_coefficients.csv", {"m", "re_c", "im_c"}, opts);
    for (Eigen::Index i = 0; i < plan.c.size(); ++i)
      csv.row({static_cast<double>(sp.mode(i)), plan.c(i).real(), plan.c(i).imag()});
  }
  {
    CsvWriter csv(opts.dir / "control_signal.csv", {"t", "re_v", "im_v"}, opts);
    for (double t : uniform_grid(cfg.T_horizon, 1025)) {
      const Complex v = plan.control_at(t);
      csv.row({t, v.real(), v.imag()});
    }
  }
  out << "Gram cond " << format_number(plan.gram_cond) << ", |v| " << format_number(plan.control_norm)
      << ", |u(T)|/|u0| " << format_number(rep.final_relative_norm) << ", moment residual "
      << format_number(rep.max_moment_residual) << ", quadrature discrepancy "
      << format_number(rep.max_quadrature_discrepancy) << '\n';
  inv.check(rep.final_relative_norm <= 1e-6, "control: final state not driven below 1e-6 |u0|");
  inv.check(rep.max_moment_residual <= 1e-10, "control: moment residual above 1e-10");
  inv.check(rep.max_quadrature_discrepancy <= 1e-8, "control: quadrature disagrees with closed form");
  return inv.status();
}

/// One simulation per lambda in sweep_lambdas, each in its own subdirectory,
/// plus summary.csv with the fitted L2 rate over [1/lambda, 6/lambda].
inline int cmd_sweep(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  const std::size_t count = cfg.sweep_lambdas.size();
  struct Outcome {
    double rate = 0.0;
    double decay_error = 0.0;
    std::string error;
  };
  std::vector<Outcome> outcomes(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const double lambda = cfg.sweep_lambdas[i];
      try {
        RunConfig sub = cfg;
        sub.lambda = lambda;
        char name[64];
        std::snprintf(name, sizeof name, "lambda_%zu", i);
        const OutputOptions sub_opts = detail::with_dir(opts, opts.dir / name);
        const double horizon = 6.0 / lambda;
        const detail::SimulationRun run = detail::run_simulation(sub, lambda, horizon);
        detail::write_trajectory(sub_opts.dir / "trajectory.csv", run.traj, run.sp, cfg.dump_width,
                                 sub_opts);
        detail::write_effective_config(sub, sub_opts);
        outcomes[i].rate = decay_rate(run.traj, NormKind::L2, 1.0 / lambda, horizon).rate;
        outcomes[i].decay_error = run.decay_error;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  const int threads = std::min<int>(detail::thread_cap(), static_cast<int>(count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < count; ++i)
    if (!outcomes[i].error.empty()) throw Error("sweep: lambda=" + format_number(cfg.sweep_lambdas[i]) +
                                                ": " + outcomes[i].error);

  CsvWriter csv(opts.dir / "summary.csv", {"lambda", "fitted_rate", "rel_err"}, opts);
  for (std::size_t i = 0; i < count; ++i) {
    const double lambda = cfg.sweep_lambdas[i];
    const double rel = std::abs(outcomes[i].rate + lambda) / lambda;
    csv.row({lambda, outcomes[i].rate, rel});
    out << "lambda=" << format_number(lambda) << " L2 rate " << format_number(outcomes[i].rate)
        << " rel err " << format_number(rel) << " d-norm decay error "
        << format_number(outcomes[i].decay_error) << '\n';
    inv.check(outcomes[i].decay_error <= 1e-6,
              "sweep: |T u(t)| does not decay like exp(-lambda t) at lambda=" + format_number(lambda));
  }
  return inv.status();
}

inline int cmd_acceptance(const RunConfig& cfg, const OutputOptions& opts, std::ostream& out) {
  detail::InvariantLog inv(out);
  CsvWriter csv(opts.dir / "acceptance.csv", {"criterion", "pass", "seconds"}, opts);
  for (int id = 1; id <= kCriterionCount; ++id) {
    const CriterionResult r = run_criterion(id, cfg.seed);
    out << format_result(r) << '\n';
    csv.row({static_cast<double>(r.id), r.pass ? 1.0 : 0.0, r.seconds});
    inv.check(r.pass, "acceptance: criterion " + std::to_string(id) + " failed");
  }
  return inv.status();
}

/// Dispatches by name and writes effective_config.json first.
inline int run_subcommand(const std::string& name, const RunConfig& cfg, const OutputOptions& opts,
                          std::ostream& out) {
  detail::write_effective_config(cfg, opts);
  if (name == "spectrum") return cmd_spectrum(cfg, opts, out);
  if (name == "riesz") return cmd_riesz(cfg, opts, out);
  if (name == "feedback") return cmd_feedback(cfg, opts, out);
  if (name == "poleshift") return cmd_poleshift(cfg, opts, out);
  if (name == "simulate") return cmd_simulate(cfg, opts, out);
  if (name == "control") return cmd_control(cfg, opts, out);
  if (name == "sweep") return cmd_sweep(cfg, opts, out);
  if (name == "acceptance") return cmd_acceptance(cfg, opts, out);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace spectral_backstep::harness

#endif  // SPECTRAL_BACKSTEP_HARNESS_COMMANDS_HPP
