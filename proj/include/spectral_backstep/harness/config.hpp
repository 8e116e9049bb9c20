#ifndef SPECTRAL_BACKSTEP_HARNESS_CONFIG_HPP
#define SPECTRAL_BACKSTEP_HARNESS_CONFIG_HPP

// Run configuration: a flat JSON object whose keys are listed in kKnownKeys.
// Missing keys take the defaults below; unknown keys are rejected.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral_backstep/feedback_synthesis.hpp"
#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep::harness {

class ConfigParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class BProfileKind { Unit, Table, Sinusoidal };

struct RunConfig {
  SystemSpec system;
  double lambda = 1.0;
  int N = 128;
  double r = 0.0;
  Parity parity = Parity::Odd;

  BProfileKind b_profile = BProfileKind::Unit;
  std::string b_table_path;
  double b_amplitude = 0.5;

  std::uint64_t seed = 42;
  std::string output_dir = "out";

  /// Simulation horizon; 0 means 6 / lambda.
  double sim_horizon = 0.0;
  int sim_points = 256;
  /// Sobolev index of the H^r column of trajectories.
  double hr_index = 0.5;
  int dump_width = 4;

  double T_horizon = 1.0;
  int control_modes = 16;
  /// Quadrature step for the control cross-check; 0 means T_horizon / 4096.
  double quadrature_dt = 0.0;

  double sum_exponent = 0.0;
  int refinement_depth = 8;
  std::vector<double> sweep_lambdas{0.5, 1.0, 5.0};

  std::pair<double, double> r_range() const {
    return admissible_r_range(system.growth_exponent());
  }
  double effective_horizon() const { return sim_horizon > 0.0 ? sim_horizon : 6.0 / lambda; }
  double effective_dt() const { return quadrature_dt > 0.0 ? quadrature_dt : T_horizon / 4096.0; }
};

inline const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "kind",         "g",           "depth",         "sigma",         "alpha",
      "h",            "h_table",     "lambda",        "N",             "r",
      "parity",       "b_profile",   "b_table",       "b_amplitude",   "seed",
      "output_dir",   "sim_horizon", "sim_points",    "hr_index",      "dump_width",
      "T_horizon",    "control_modes", "quadrature_dt", "sum_exponent", "refinement_depth",
      "sweep_lambdas"};
  return keys;
}

namespace detail {

using nlohmann::json;

template <typename T>
T read_key(const json& doc, const std::string& key, T fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigParseError("");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw ConfigParseError("");
      for (const auto& e : v)
        if (!e.is_number()) throw ConfigParseError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigParseError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
          throw ConfigParseError("");
      }
    } else {
      if (!v.is_number()) throw ConfigParseError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigParseError("config key '" + key + "': type mismatch (got " +
                           std::string(v.type_name()) + ")");
  }
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigParseError("config key '" + key + "': " + what);
}

}  // namespace detail

/// Parses and validates a configuration document. Empty text yields all defaults.
inline RunConfig parse_config(const std::string& text) {
  using nlohmann::json;
  json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigParseError(std::string("config: malformed document: ") + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigParseError("config: top level must be an object");
  const auto& known = known_config_keys();
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigParseError("config key '" + key + "': unknown key");
  }

  using detail::read_key;
  using detail::require;
  RunConfig cfg;

  const std::string kind = read_key<std::string>(doc, "kind", "water_wave");
  require(kind == "water_wave" || kind == "generic_multiplier", "kind",
          "expected 'water_wave' or 'generic_multiplier'");
  SystemSpec& sys = cfg.system;
  sys.kind = kind == "water_wave" ? SystemKind::WaterWave : SystemKind::GenericMultiplier;
  sys.g = read_key(doc, "g", sys.g);
  sys.depth = read_key(doc, "depth", sys.depth);
  sys.sigma = read_key(doc, "sigma", sys.sigma);
  sys.alpha = read_key(doc, "alpha", sys.alpha);
  const std::string h = read_key<std::string>(doc, "h", "power");
  require(h == "power" || h == "water_wave" || h == "table", "h",
          "expected 'power', 'water_wave' or 'table'");
  sys.shape = h == "power"        ? MultiplierShape::PowerLaw
              : h == "water_wave" ? MultiplierShape::WaterWaveDispersion
                                  : MultiplierShape::Tabulated;
  sys.table = read_key(doc, "h_table", std::vector<double>{});

  require(sys.g > 0.0, "g", "must be > 0");
  require(sys.depth > 0.0, "depth", "must be > 0");
  require(sys.sigma == 1.0, "sigma", "surface tension is fixed at 1");
  if (sys.kind == SystemKind::GenericMultiplier) {
    require(sys.alpha > 1.0, "alpha", "must be > 1");
    if (sys.shape == MultiplierShape::WaterWaveDispersion)
      require(sys.alpha == 1.5, "alpha", "water-wave dispersion grows with alpha = 1.5");
    if (sys.shape == MultiplierShape::Tabulated)
      require(!sys.table.empty(), "h_table", "required when h = 'table'");
  } else {
    require(!doc.contains("alpha") || sys.alpha == 1.5, "alpha",
            "water waves grow with alpha = 1.5");
    sys.alpha = 1.5;
  }

  cfg.lambda = read_key(doc, "lambda", cfg.lambda);
  require(cfg.lambda > 0.0, "lambda", "decay rate must be > 0");
  cfg.N = read_key(doc, "N", cfg.N);
  require(cfg.N >= 1 && cfg.N <= 4096, "N", "must be in [1, 4096]");
  if (sys.shape == MultiplierShape::Tabulated && sys.kind == SystemKind::GenericMultiplier)
    require(static_cast<int>(sys.table.size()) > cfg.N, "h_table", "needs values for n = 0..N");
  cfg.r = read_key(doc, "r", cfg.r);
  const auto [rlo, rhi] = cfg.r_range();
  require(cfg.r > rlo && cfg.r < rhi, "r",
          "must lie in (" + std::to_string(rlo) + ", " + std::to_string(rhi) + ")");
  const std::string parity = read_key<std::string>(doc, "parity", "odd");
  require(parity == "odd" || parity == "even", "parity", "expected 'odd' or 'even'");
  cfg.parity = parity == "odd" ? Parity::Odd : Parity::Even;

  const std::string bp = read_key<std::string>(doc, "b_profile", "unit");
  require(bp == "unit" || bp == "table" || bp == "sinusoidal", "b_profile",
          "expected 'unit', 'table' or 'sinusoidal'");
  cfg.b_profile = bp == "unit" ? BProfileKind::Unit
                  : bp == "table" ? BProfileKind::Table
                                  : BProfileKind::Sinusoidal;
  cfg.b_table_path = read_key<std::string>(doc, "b_table", "");
  if (cfg.b_profile == BProfileKind::Table)
    require(!cfg.b_table_path.empty(), "b_table", "required when b_profile = 'table'");
  cfg.b_amplitude = read_key(doc, "b_amplitude", cfg.b_amplitude);
  require(cfg.b_amplitude >= 0.0 && cfg.b_amplitude < 1.0, "b_amplitude", "must be in [0, 1)");

  cfg.seed = read_key<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.output_dir = read_key<std::string>(doc, "output_dir", cfg.output_dir);
  require(!cfg.output_dir.empty(), "output_dir", "must not be empty");

  cfg.sim_horizon = read_key(doc, "sim_horizon", cfg.sim_horizon);
  require(cfg.sim_horizon >= 0.0, "sim_horizon", "must be >= 0 (0 selects 6 / lambda)");
  cfg.sim_points = read_key(doc, "sim_points", cfg.sim_points);
  require(cfg.sim_points >= 8, "sim_points", "must be >= 8");
  cfg.hr_index = read_key(doc, "hr_index", cfg.hr_index);
  require(cfg.hr_index > rlo && cfg.hr_index < rhi, "hr_index", "outside the admissible r range");
  cfg.dump_width = read_key(doc, "dump_width", cfg.dump_width);
  require(cfg.dump_width >= 0, "dump_width", "must be >= 0");

  cfg.T_horizon = read_key(doc, "T_horizon", cfg.T_horizon);
  require(cfg.T_horizon > 0.0, "T_horizon", "must be > 0");
  cfg.control_modes = read_key(doc, "control_modes", cfg.control_modes);
  require(cfg.control_modes >= 1 && cfg.control_modes <= 256, "control_modes",
          "must be in [1, 256]");
  cfg.quadrature_dt = read_key(doc, "quadrature_dt", cfg.quadrature_dt);
  require(cfg.quadrature_dt >= 0.0, "quadrature_dt", "must be >= 0 (0 selects T / 4096)");

  cfg.sum_exponent = read_key(doc, "sum_exponent", cfg.sum_exponent);
  require(cfg.sum_exponent < sys.growth_exponent() - 1.0, "sum_exponent",
          "must be < alpha - 1");
  cfg.refinement_depth = read_key(doc, "refinement_depth", cfg.refinement_depth);
  require(cfg.refinement_depth >= 0, "refinement_depth", "must be >= 0");
  cfg.sweep_lambdas = read_key(doc, "sweep_lambdas", cfg.sweep_lambdas);
  require(!cfg.sweep_lambdas.empty(), "sweep_lambdas", "must not be empty");
  for (double l : cfg.sweep_lambdas) require(l > 0.0, "sweep_lambdas", "entries must be > 0");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Fully expanded configuration, suitable for re-parsing.
inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  const SystemSpec& s = cfg.system;
  j["kind"] = s.kind == SystemKind::WaterWave ? "water_wave" : "generic_multiplier";
  j["g"] = s.g;
  j["depth"] = s.depth;
  j["sigma"] = s.sigma;
  j["alpha"] = s.growth_exponent();
  j["h"] = s.shape == MultiplierShape::PowerLaw              ? "power"
           : s.shape == MultiplierShape::WaterWaveDispersion ? "water_wave"
                                                             : "table";
  if (!s.table.empty()) j["h_table"] = s.table;
  j["lambda"] = cfg.lambda;
  j["N"] = cfg.N;
  j["r"] = cfg.r;
  j["parity"] = to_string(cfg.parity);
  j["b_profile"] = cfg.b_profile == BProfileKind::Unit    ? "unit"
                   : cfg.b_profile == BProfileKind::Table ? "table"
                                                          : "sinusoidal";
  if (!cfg.b_table_path.empty()) j["b_table"] = cfg.b_table_path;
  j["b_amplitude"] = cfg.b_amplitude;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["sim_horizon"] = cfg.sim_horizon;
  j["sim_points"] = cfg.sim_points;
  j["hr_index"] = cfg.hr_index;
  j["dump_width"] = cfg.dump_width;
  j["T_horizon"] = cfg.T_horizon;
  j["control_modes"] = cfg.control_modes;
  j["quadrature_dt"] = cfg.quadrature_dt;
  j["sum_exponent"] = cfg.sum_exponent;
  j["refinement_depth"] = cfg.refinement_depth;
  j["sweep_lambdas"] = cfg.sweep_lambdas;
  return j;
}

/// Reads b_n from a text file: one "re [im]" pair per line, '#' starts a comment.
inline CVector read_b_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("config key 'b_table': cannot open '" + path + "'");
  std::vector<Complex> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re)) continue;
    ls >> im;
    vals.emplace_back(re, im);
  }
  CVector b(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) b(static_cast<Eigen::Index>(i)) = vals[i];
  return b;
}

/// Control profile for a sector with `size` modes.
inline ControlProfile make_profile(const RunConfig& cfg, Parity parity, Eigen::Index size) {
  switch (cfg.b_profile) {
    case BProfileKind::Unit:
      return ControlProfile::unit(parity, size);
    case BProfileKind::Sinusoidal:
      return ControlProfile::sinusoidal(parity, size, cfg.b_amplitude);
    case BProfileKind::Table: {
      const CVector b = read_b_table(cfg.b_table_path);
      if (b.size() < size)
        throw ConfigParseError("config key 'b_table': has " + std::to_string(b.size()) +
                               " values, need " + std::to_string(size));
      return ControlProfile::from_values(parity, b.head(size));
    }
  }
  return ControlProfile::unit(parity, size);
}

}  // namespace spectral_backstep::harness

#endif  // SPECTRAL_BACKSTEP_HARNESS_CONFIG_HPP
