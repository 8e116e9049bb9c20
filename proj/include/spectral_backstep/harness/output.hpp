#ifndef SPECTRAL_BACKSTEP_HARNESS_OUTPUT_HPP
#define SPECTRAL_BACKSTEP_HARNESS_OUTPUT_HPP

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "spectral_backstep/spectral_core.hpp"

namespace spectral_backstep::harness {

/// Shortest decimal that round-trips a double.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct OutputOptions {
  std::filesystem::path dir = "out";
  std::uint64_t seed = 42;
  bool timestamp = true;
};

/// CSV file with comment lines for provenance and a one-line column header.
///
///   # generated <UTC timestamp>     (omitted with --no-header-timestamp)
///   # seed=<seed>
///   col_a,col_b,...
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
            const OutputOptions& opts)
      : path_(path), width_(columns.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path);
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    if (opts.timestamp) out_ << "# generated " << utc_timestamp() << '\n';
    out_ << "# seed=" << opts.seed << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw ShapeError("CsvWriter: row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
  }

  /// Row whose leading cell is text.
  void row(const std::string& label, const std::vector<double>& values) {
    if (values.size() + 1 != width_) throw ShapeError("CsvWriter: row width mismatch in " + path_.string());
    out_ << label;
    for (double v : values) out_ << ',' << format_number(v);
    out_ << '\n';
  }

 private:
  std::filesystem::path path_;
  std::size_t width_;
  std::ofstream out_;
};

/// Unit-norm complex vector with i.i.d. Gaussian real and imaginary parts.
inline CoeffVector random_unit_state(Parity parity, Eigen::Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CoeffVector u = CoeffVector::zeros(parity, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    u.coeffs(i) = Complex(re, im);
  }
  u.coeffs /= u.coeffs.norm();
  return u;
}

}  // namespace spectral_backstep::harness

#endif  // SPECTRAL_BACKSTEP_HARNESS_OUTPUT_HPP
