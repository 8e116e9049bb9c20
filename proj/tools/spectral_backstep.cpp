#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spectral_backstep/harness/commands.hpp"

namespace sb = spectral_backstep;
namespace sbh = spectral_backstep::harness;

int main(int argc, char** argv) {
  CLI::App app{"Backstepping feedback, Riesz-basis and controllability experiments"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool no_timestamp = false;

  std::string names;
  for (const auto& n : sbh::subcommand_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("command", command, "One of: " + names)
      ->required()
      ->check(CLI::IsMember(sbh::subcommand_names()));
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--seed", seed, "Seed for random initial states (overrides seed)");
  app.add_flag("--no-header-timestamp", no_timestamp, "Omit the timestamp line from CSV headers");
  CLI11_PARSE(app, argc, argv);

  try {
    sbh::RunConfig cfg = config_path.empty() ? sbh::parse_config("") : sbh::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.seed = *seed;
    sbh::OutputOptions opts;
    opts.dir = cfg.output_dir;
    opts.seed = cfg.seed;
    opts.timestamp = !no_timestamp;
    return sbh::run_subcommand(command, cfg, opts, std::cout);
  } catch (const sb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << command << ": " << e.what() << '\n';
    return 2;
  }
}
