// dfrcsim: command-line front end for the DFRC beamforming simulator.
//
// Subcommands:
//   design-covariance  beampattern spec -> R_des matrix file + report CSV
//   sweep              Monte-Carlo SNR sweep over schemes -> CSV files
//   trace              per-iteration convergence trace for one trial
//   single-user        one-shot closed-form solve, prints rate + diagnostics
//
// Exit codes: 0 success, 1 config error, 2 solver-failure threshold exceeded.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dfrc/experiments.hpp"
#include "dfrc/matrix_io.hpp"
#include "dfrc/single_user.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;
};

dfrc::SweepConfig load_config(const CommonArgs& args) {
  dfrc::SweepConfig cfg = dfrc::load_sweep_config(args.config_path);
  if (args.seed) cfg.seed_base = *args.seed;
  if (args.out_dir) cfg.output_dir = *args.out_dir;
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_threads = false) {
  cmd->add_option("--config", args.config_path, "experiment config file (JSON)")->required();
  cmd->add_option("--seed", args.seed, "override seed_base from the config");
  cmd->add_option("--out", args.out_dir, "override output_dir from the config");
  if (with_threads) {
    cmd->add_option("--threads", args.threads, "worker threads for trials")
        ->check(CLI::PositiveNumber);
  }
}

int cmd_design_covariance(const CommonArgs& args) {
  dfrc::SweepConfig cfg = load_config(args);
  if (!cfg.beampattern) {
    throw dfrc::ConfigError("design-covariance requires a 'beampattern' section");
  }
  const auto design = dfrc::design_covariance(*cfg.beampattern, cfg.system.n_tx, cfg.system.power);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string matrix_path = (fs::path(cfg.output_dir) / "r_des.txt").string();
  dfrc::write_complex_matrix(matrix_path, design.r_des);
  dfrc::emit_beampattern_report(*cfg.beampattern, design.r_des,
                                (fs::path(cfg.output_dir) / "beampattern.csv").string());
  std::cout << "covariance design: " << design.objective_trace.size() - 1 << " iterations, "
            << "objective " << design.objective_trace.front() << " -> "
            << design.objective_trace.back() << "\n";
  if (design.warning) {
    std::cout << "warning: objective not reduced below the omnidirectional start\n";
  }
  std::cout << "wrote " << matrix_path << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  dfrc::SweepConfig cfg = load_config(args);
  const dfrc::SweepResult result = dfrc::run_sweep(cfg, args.threads);
  dfrc::write_sweep_csv(result, cfg.output_dir);
  std::cout << "wrote " << result.rows.size() << " rows to " << cfg.output_dir << "\n";
  if (result.flagged > 0) {
    std::cerr << result.flagged << " row(s) flagged as failed\n";
    if (result.flagged * 100 > static_cast<int>(result.rows.size())) {
      return 2;
    }
  }
  return 0;
}

int cmd_trace(const CommonArgs& args) {
  dfrc::SweepConfig cfg = load_config(args);
  const auto rows = dfrc::convergence_trace(cfg);
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string path = (fs::path(cfg.output_dir) / "trace.csv").string();
  dfrc::write_trace_csv(rows, path);
  std::cout << "wrote " << rows.size() << " trace rows to " << path << "\n";
  return 0;
}

int cmd_single_user(const CommonArgs& args) {
  dfrc::SweepConfig cfg = load_config(args);
  if (cfg.system.n_users != 1) {
    throw dfrc::ConfigError("single-user solve requires system.n_users = 1");
  }
  if (cfg.snr_grid_db.size() != 1) {
    throw dfrc::ConfigError("single-user solve needs exactly one SNR point");
  }
  const dfrc::CovarianceSpec spec = dfrc::resolve_covariance(cfg);
  const double noise_var = cfg.system.power / std::pow(10.0, cfg.snr_grid_db[0] / 10.0);
  const dfrc::SystemConfig point_cfg = cfg.system.with_noise_var(noise_var);
  const dfrc::ChannelSet channels = dfrc::sample_channels(point_cfg, cfg.seed_base);
  const dfrc::SingleUserSolution sol = dfrc::solve_single_user(
      channels.channels[0], spec, noise_var, cfg.system.streams_per_user);
  std::printf("rate            %.12g bits/s/Hz\n", sol.rate);
  std::printf("rate (identity) %.12g bits/s/Hz\n", sol.rate_identity);
  std::printf("H_e eigenvalues (descending):");
  for (Eigen::Index i = 0; i < sol.he_eigenvalues.size(); ++i) {
    std::printf(" %.6g", sol.he_eigenvalues[i]);
  }
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DFRC downlink beamforming simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* design = app.add_subcommand("design-covariance",
                                        "design R_des from a beampattern spec");
  add_common(design, args);
  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo SNR sweep");
  add_common(sweep, args, /*with_threads=*/true);
  CLI::App* trace = app.add_subcommand("trace", "per-iteration convergence trace");
  add_common(trace, args);
  CLI::App* single = app.add_subcommand("single-user", "closed-form single-user solve");
  add_common(single, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) return cmd_design_covariance(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (trace->parsed()) return cmd_trace(args);
    if (single->parsed()) return cmd_single_user(args);
  } catch (const dfrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const dfrc::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
