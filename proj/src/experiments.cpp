#include "dfrc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "dfrc/matrix_io.hpp"
#include "dfrc/single_user.hpp"

namespace dfrc {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
    }
  }
}

template <typename T>
T get_required(const json& obj, const std::string& section, const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError("missing key '" + std::string(key) + "' in section '" + section + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "' in section '" + section +
                      "': " + e.what());
  }
}

template <typename T>
T get_optional(const json& obj, const std::string& section, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "' in section '" + section +
                      "': " + e.what());
  }
}

RVec to_rvec(const std::vector<double>& v) {
  RVec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  check_keys(root, "<root>",
             {"system", "beampattern", "covariance_file", "snr_grid_db", "schemes", "trials",
              "seed_base", "output_dir", "solver", "manifold"});

  if (!root.contains("system")) throw ConfigError("missing section 'system'");
  const json& sys = root.at("system");
  check_keys(sys, "system",
             {"n_tx", "n_rx", "n_users", "streams_per_user", "power", "weights"});
  RVec weights;
  if (sys.contains("weights")) {
    weights = to_rvec(get_required<std::vector<double>>(sys, "system", "weights"));
  }
  SystemConfig system_cfg = [&] {
    try {
      // Placeholder noise variance; each sweep point substitutes its own.
      return SystemConfig(get_required<int>(sys, "system", "n_tx"),
                          get_required<int>(sys, "system", "n_rx"),
                          get_required<int>(sys, "system", "n_users"),
                          get_required<int>(sys, "system", "streams_per_user"),
                          get_required<double>(sys, "system", "power"), 1.0, weights);
    } catch (const InvalidInputError& e) {
      throw ConfigError(e.what());
    }
  }();

  SweepConfig cfg(std::move(system_cfg));

  if (root.contains("beampattern")) {
    const json& bp = root.at("beampattern");
    check_keys(bp, "beampattern", {"targets_deg", "beam_width_deg", "grid_points"});
    const auto targets = get_required<std::vector<double>>(bp, "beampattern", "targets_deg");
    const double width = get_required<double>(bp, "beampattern", "beam_width_deg");
    const int grid_points = get_optional<int>(bp, "beampattern", "grid_points", 181);
    if (grid_points < 2) throw ConfigError("beampattern.grid_points must be >= 2");
    RVec grid(grid_points);
    for (int i = 0; i < grid_points; ++i) {
      grid[i] = -90.0 + 180.0 * static_cast<double>(i) / (grid_points - 1);
    }
    try {
      cfg.beampattern.emplace(to_rvec(targets), width, std::move(grid));
    } catch (const InvalidInputError& e) {
      throw ConfigError(e.what());
    }
  }
  if (root.contains("covariance_file")) {
    cfg.covariance_file = get_required<std::string>(root, "<root>", "covariance_file");
  }

  cfg.snr_grid_db = get_required<std::vector<double>>(root, "<root>", "snr_grid_db");
  cfg.schemes = get_required<std::vector<std::string>>(root, "<root>", "schemes");
  cfg.trials = get_optional<int>(root, "<root>", "trials", 1);
  cfg.seed_base = get_optional<std::uint64_t>(root, "<root>", "seed_base", 0);
  cfg.output_dir = get_optional<std::string>(root, "<root>", "output_dir", ".");

  if (root.contains("solver")) {
    const json& sv = root.at("solver");
    check_keys(sv, "solver", {"max_iters", "wsr_tol"});
    cfg.solver.max_iters = get_optional<int>(sv, "solver", "max_iters", cfg.solver.max_iters);
    cfg.solver.wsr_tol = get_optional<double>(sv, "solver", "wsr_tol", cfg.solver.wsr_tol);
  }
  if (root.contains("manifold")) {
    const json& mf = root.at("manifold");
    check_keys(mf, "manifold",
               {"max_iters", "grad_tol", "armijo_c", "backtrack_factor", "initial_step",
                "max_backtracks"});
    cfg.manifold.max_iters = get_optional<int>(mf, "manifold", "max_iters", cfg.manifold.max_iters);
    cfg.manifold.grad_tol = get_optional<double>(mf, "manifold", "grad_tol", cfg.manifold.grad_tol);
    cfg.manifold.armijo_c = get_optional<double>(mf, "manifold", "armijo_c", cfg.manifold.armijo_c);
    cfg.manifold.backtrack_factor =
        get_optional<double>(mf, "manifold", "backtrack_factor", cfg.manifold.backtrack_factor);
    cfg.manifold.initial_step =
        get_optional<double>(mf, "manifold", "initial_step", cfg.manifold.initial_step);
    cfg.manifold.max_backtracks =
        get_optional<int>(mf, "manifold", "max_backtracks", cfg.manifold.max_backtracks);
  }

  validate_sweep_config(cfg);
  return cfg;
}

void validate_sweep_config(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.snr_grid_db.empty()) throw ConfigError("snr_grid_db must be non-empty");
  if (cfg.schemes.empty()) throw ConfigError("schemes must be non-empty");
  const auto& known = scheme_names();
  for (const std::string& s : cfg.schemes) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw ConfigError("unknown scheme '" + s + "'");
    }
    if (s == "single_user_closed_form" && cfg.system.n_users != 1) {
      throw ConfigError("scheme 'single_user_closed_form' requires n_users = 1");
    }
  }
  if (cfg.beampattern.has_value() == cfg.covariance_file.has_value()) {
    throw ConfigError("exactly one of 'beampattern' and 'covariance_file' must be given");
  }
}

CovarianceSpec resolve_covariance(const SweepConfig& cfg) {
  CMat r_des;
  if (cfg.beampattern) {
    r_des = design_covariance(*cfg.beampattern, cfg.system.n_tx, cfg.system.power).r_des;
  } else {
    r_des = read_complex_matrix(*cfg.covariance_file);
    if (r_des.rows() != cfg.system.n_tx) {
      throw ConfigError("covariance file size does not match system.n_tx");
    }
  }
  return make_covariance_spec(r_des, cfg.system.power);
}

BeamformerSolution run_scheme(const std::string& name, const ChannelSet& channels,
                              const CovarianceSpec& spec, const SystemConfig& cfg,
                              const SolverOptions& solver_opts,
                              const ManifoldOptions& manifold_opts) {
  if (name == "bcd") return run_bcd(channels, spec, cfg, solver_opts);
  if (name == "manopt") return run_manifold_descent(channels, spec, cfg, manifold_opts);
  if (name == "mmse_filter") return run_mmse_filter(channels, spec, cfg, solver_opts);
  if (name == "cholesky") return cholesky_beamformer(spec, channels, cfg);
  if (name == "single_user_closed_form") {
    if (cfg.n_users != 1) {
      throw InvalidInputError("single_user_closed_form requires exactly one user");
    }
    const SingleUserSolution su =
        solve_single_user(channels.channels[0], spec, cfg.noise_var, cfg.streams_per_user);
    BeamformerSolution sol;
    sol.f = su.f;
    sol.per_user_rates = RVec::Constant(1, su.rate);
    sol.weighted_sum_rate = cfg.weights[0] * su.rate;
    sol.iterations_used = 0;
    sol.converged = true;
    sol.trace.push_back({0, sol.weighted_sum_rate, 0.0,
                         (su.f * su.f.adjoint() - spec.effective()).norm() /
                             std::max(spec.r_des.norm(), 1e-300)});
    return sol;
  }
  throw ConfigError("unknown scheme '" + name + "'");
}

SweepResult run_sweep(const SweepConfig& cfg, int threads) {
  validate_sweep_config(cfg);
  const CovarianceSpec spec = resolve_covariance(cfg);
  const CMat r_eff = spec.effective();
  const double r_norm = std::max(spec.r_des.norm(), 1e-300);

  const int n_snr = static_cast<int>(cfg.snr_grid_db.size());
  const int n_schemes = static_cast<int>(cfg.schemes.size());
  const int n_points = n_snr * cfg.trials;
  std::vector<SweepRow> slots(static_cast<std::size_t>(n_points) * n_schemes);

  auto work_point = [&](int point) {
    const int snr_idx = point / cfg.trials;
    const int trial = point % cfg.trials;
    const double snr_db = cfg.snr_grid_db[snr_idx];
    const double noise_var = cfg.system.power / std::pow(10.0, snr_db / 10.0);
    const SystemConfig point_cfg = cfg.system.with_noise_var(noise_var);
    const std::uint64_t seed = cfg.seed_base + static_cast<std::uint64_t>(trial);
    const ChannelSet channels = sample_channels(point_cfg, seed);
    for (int s = 0; s < n_schemes; ++s) {
      SweepRow row;
      row.scheme = cfg.schemes[s];
      row.snr_db = snr_db;
      row.trial = trial;
      row.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const BeamformerSolution sol =
            run_scheme(cfg.schemes[s], channels, spec, point_cfg, cfg.solver, cfg.manifold);
        row.weighted_sum_rate = sol.weighted_sum_rate;
        row.iterations = sol.iterations_used;
        row.converged = sol.converged;
        // Audit the sensing guarantee here rather than trusting the solver.
        const double residual = (sol.f * sol.f.adjoint() - r_eff).norm() / r_norm;
        if (!(residual < 1e-8)) {
          row.ok = false;
          row.error = "covariance constraint residual " + fmt_double(residual);
        }
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      const auto t1 = std::chrono::steady_clock::now();
      row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      slots[static_cast<std::size_t>(point) * n_schemes + s] = std::move(row);
    }
  };

  threads = std::max(1, threads);
  if (threads == 1) {
    for (int p = 0; p < n_points; ++p) work_point(p);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int p = next.fetch_add(1); p < n_points; p = next.fetch_add(1)) work_point(p);
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.rows.reserve(slots.size());
  for (int s = 0; s < n_schemes; ++s) {
    for (int snr_idx = 0; snr_idx < n_snr; ++snr_idx) {
      double sum = 0.0, sum_sq = 0.0;
      int count = 0;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const int point = snr_idx * cfg.trials + trial;
        const SweepRow& row = slots[static_cast<std::size_t>(point) * n_schemes + s];
        result.rows.push_back(row);
        if (row.ok) {
          sum += row.weighted_sum_rate;
          sum_sq += row.weighted_sum_rate * row.weighted_sum_rate;
          ++count;
        } else {
          ++result.flagged;
        }
      }
      SweepAggregate agg;
      agg.scheme = cfg.schemes[s];
      agg.snr_db = cfg.snr_grid_db[snr_idx];
      agg.trial_count = count;
      agg.mean_rate = count > 0 ? sum / count : 0.0;
      agg.std_rate =
          count > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / count) / (count - 1))) : 0.0;
      result.aggregates.push_back(agg);
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "results.csv");
    if (!out) throw IoError("cannot write results.csv in '" + out_dir + "'");
    out << "# " << kCsvSchema << "\n";
    out << "scheme,snr_db,trial,seed,weighted_sum_rate,iterations,converged,status\n";
    for (const SweepRow& r : result.rows) {
      out << r.scheme << ',' << fmt_double(r.snr_db) << ',' << r.trial << ',' << r.seed << ','
          << fmt_double(r.weighted_sum_rate) << ',' << r.iterations << ','
          << (r.converged ? 1 : 0) << ',' << (r.ok ? "ok" : "failed") << '\n';
    }
  }
  {
    std::ofstream out(fs::path(out_dir) / "aggregates.csv");
    if (!out) throw IoError("cannot write aggregates.csv in '" + out_dir + "'");
    out << "# " << kCsvSchema << "\n";
    out << "scheme,snr_db,mean_rate,std_rate,trial_count\n";
    for (const SweepAggregate& a : result.aggregates) {
      out << a.scheme << ',' << fmt_double(a.snr_db) << ',' << fmt_double(a.mean_rate) << ','
          << fmt_double(a.std_rate) << ',' << a.trial_count << '\n';
    }
  }
  {
    // Hardware-dependent; deliberately outside the deterministic outputs.
    std::ofstream out(fs::path(out_dir) / "timings.csv");
    if (!out) throw IoError("cannot write timings.csv in '" + out_dir + "'");
    out << "# " << kCsvSchema << "\n";
    out << "scheme,snr_db,trial,wall_time_ms\n";
    for (const SweepRow& r : result.rows) {
      out << r.scheme << ',' << fmt_double(r.snr_db) << ',' << r.trial << ','
          << fmt_double(r.wall_time_ms) << '\n';
    }
  }
  write_sweep_plot_script(out_dir);
}

std::vector<ConvergenceTraceRow> convergence_trace(const SweepConfig& cfg) {
  validate_sweep_config(cfg);
  if (cfg.snr_grid_db.size() != 1) {
    throw ConfigError("convergence trace needs exactly one SNR point");
  }
  if (cfg.trials != 1) throw ConfigError("convergence trace needs trials = 1");
  for (const std::string& s : cfg.schemes) {
    if (s != "bcd" && s != "manopt" && s != "mmse_filter") {
      throw ConfigError("convergence trace supports schemes bcd, manopt, mmse_filter; got '" + s +
                        "'");
    }
  }
  const CovarianceSpec spec = resolve_covariance(cfg);
  const double noise_var = cfg.system.power / std::pow(10.0, cfg.snr_grid_db[0] / 10.0);
  const SystemConfig point_cfg = cfg.system.with_noise_var(noise_var);
  const ChannelSet channels = sample_channels(point_cfg, cfg.seed_base);

  std::vector<ConvergenceTraceRow> rows;
  for (const std::string& scheme : cfg.schemes) {
    const BeamformerSolution sol =
        run_scheme(scheme, channels, spec, point_cfg, cfg.solver, cfg.manifold);
    for (const TracePoint& p : sol.trace) {
      rows.push_back({scheme, p.iteration, p.wsr, p.objective, p.constraint_residual});
    }
  }
  return rows;
}

void write_trace_csv(const std::vector<ConvergenceTraceRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace CSV '" + path + "'");
  out << "# " << kCsvSchema << "\n";
  out << "scheme,iteration,wsr,objective,constraint_residual\n";
  for (const ConvergenceTraceRow& r : rows) {
    out << r.scheme << ',' << r.iteration << ',' << fmt_double(r.wsr) << ','
        << fmt_double(r.objective) << ',' << fmt_double(r.constraint_residual) << '\n';
  }
}

void emit_beampattern_report(const BeampatternSpec& spec, const CMat& r_des,
                             const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw IoError("cannot write beampattern report '" + csv_path + "'");
  out << "# " << kCsvSchema << "\n";
  out << "theta_deg,ideal,achieved\n";
  for (Eigen::Index i = 0; i < spec.grid_deg.size(); ++i) {
    const double theta = spec.grid_deg[i];
    out << fmt_double(theta) << ',' << fmt_double(ideal_pattern(spec, theta)) << ','
        << fmt_double(evaluate_beampattern(r_des, theta)) << '\n';
  }
  if (!out) throw IoError("write failed for beampattern report '" + csv_path + "'");

  const auto dir = std::filesystem::path(csv_path).parent_path();
  std::ofstream script(dir / "plot_beampattern.py");
  script << R"PY(#!/usr/bin/env python3
"""Plot a beampattern report CSV produced by the dfrcsim CLI."""
import csv, sys
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "beampattern.csv"
theta, ideal, achieved = [], [], []
with open(path) as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        theta.append(float(row["theta_deg"]))
        ideal.append(float(row["ideal"]))
        achieved.append(float(row["achieved"]))
scale = max(achieved) or 1.0
plt.plot(theta, achieved, label="achieved")
plt.plot(theta, [v * scale for v in ideal], "--", label="ideal (scaled)")
plt.xlabel("angle (deg)")
plt.ylabel("beampattern power")
plt.legend()
plt.tight_layout()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
)PY";
}

void write_sweep_plot_script(const std::string& out_dir) {
  std::ofstream script(std::filesystem::path(out_dir) / "plot_sweep.py");
  script << R"PY(#!/usr/bin/env python3
"""Plot mean spectral efficiency vs SNR from aggregates.csv."""
import csv, sys
from collections import defaultdict
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "aggregates.csv"
series = defaultdict(list)
with open(path) as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        series[row["scheme"]].append((float(row["snr_db"]), float(row["mean_rate"])))
for scheme, pts in series.items():
    pts.sort()
    plt.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=scheme)
plt.xlabel("transmit SNR (dB)")
plt.ylabel("spectral efficiency (bits/s/Hz)")
plt.legend()
plt.tight_layout()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
)PY";
}

}  // namespace dfrc
