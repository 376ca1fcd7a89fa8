#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfrc/experiments.hpp"
#include "dfrc/matrix_io.hpp"

using namespace dfrc;

namespace {

namespace fs = std::filesystem;

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepConfig small_config() {
  SweepConfig cfg{SystemConfig(6, 2, 2, 1, 1.0, 1.0)};
  RVec targets(3);
  targets << -60.0, 0.0, 60.0;
  cfg.beampattern.emplace(targets, 9.0);
  cfg.snr_grid_db = {0.0, 10.0};
  cfg.schemes = {"bcd", "cholesky"};
  cfg.trials = 3;
  cfg.seed_base = 11;
  return cfg;
}

const char* kGoodJson = R"({
  "system": {"n_tx": 6, "n_rx": 2, "n_users": 2, "streams_per_user": 1, "power": 1.0,
             "weights": [1.0, 2.0]},
  "beampattern": {"targets_deg": [-60, 0, 60], "beam_width_deg": 9.0, "grid_points": 91},
  "snr_grid_db": [0, 10],
  "schemes": ["bcd", "cholesky"],
  "trials": 2,
  "seed_base": 5,
  "output_dir": "out",
  "solver": {"max_iters": 50, "wsr_tol": 1e-5},
  "manifold": {"max_iters": 40}
})";

}  // namespace

TEST_CASE("load_sweep_config parses a full file") {
  const std::string path = write_temp("dfrc_cfg_good.json", kGoodJson);
  const SweepConfig cfg = load_sweep_config(path);
  CHECK(cfg.system.n_tx == 6);
  CHECK(cfg.system.weights[1] == 2.0);
  REQUIRE(cfg.beampattern.has_value());
  CHECK(cfg.beampattern->grid_deg.size() == 91);
  CHECK(cfg.snr_grid_db.size() == 2);
  CHECK(cfg.trials == 2);
  CHECK(cfg.seed_base == 5);
  CHECK(cfg.solver.max_iters == 50);
  CHECK(cfg.solver.wsr_tol == 1e-5);
  CHECK(cfg.manifold.max_iters == 40);
  CHECK(cfg.manifold.grad_tol == 1e-6);  // untouched default
}

TEST_CASE("load_sweep_config rejects unknown keys and bad schemes") {
  std::string bad = kGoodJson;
  bad.replace(bad.find("\"trials\""), 8, "\"trails\"");
  CHECK_THROWS_WITH_AS(load_sweep_config(write_temp("dfrc_cfg_typo.json", bad)),
                       doctest::Contains("trails"), ConfigError);

  std::string bad_scheme = kGoodJson;
  bad_scheme.replace(bad_scheme.find("\"cholesky\""), 10, "\"cholesk\"");
  CHECK_THROWS_WITH_AS(load_sweep_config(write_temp("dfrc_cfg_scheme.json", bad_scheme)),
                       doctest::Contains("cholesk"), ConfigError);

  std::string nested_typo = kGoodJson;
  nested_typo.replace(nested_typo.find("\"wsr_tol\""), 9, "\"wsr_tll\"");
  CHECK_THROWS_AS(load_sweep_config(write_temp("dfrc_cfg_nested.json", nested_typo)),
                  ConfigError);
}

TEST_CASE("validate_sweep_config covers the cross-field rules") {
  SweepConfig cfg = small_config();
  CHECK_NOTHROW(validate_sweep_config(cfg));

  SweepConfig no_source = small_config();
  no_source.beampattern.reset();
  CHECK_THROWS_AS(validate_sweep_config(no_source), ConfigError);

  SweepConfig both = small_config();
  both.covariance_file = "r.txt";
  CHECK_THROWS_AS(validate_sweep_config(both), ConfigError);

  SweepConfig su = small_config();
  su.schemes = {"single_user_closed_form"};
  CHECK_THROWS_WITH_AS(validate_sweep_config(su), doctest::Contains("n_users"), ConfigError);

  SweepConfig none = small_config();
  none.trials = 0;
  CHECK_THROWS_AS(validate_sweep_config(none), ConfigError);
}

TEST_CASE("resolve_covariance accepts an external matrix file") {
  SweepConfig cfg = small_config();
  cfg.beampattern.reset();
  const CMat omni = CMat::Identity(6, 6) / 6.0;
  const std::string path =
      (fs::temp_directory_path() / "dfrc_rdes_ext.txt").string();
  write_complex_matrix(path, omni);
  cfg.covariance_file = path;
  const CovarianceSpec spec = resolve_covariance(cfg);
  CHECK((spec.r_des - omni).norm() < 1e-15);
}

TEST_CASE("run_sweep: determinism, pairing, aggregate identity") {
  const SweepConfig cfg = small_config();
  const SweepResult r1 = run_sweep(cfg, 1);
  const SweepResult r2 = run_sweep(cfg, 3);  // thread count must not matter
  REQUIRE(r1.rows.size() == 12);             // 2 schemes x 2 snr x 3 trials
  REQUIRE(r2.rows.size() == 12);
  CHECK(r1.flagged == 0);
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].scheme == r2.rows[i].scheme);
    CHECK(r1.rows[i].weighted_sum_rate == r2.rows[i].weighted_sum_rate);
    CHECK(r1.rows[i].seed == r2.rows[i].seed);
  }
  // paired trials: both schemes saw the same seed at a given (snr, trial)
  for (int trial = 0; trial < 3; ++trial) {
    CHECK(r1.rows[trial].seed == r1.rows[6 + trial].seed);  // bcd row vs cholesky row
  }
  // aggregates equal the arithmetic mean of their rows
  for (const SweepAggregate& agg : r1.aggregates) {
    double sum = 0.0;
    int count = 0;
    for (const SweepRow& row : r1.rows) {
      if (row.scheme == agg.scheme && row.snr_db == agg.snr_db && row.ok) {
        sum += row.weighted_sum_rate;
        ++count;
      }
    }
    REQUIRE(count == agg.trial_count);
    CHECK(agg.mean_rate == doctest::Approx(sum / count).epsilon(1e-12));
  }
}

TEST_CASE("run_sweep CSV output is byte-identical across runs") {
  const SweepConfig cfg = small_config();
  const fs::path dir1 = fs::temp_directory_path() / "dfrc_sweep_a";
  const fs::path dir2 = fs::temp_directory_path() / "dfrc_sweep_b";
  write_sweep_csv(run_sweep(cfg, 2), dir1.string());
  write_sweep_csv(run_sweep(cfg, 1), dir2.string());
  CHECK(slurp(dir1 / "results.csv") == slurp(dir2 / "results.csv"));
  CHECK(slurp(dir1 / "aggregates.csv") == slurp(dir2 / "aggregates.csv"));
  CHECK(!slurp(dir1 / "results.csv").empty());
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("run_sweep K=1: bcd tracks the closed form per trial") {
  SweepConfig cfg{SystemConfig(6, 3, 1, 2, 1.0, 1.0)};
  RVec targets(3);
  targets << -60.0, 0.0, 60.0;
  cfg.beampattern.emplace(targets, 9.0);
  cfg.snr_grid_db = {20.0};
  cfg.schemes = {"bcd", "single_user_closed_form"};
  cfg.trials = 50;
  cfg.seed_base = 31;
  cfg.solver.max_iters = 1500;
  cfg.solver.wsr_tol = 1e-8;
  const SweepResult result = run_sweep(cfg, 4);
  REQUIRE(result.rows.size() == 100);
  for (int trial = 0; trial < 50; ++trial) {
    const double bcd = result.rows[trial].weighted_sum_rate;
    const double closed = result.rows[50 + trial].weighted_sum_rate;
    CHECK(std::abs(bcd - closed) / closed < 1e-4);
  }
}

TEST_CASE("run_scheme rejects unknown names and flags zero-channel cholesky rate") {
  const SweepConfig cfg = small_config();
  const CovarianceSpec spec = resolve_covariance(cfg);
  const SystemConfig point = cfg.system.with_noise_var(1.0);
  ChannelSet set = sample_channels(point, 1);
  CHECK_THROWS_AS(run_scheme("nope", set, spec, point, cfg.solver, cfg.manifold), ConfigError);

  for (CMat& h : set.channels) h.setZero();
  const BeamformerSolution sol =
      run_scheme("cholesky", set, spec, point, cfg.solver, cfg.manifold);
  CHECK(sol.weighted_sum_rate == 0.0);
}

TEST_CASE("convergence_trace shape and monotone bcd objective") {
  SweepConfig cfg = small_config();
  cfg.snr_grid_db = {10.0};
  cfg.trials = 1;
  cfg.schemes = {"bcd", "mmse_filter"};
  cfg.solver.max_iters = 60;
  const auto rows = convergence_trace(cfg);
  REQUIRE(!rows.empty());
  int bcd_rows = 0;
  double last_obj = 0.0;
  for (const auto& row : rows) {
    if (row.scheme != "bcd") continue;
    ++bcd_rows;
    CHECK(row.iteration == bcd_rows);  // consecutive from 1
    if (bcd_rows > 1) CHECK(row.objective <= last_obj + 1e-9);
    last_obj = row.objective;
  }
  CHECK(bcd_rows >= 1);
  CHECK(bcd_rows <= 60);

  SweepConfig bad = cfg;
  bad.schemes = {"cholesky"};
  CHECK_THROWS_AS(convergence_trace(bad), ConfigError);
  bad = cfg;
  bad.trials = 2;
  CHECK_THROWS_AS(convergence_trace(bad), ConfigError);
  bad = cfg;
  bad.snr_grid_db = {0.0, 10.0};
  CHECK_THROWS_AS(convergence_trace(bad), ConfigError);
}

TEST_CASE("emit_beampattern_report writes one row per grid angle") {
  RVec targets(3);
  targets << -60.0, 0.0, 60.0;
  const BeampatternSpec spec(targets, 9.0);
  const CMat omni = CMat::Identity(8, 8) / 8.0;
  const fs::path dir = fs::temp_directory_path() / "dfrc_bp_report";
  fs::create_directories(dir);
  const std::string csv = (dir / "beampattern.csv").string();
  emit_beampattern_report(spec, omni, csv);

  std::ifstream in(csv);
  std::string line;
  int data_rows = 0;
  bool achieved_constant = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("theta", 0) == 0) continue;
    ++data_rows;
    const auto last_comma = line.rfind(',');
    const double achieved = std::stod(line.substr(last_comma + 1));
    if (std::abs(achieved - 1.0) > 1e-9) achieved_constant = false;
  }
  CHECK(data_rows == spec.grid_deg.size());
  CHECK(achieved_constant);  // omnidirectional covariance radiates P everywhere
  CHECK(fs::exists(dir / "plot_beampattern.py"));
  fs::remove_all(dir);
}
