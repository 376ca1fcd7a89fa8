#include <doctest.h>

#include <cmath>
#include <random>

#include "dfrc/beampattern.hpp"
#include "dfrc/matrix_kernels.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/single_user.hpp"
#include "dfrc/wmmse_bcd.hpp"

using namespace dfrc;

namespace {

CMat random_complex(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(dist(gen), dist(gen));
  return m;
}

CMat random_orthonormal(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  Eigen::HouseholderQR<CMat> qr(random_complex(rows, cols, seed));
  return CMat(qr.householderQ()).leftCols(cols);
}

CovarianceSpec three_target_spec(int n_tx, double p = 1.0) {
  RVec targets(3);
  targets << -60.0, 0.0, 60.0;
  const auto design = design_covariance(BeampatternSpec(targets, 9.0), n_tx, p);
  return make_covariance_spec(design.r_des, p);
}

CovarianceSpec identity_spec(int n) {
  return make_covariance_spec(CMat::Identity(n, n), static_cast<double>(n));
}

}  // namespace

TEST_CASE("mse_matrix scalar chain and zero receiver") {
  const CMat one = CMat::Identity(1, 1);
  const CMat half = 0.5 * one;
  const CMat e = mse_matrix(half, one, one, one, 1.0);
  CHECK(std::abs(e(0, 0) - Complex(0.5, 0.0)) < 1e-14);  // 1 - 1 + 0.25 + 0.25

  const CMat e0 = mse_matrix(CMat::Zero(2, 2), CMat::Zero(3, 2), random_complex(2, 3, 1),
                             CMat::Identity(3, 3), 0.7);
  CHECK((e0 - CMat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("mse_matrix matches a Monte-Carlo estimate of the definition") {
  const int n_tx = 3, n_rx = 2, d = 2;  // K = 1, so D = 2 and one radar column
  std::mt19937_64 rng(99);
  const CMat f = random_orthonormal(n_tx, n_tx, 4);  // F F^H = I = R_des
  const CMat r_des = CMat::Identity(n_tx, n_tx);
  const CMat h = random_complex(n_rx, n_tx, 5) / std::sqrt(2.0);
  const double s2 = 0.7;
  const CMat g = mmse_receiver(h, r_des, f.leftCols(d), s2);
  const CMat e = mse_matrix(g, f.leftCols(d), h, r_des, s2);

  const int samples = 100000;
  CMat acc = CMat::Zero(d, d);
  for (int s = 0; s < samples; ++s) {
    CVec c(d), r(n_tx - d), noise(n_rx);
    for (int i = 0; i < d; ++i) c[i] = standard_complex_gaussian(rng);
    for (int i = 0; i < n_tx - d; ++i) r[i] = standard_complex_gaussian(rng);
    for (int i = 0; i < n_rx; ++i) noise[i] = std::sqrt(s2) * standard_complex_gaussian(rng);
    const CVec y = h * (f.leftCols(d) * c + f.rightCols(n_tx - d) * r) + noise;
    const CVec err = g.adjoint() * y - c;
    acc.noalias() += err * err.adjoint();
  }
  const CMat e_mc = acc / static_cast<double>(samples);
  CHECK((e_mc - e).norm() < 1e-2);
}

TEST_CASE("update_receivers reduces to the single-user receiver") {
  const CovarianceSpec spec = identity_spec(4);
  const SystemConfig cfg(4, 2, 1, 2, 4.0, 0.9);
  const ChannelSet set = sample_channels(cfg, 3);
  const CMat f = spec.chol;  // any beamformer
  const auto receivers = update_receivers(f, set, spec, cfg);
  REQUIRE(receivers.size() == 1);
  const CMat expected = mmse_receiver(set.channels[0], spec.effective(), f.leftCols(2), 0.9);
  CHECK((receivers[0] - expected).norm() == 0.0);

  // all-zero transmit blocks give all-zero receivers
  const auto zeros = update_receivers(CMat::Zero(4, 4), set, spec, cfg);
  CHECK(zeros[0].norm() == 0.0);
}

TEST_CASE("update_weights inverts the MSE matrices") {
  CHECK((update_weights({CMat::Identity(3, 3)})[0] - CMat::Identity(3, 3)).norm() < 1e-14);
  CHECK(std::abs(update_weights({0.5 * CMat::Identity(1, 1)})[0](0, 0) - Complex(2, 0)) < 1e-14);

  const CMat a = random_complex(3, 3, 8);
  const CMat e = hermitian_part(CMat(a * a.adjoint())) + 0.1 * CMat::Identity(3, 3);
  const CMat w = update_weights({e})[0];
  CHECK((w * e - CMat::Identity(3, 3)).norm() < 1e-10);
  CHECK((w - w.adjoint()).norm() < 1e-12);

  CMat singular = CMat::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(update_weights({singular}), IllConditionedWeightError);
}

TEST_CASE("assemble_m blockwise against per-user products") {
  const int n_tx = 5, n_rx = 2, d = 1, k_count = 2;
  std::vector<CMat> ht, g, w;
  for (int k = 0; k < k_count; ++k) {
    ht.push_back(random_complex(n_rx, n_tx, 10 + k));
    g.push_back(random_complex(n_rx, d, 20 + k));
    const CMat b = random_complex(d, d, 30 + k);
    w.push_back(hermitian_part(CMat(b * b.adjoint())) + 0.2 * CMat::Identity(d, d));
  }
  RVec omega(2);
  omega << 1.0, 2.5;
  const CMat m = assemble_m(ht, g, w, omega);
  REQUIRE(m.cols() == k_count * d);
  for (int k = 0; k < k_count; ++k) {
    const CMat block = omega[k] * ht[k].adjoint() * g[k] * w[k].adjoint();
    CHECK((m.middleCols(k * d, d) - block).norm() == 0.0);
  }

  // zero receivers make M vanish; identity weights reduce to Ht^H G
  CHECK(assemble_m(ht, {CMat::Zero(n_rx, d), CMat::Zero(n_rx, d)}, w, omega).norm() == 0.0);
  const CMat m_id = assemble_m({ht[0]}, {g[0]}, {CMat::Identity(d, d)}, RVec::Ones(1));
  CHECK((m_id - ht[0].adjoint() * g[0]).norm() == 0.0);
}

TEST_CASE("solve_opp returns an orthonormal maximizer") {
  // orthonormal input is already optimal
  const CMat q = random_orthonormal(6, 3, 17);
  CHECK((solve_opp(q) - q).norm() < 1e-10);

  // the 3x2 diagonal block example achieves objective sigma1 + sigma2 = 5
  CMat m = CMat::Zero(3, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 2.0;
  const CMat f_c = solve_opp(m);
  CMat expected = CMat::Zero(3, 2);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  CHECK((f_c - expected).norm() < 1e-12);
  CHECK((m.adjoint() * f_c).trace().real() == doctest::Approx(5.0));

  // random M: closed form beats random orthonormal candidates
  const CMat mr = random_complex(8, 4, 23);
  const CMat best = solve_opp(mr);
  const double best_obj = (mr.adjoint() * best).trace().real();
  CHECK((best.adjoint() * best - CMat::Identity(4, 4)).norm() < 1e-10);
  for (int t = 0; t < 200; ++t) {
    const CMat x = random_orthonormal(8, 4, 400 + t);
    CHECK((mr.adjoint() * x).trace().real() <= best_obj + 1e-9);
  }
}

TEST_CASE("opp objective is invariant under right-unitary rotation of M") {
  const CMat m = random_complex(6, 3, 29);
  const CMat u = random_orthonormal(3, 3, 31);
  const double obj1 = (m.adjoint() * solve_opp(m)).trace().real();
  const CMat mu = m * u;
  const double obj2 = (mu.adjoint() * solve_opp(mu)).trace().real();
  CHECK(obj1 == doctest::Approx(obj2).epsilon(1e-10));
}

TEST_CASE("complete_radar spans the orthogonal complement") {
  CHECK((complete_radar(CMat::Identity(3, 3), 1) -
         CMat::Identity(3, 3).rightCols(2)).norm() == 0.0);
  CHECK(complete_radar(CMat::Identity(3, 3), 3).cols() == 0);

  const CMat m = random_complex(6, 2, 37);
  const SvdResult svd = svd_desc(m);
  const CMat f_c = svd.u.leftCols(2) * svd.v.adjoint();
  const CMat f_r = complete_radar(svd.u, 2);
  CMat f_tilde(6, 6);
  f_tilde << f_c, f_r;
  CHECK((f_tilde * f_tilde.adjoint() - CMat::Identity(6, 6)).norm() < 1e-10);
  CHECK((f_c.adjoint() * f_r).norm() < 1e-10);
}

TEST_CASE("opp_kkt_certificate validates the optimum and rejects others") {
  const CMat q = random_orthonormal(5, 2, 41);
  const KktCertificate at_opt = opp_kkt_certificate(q, solve_opp(q));
  CHECK(at_opt.valid);
  CHECK((at_opt.q - CMat::Identity(2, 2)).norm() < 1e-10);

  CMat m = CMat::Zero(3, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 2.0;
  const KktCertificate diag_cert = opp_kkt_certificate(m, solve_opp(m));
  CHECK(diag_cert.valid);
  CHECK(diag_cert.q(0, 0).real() == doctest::Approx(3.0));
  CHECK(diag_cert.q(1, 1).real() == doctest::Approx(2.0));

  // random orthonormal points other than the optimum fail the certificate
  const CMat mr = random_complex(8, 4, 43);
  int invalid = 0;
  for (int t = 0; t < 50; ++t) {
    const KktCertificate cert = opp_kkt_certificate(mr, random_orthonormal(8, 4, 900 + t));
    if (!cert.valid) ++invalid;
  }
  CHECK(invalid == 50);
}

TEST_CASE("weighted_sum_rate reductions") {
  const CovarianceSpec spec = identity_spec(4);
  const SystemConfig cfg(4, 2, 1, 2, 4.0, 0.3);
  ChannelSet set = sample_channels(cfg, 11);

  // K = 1 equals the single-user rate of the same beamformer
  const CMat f = spec.chol * random_orthonormal(4, 4, 47);
  const auto [wsr, rates] = weighted_sum_rate(f, set, cfg);
  CHECK(wsr == doctest::Approx(rates[0]));
  CHECK(rates[0] ==
        doctest::Approx(achievable_rate(f.leftCols(2), {CMat(f.rightCols(2))},
                                        set.channels[0], 0.3)));

  set.channels[0].setZero();
  CHECK(weighted_sum_rate(f, set, cfg).first == 0.0);
}

TEST_CASE("wmmse_objective closed forms") {
  const CovarianceSpec spec = identity_spec(1);
  const SystemConfig cfg(1, 1, 1, 1, 1.0, 1.0);
  ChannelSet set;
  set.channels.push_back(CMat::Identity(1, 1));

  // scalar chain at G = 0.5, W = 2: 1 * (2 * 0.5 - ln 2)
  const CMat f = CMat::Identity(1, 1);
  const std::vector<CMat> g = {0.5 * CMat::Identity(1, 1)};
  const std::vector<CMat> w = {2.0 * CMat::Identity(1, 1)};
  CHECK(wmmse_objective(f, g, w, set, spec, cfg) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));

  // W = I: objective is the summed MSE trace
  const std::vector<CMat> w_id = {CMat::Identity(1, 1)};
  const double e = mse_matrix(g[0], f, set.channels[0], spec.effective(), 1.0)(0, 0).real();
  CHECK(wmmse_objective(f, g, w_id, set, spec, cfg) == doctest::Approx(e).epsilon(1e-12));

  // at (G^mmse, W = inverse mmse MSE): sum w_k (d - log det W_k)
  const auto g_mmse = update_receivers(f, set, spec, cfg);
  const auto w_opt = update_weights(mmse_mse_matrices(f, set, spec, cfg));
  const double expected = 1.0 - log_det_hpd(w_opt[0]);
  CHECK(wmmse_objective(f, g_mmse, w_opt, set, spec, cfg) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rate-MSE duality: C_k = -log2 det(E_k^mmse)") {
  const int n_tx = 6, n_rx = 3, k_count = 2, d = 2;
  const CovarianceSpec spec = three_target_spec(n_tx);
  for (int t = 0; t < 20; ++t) {
    const SystemConfig cfg(n_tx, n_rx, k_count, d, 1.0, 0.2 + 0.1 * t);
    const ChannelSet set = sample_channels(cfg, 600 + t);
    const CMat f = spec.chol * random_orthonormal(n_tx, n_tx, 700 + t);
    const auto [wsr, rates] = weighted_sum_rate(f, set, cfg);
    const auto e_mmse = mmse_mse_matrices(f, set, spec, cfg);
    for (int k = 0; k < k_count; ++k) {
      const double dual = -log_det_hpd(e_mmse[k]) / std::log(2.0);
      CHECK(rates[k] == doctest::Approx(dual).epsilon(1e-8));
    }
  }
}

TEST_CASE("bcd_step preserves the whitened orthonormality and weight positivity") {
  const int n_tx = 8, n_rx = 3, k_count = 2, d = 2;
  const CovarianceSpec spec = three_target_spec(n_tx);
  const SystemConfig cfg(n_tx, n_rx, k_count, d, 1.0, 0.05);
  const ChannelSet set = sample_channels(cfg, 13);
  std::vector<CMat> ht;
  for (const CMat& h : set.channels) ht.push_back(h * spec.chol);

  BcdState state = bcd_init(cfg);
  for (int it = 0; it < 10; ++it) {
    bcd_step(state, ht, set, spec, cfg);
    CHECK((state.f_tilde.adjoint() * state.f_tilde - CMat::Identity(n_tx, n_tx)).norm() < 1e-9);
    for (const CMat& w : state.weights) {
      CHECK((w - w.adjoint()).norm() < 1e-10);
      Eigen::SelfAdjointEigenSolver<CMat> es(w, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
  REQUIRE(state.wmmse_trace.size() == 10);
  for (std::size_t i = 1; i < state.wmmse_trace.size(); ++i) {
    CHECK(state.wmmse_trace[i] <= state.wmmse_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("run_bcd K=1 matches the closed-form optimum") {
  const CovarianceSpec spec = three_target_spec(8);
  const SystemConfig cfg(8, 4, 1, 2, 1.0, 0.01);
  SolverOptions opts;
  opts.max_iters = 2000;
  opts.wsr_tol = 1e-8;
  for (int t = 0; t < 5; ++t) {
    const ChannelSet set = sample_channels(cfg, 50 + t);
    const BeamformerSolution bcd = run_bcd(set, spec, cfg, opts);
    const SingleUserSolution ref = solve_single_user(set.channels[0], spec, cfg.noise_var, 2);
    CHECK(std::abs(bcd.weighted_sum_rate - ref.rate) / ref.rate < 1e-4);
  }
}

TEST_CASE("run_bcd trace: monotone objective, exact constraint at every iterate") {
  const CovarianceSpec spec = three_target_spec(12);
  const SystemConfig cfg(12, 3, 3, 2, 1.0, 0.1);
  for (int t = 0; t < 10; ++t) {
    const ChannelSet set = sample_channels(cfg, 900 + t);
    const BeamformerSolution sol = run_bcd(set, spec, cfg);
    REQUIRE(!sol.trace.empty());
    for (std::size_t i = 0; i < sol.trace.size(); ++i) {
      CHECK(sol.trace[i].constraint_residual < 1e-9);
      if (i > 0) CHECK(sol.trace[i].objective <= sol.trace[i - 1].objective + 1e-9);
    }
    CHECK(sol.per_user_rates.size() == 3);
    double recombined = 0.0;
    for (int k = 0; k < 3; ++k) recombined += cfg.weights[k] * sol.per_user_rates[k];
    CHECK(sol.weighted_sum_rate == doctest::Approx(recombined).epsilon(1e-12));
  }
}

TEST_CASE("run_bcd handles the fully loaded D = n_tx case") {
  const CovarianceSpec spec = three_target_spec(8);
  const SystemConfig cfg(8, 2, 4, 2, 1.0, 0.1);  // D = 8 = n_tx, no radar block
  const ChannelSet set = sample_channels(cfg, 70);
  const BeamformerSolution sol = run_bcd(set, spec, cfg);
  CHECK((sol.f * sol.f.adjoint() - spec.effective()).norm() / spec.r_des.norm() < 1e-9);
  CHECK(sol.weighted_sum_rate > 0.0);
}
