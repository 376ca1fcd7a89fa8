#include "dfrc/wmmse_bcd.hpp"

#include <cmath>

#include "dfrc/matrix_kernels.hpp"
#include "dfrc/single_user.hpp"

namespace dfrc {

namespace {

std::vector<CMat> whiten_channels(const ChannelSet& channels, const CovarianceSpec& spec) {
  std::vector<CMat> out;
  out.reserve(channels.channels.size());
  for (const CMat& h : channels.channels) out.push_back(h * spec.chol);
  return out;
}

void check_users(const ChannelSet& channels, const SystemConfig& cfg) {
  if (static_cast<int>(channels.channels.size()) != cfg.n_users) {
    throw InvalidInputError("channel set size does not match configured user count");
  }
}

}  // namespace

CMat mse_matrix(const CMat& g_k, const CMat& f_k, const CMat& h_k, const CMat& r_des,
                double noise_var) {
  if (g_k.rows() != h_k.rows() || f_k.rows() != h_k.cols() || g_k.cols() != f_k.cols()) {
    throw InvalidInputError("mse_matrix: inconsistent dimensions");
  }
  const Eigen::Index d = f_k.cols();
  const CMat x = g_k.adjoint() * h_k * f_k;
  CMat cov = h_k * r_des * h_k.adjoint();
  cov.diagonal().array() += noise_var;
  CMat e = CMat::Identity(d, d) - x - x.adjoint() + g_k.adjoint() * cov * g_k;
  return hermitian_part(e);
}

std::vector<CMat> update_receivers(const CMat& f, const ChannelSet& channels,
                                   const CovarianceSpec& spec, const SystemConfig& cfg) {
  check_users(channels, cfg);
  const int d = cfg.streams_per_user;
  const CMat r_eff = spec.effective();
  std::vector<CMat> receivers;
  receivers.reserve(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    receivers.push_back(
        mmse_receiver(channels.channels[k], r_eff, f.middleCols(k * d, d), cfg.noise_var));
  }
  return receivers;
}

std::vector<CMat> mmse_mse_matrices(const CMat& f, const ChannelSet& channels,
                                    const CovarianceSpec& spec, const SystemConfig& cfg) {
  check_users(channels, cfg);
  const int d = cfg.streams_per_user;
  const CMat r_eff = spec.effective();
  std::vector<CMat> result;
  result.reserve(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    const CMat& h = channels.channels[k];
    CMat a = hermitian_part(CMat(h * r_eff * h.adjoint()));
    a.diagonal().array() += cfg.noise_var;
    const CMat hf = h * f.middleCols(k * d, d);
    CMat e = CMat::Identity(d, d);
    e.noalias() -= hf.adjoint() * a.llt().solve(hf);
    result.push_back(hermitian_part(e));
  }
  return result;
}

std::vector<CMat> update_weights(const std::vector<CMat>& e_mmse) {
  std::vector<CMat> weights;
  weights.reserve(e_mmse.size());
  for (const CMat& e : e_mmse) {
    Eigen::LLT<CMat> llt(hermitian_part(e));
    if (llt.info() != Eigen::Success) {
      throw IllConditionedWeightError("update_weights: MSE matrix singular beyond tolerance");
    }
    const Eigen::Index d = e.rows();
    weights.push_back(hermitian_part(llt.solve(CMat::Identity(d, d))));
  }
  return weights;
}

CMat assemble_m(const std::vector<CMat>& channels_tilde, const std::vector<CMat>& receivers,
                const std::vector<CMat>& weights, const RVec& user_weights) {
  const auto k_count = channels_tilde.size();
  if (receivers.size() != k_count || weights.size() != k_count ||
      static_cast<std::size_t>(user_weights.size()) != k_count) {
    throw InvalidInputError("assemble_m: per-user list lengths disagree");
  }
  if (k_count == 0) throw InvalidInputError("assemble_m: no users");
  const Eigen::Index n_tx = channels_tilde[0].cols();
  const Eigen::Index d = receivers[0].cols();
  CMat m(n_tx, static_cast<Eigen::Index>(k_count) * d);
  for (std::size_t k = 0; k < k_count; ++k) {
    m.middleCols(static_cast<Eigen::Index>(k) * d, d) =
        user_weights[static_cast<Eigen::Index>(k)] * channels_tilde[k].adjoint() * receivers[k] *
        weights[k].adjoint();
  }
  return m;
}

CMat solve_opp(const CMat& m) {
  if (m.cols() > m.rows()) {
    throw InvalidInputError("solve_opp: need at least as many rows as columns");
  }
  const SvdResult svd = svd_desc(m);
  return svd.u.leftCols(m.cols()) * svd.v.adjoint();
}

CMat complete_radar(const CMat& u_m, int d_total) {
  if (u_m.rows() != u_m.cols()) {
    throw InvalidInputError("complete_radar: unitary factor must be square");
  }
  if (d_total < 0 || d_total > u_m.cols()) {
    throw InvalidInputError("complete_radar: stream count out of range");
  }
  return u_m.rightCols(u_m.cols() - d_total);
}

KktCertificate opp_kkt_certificate(const CMat& m, const CMat& f_c_tilde) {
  if (m.rows() != f_c_tilde.rows() || m.cols() != f_c_tilde.cols()) {
    throw InvalidInputError("opp_kkt_certificate: shape mismatch");
  }
  KktCertificate cert;
  cert.q = f_c_tilde.adjoint() * m;
  cert.max_asymmetry = (cert.q - cert.q.adjoint()).norm();
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(cert.q), Eigen::EigenvaluesOnly);
  cert.min_eigenvalue = cert.q.rows() > 0 ? es.eigenvalues().minCoeff() : 0.0;
  const double spectral = m.norm() > 0.0 ? svd_desc(m).s[0] : 0.0;
  const double tol = 1e-8 * std::max(spectral, 1e-300);
  cert.valid = cert.max_asymmetry <= std::max(tol, 1e-12) && cert.min_eigenvalue >= -tol;
  return cert;
}

std::pair<double, RVec> weighted_sum_rate(const CMat& f, const ChannelSet& channels,
                                          const SystemConfig& cfg) {
  check_users(channels, cfg);
  const int d = cfg.streams_per_user;
  const int d_total = cfg.total_streams();
  RVec rates(cfg.n_users);
  double sum = 0.0;
  for (int k = 0; k < cfg.n_users; ++k) {
    std::vector<CMat> interference;
    interference.reserve(cfg.n_users);
    for (int i = 0; i < cfg.n_users; ++i) {
      if (i != k) interference.push_back(f.middleCols(i * d, d));
    }
    if (d_total < cfg.n_tx) {
      interference.push_back(f.rightCols(cfg.n_tx - d_total));
    }
    rates[k] =
        achievable_rate(f.middleCols(k * d, d), interference, channels.channels[k], cfg.noise_var);
    sum += cfg.weights[k] * rates[k];
  }
  return {sum, rates};
}

double wmmse_objective(const CMat& f, const std::vector<CMat>& receivers,
                       const std::vector<CMat>& weights, const ChannelSet& channels,
                       const CovarianceSpec& spec, const SystemConfig& cfg) {
  check_users(channels, cfg);
  const int d = cfg.streams_per_user;
  const CMat r_eff = spec.effective();
  double total = 0.0;
  for (int k = 0; k < cfg.n_users; ++k) {
    const CMat e = mse_matrix(receivers[k], f.middleCols(k * d, d), channels.channels[k], r_eff,
                              cfg.noise_var);
    const double tr = (weights[k] * e).trace().real();
    total += cfg.weights[k] * (tr - log_det_hpd(weights[k]));
  }
  return total;
}

BcdState bcd_init(const SystemConfig& cfg) {
  BcdState state;
  state.f_tilde = CMat::Identity(cfg.n_tx, cfg.n_tx);  // F = L, the Cholesky start
  return state;
}

void bcd_step(BcdState& state, const std::vector<CMat>& channels_tilde,
              const ChannelSet& channels, const CovarianceSpec& spec, const SystemConfig& cfg,
              bool identity_weights) {
  const int d = cfg.streams_per_user;
  const int d_total = cfg.total_streams();
  const CMat f = spec.chol * state.f_tilde;

  state.receivers = update_receivers(f, channels, spec, cfg);
  if (identity_weights) {
    state.weights.assign(cfg.n_users, CMat::Identity(d, d));
  } else {
    state.weights = update_weights(mmse_mse_matrices(f, channels, spec, cfg));
  }
  state.m = assemble_m(channels_tilde, state.receivers, state.weights, cfg.weights);

  const SvdResult svd = svd_desc(state.m);
  state.f_tilde.leftCols(d_total) = svd.u.leftCols(d_total) * svd.v.adjoint();
  state.f_tilde.rightCols(cfg.n_tx - d_total) = complete_radar(svd.u, d_total);
  ++state.iteration;

  const CMat f_new = spec.chol * state.f_tilde;
  state.wsr_trace.push_back(weighted_sum_rate(f_new, channels, cfg).first);
  state.wmmse_trace.push_back(
      wmmse_objective(f_new, state.receivers, state.weights, channels, spec, cfg));
}

BeamformerSolution run_bcd_loop(const ChannelSet& channels, const CovarianceSpec& spec,
                                const SystemConfig& cfg, const SolverOptions& opts,
                                bool identity_weights) {
  check_users(channels, cfg);
  if (cfg.n_tx != spec.chol.rows()) {
    throw InvalidInputError("run_bcd: covariance size does not match n_tx");
  }
  const std::vector<CMat> channels_tilde = whiten_channels(channels, spec);
  const CMat r_eff = spec.effective();
  const double r_norm = std::max(spec.r_des.norm(), 1e-300);

  BcdState state = bcd_init(cfg);
  BeamformerSolution sol;
  double wsr_prev = weighted_sum_rate(spec.chol * state.f_tilde, channels, cfg).first;
  for (int it = 0; it < opts.max_iters; ++it) {
    bcd_step(state, channels_tilde, channels, spec, cfg, identity_weights);
    const double wsr = state.wsr_trace.back();
    const CMat f = spec.chol * state.f_tilde;
    sol.trace.push_back({state.iteration, wsr, state.wmmse_trace.back(),
                         (f * f.adjoint() - r_eff).norm() / r_norm});
    if (std::abs(wsr - wsr_prev) / std::max(1.0, std::abs(wsr)) < opts.wsr_tol) {
      sol.converged = true;
      wsr_prev = wsr;
      break;
    }
    wsr_prev = wsr;
  }
  sol.f = spec.chol * state.f_tilde;
  sol.iterations_used = state.iteration;
  auto [wsr, rates] = weighted_sum_rate(sol.f, channels, cfg);
  sol.weighted_sum_rate = wsr;
  sol.per_user_rates = rates;
  return sol;
}

BeamformerSolution run_bcd(const ChannelSet& channels, const CovarianceSpec& spec,
                           const SystemConfig& cfg, const SolverOptions& opts) {
  return run_bcd_loop(channels, spec, cfg, opts, /*identity_weights=*/false);
}

}  // namespace dfrc
