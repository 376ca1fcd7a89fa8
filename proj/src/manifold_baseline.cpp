#include "dfrc/manifold_baseline.hpp"

#include <cmath>

#include "dfrc/matrix_kernels.hpp"
#include "dfrc/wmmse_bcd.hpp"

namespace dfrc {

namespace {

// Column indices kept by S_k: users before k, users after
// k, then the radar block.
std::vector<Eigen::Index> kept_columns(int user, int n_users, int d, int n_tx) {
  if (user < 0 || user >= n_users) {
    throw InvalidInputError("selection_matrix: user index out of range");
  }
  if (n_users * d > n_tx) {
    throw InvalidInputError("selection_matrix: d * K exceeds n_tx");
  }
  std::vector<Eigen::Index> cols;
  cols.reserve(n_tx - d);
  for (int i = 0; i < n_users; ++i) {
    if (i == user) continue;
    for (int j = 0; j < d; ++j) cols.push_back(static_cast<Eigen::Index>(i) * d + j);
  }
  for (int j = n_users * d; j < n_tx; ++j) cols.push_back(j);
  return cols;
}

}  // namespace

RMat selection_matrix(int user, int n_users, int streams_per_user, int n_tx) {
  const auto cols = kept_columns(user, n_users, streams_per_user, n_tx);
  RMat s = RMat::Zero(n_tx, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    s(cols[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return s;
}

double manifold_objective(const CMat& f_tilde, const std::vector<CMat>& channels_tilde,
                          const RVec& user_weights, double noise_var, int streams_per_user) {
  const int n_users = static_cast<int>(channels_tilde.size());
  const int n_tx = static_cast<int>(f_tilde.cols());
  double value = 0.0;
  for (int k = 0; k < n_users; ++k) {
    const auto cols = kept_columns(k, n_users, streams_per_user, n_tx);
    CMat fs(n_tx, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) fs.col(j) = f_tilde.col(cols[j]);
    const CMat x = channels_tilde[k] * fs;
    CMat a = hermitian_part(CMat(x * x.adjoint()));
    a.diagonal().array() += noise_var;
    value -= user_weights[k] * log_det_hpd(a);
  }
  return value;
}

CMat euclidean_conj_gradient(const CMat& f_tilde, const std::vector<CMat>& channels_tilde,
                             const RVec& user_weights, double noise_var, int streams_per_user) {
  const int n_users = static_cast<int>(channels_tilde.size());
  const int n_tx = static_cast<int>(f_tilde.cols());
  CMat grad = CMat::Zero(f_tilde.rows(), f_tilde.cols());
  for (int k = 0; k < n_users; ++k) {
    const auto cols = kept_columns(k, n_users, streams_per_user, n_tx);
    CMat fs(n_tx, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) fs.col(j) = f_tilde.col(cols[j]);
    const CMat x = channels_tilde[k] * fs;
    CMat a = hermitian_part(CMat(x * x.adjoint()));
    a.diagonal().array() += noise_var;
    const CMat t = channels_tilde[k].adjoint() * a.llt().solve(x);  // n_tx x (n_tx - d)
    // Scatter T S_k^H back into full width.
    for (std::size_t j = 0; j < cols.size(); ++j) {
      grad.col(cols[j]) -= user_weights[k] * t.col(static_cast<Eigen::Index>(j));
    }
  }
  return grad;
}

CMat riemannian_project(const CMat& f_tilde, const CMat& euclidean_grad) {
  const CMat inner = f_tilde.adjoint() * euclidean_grad;
  return euclidean_grad - f_tilde * hermitian_part(inner);
}

CMat retract(const CMat& f_tilde, const CMat& tangent_step) {
  const SvdResult svd = svd_desc(f_tilde + tangent_step);
  return svd.u * svd.v.adjoint();
}

BeamformerSolution run_manifold_descent(const ChannelSet& channels, const CovarianceSpec& spec,
                                        const SystemConfig& cfg, const ManifoldOptions& opts) {
  if (static_cast<int>(channels.channels.size()) != cfg.n_users) {
    throw InvalidInputError("run_manifold_descent: channel count mismatch");
  }
  std::vector<CMat> channels_tilde;
  channels_tilde.reserve(channels.channels.size());
  for (const CMat& h : channels.channels) channels_tilde.push_back(h * spec.chol);

  const CMat r_eff = spec.effective();
  const double r_norm = std::max(spec.r_des.norm(), 1e-300);
  const int d = cfg.streams_per_user;

  CMat f_tilde = CMat::Identity(cfg.n_tx, cfg.n_tx);  // F = L, same start as the BCD
  double f_val = manifold_objective(f_tilde, channels_tilde, cfg.weights, cfg.noise_var, d);

  BeamformerSolution sol;
  // The gradient-ascent loop maximizes f; the line search enforces the Armijo
  // sufficient-increase condition on the retracted point.
  for (int it = 0; it < opts.max_iters; ++it) {
    const CMat egrad =
        euclidean_conj_gradient(f_tilde, channels_tilde, cfg.weights, cfg.noise_var, d);
    const CMat xi = riemannian_project(f_tilde, egrad);
    const double grad_norm = xi.norm();
    if (grad_norm < opts.grad_tol) {
      sol.converged = true;
      break;
    }
    double step = opts.initial_step;
    bool accepted = false;
    CMat f_next;
    double val_next = 0.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      f_next = retract(f_tilde, step * xi);
      val_next = manifold_objective(f_next, channels_tilde, cfg.weights, cfg.noise_var, d);
      if (val_next >= f_val + opts.armijo_c * step * grad_norm * grad_norm) {
        accepted = true;
        break;
      }
      step *= opts.backtrack_factor;
    }
    if (!accepted) {
      break;  // line search exhausted; report converged = false
    }
    f_tilde = std::move(f_next);
    f_val = val_next;
    sol.iterations_used = it + 1;

    const CMat f = spec.chol * f_tilde;
    sol.trace.push_back({it + 1, weighted_sum_rate(f, channels, cfg).first, -f_val,
                         (f * f.adjoint() - r_eff).norm() / r_norm});
  }
  sol.f = spec.chol * f_tilde;
  auto [wsr, rates] = weighted_sum_rate(sol.f, channels, cfg);
  sol.weighted_sum_rate = wsr;
  sol.per_user_rates = rates;
  return sol;
}

}  // namespace dfrc
