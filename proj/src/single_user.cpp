#include "dfrc/single_user.hpp"

#include <cmath>

#include "dfrc/matrix_kernels.hpp"

namespace dfrc {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

CMat mmse_receiver(const CMat& h, const CMat& r_des, const CMat& f_k, double noise_var) {
  if (!(noise_var > 0.0)) {
    throw InvalidInputError("mmse_receiver: noise variance must be > 0");
  }
  if (h.cols() != r_des.rows() || r_des.rows() != r_des.cols() || h.cols() != f_k.rows()) {
    throw InvalidInputError("mmse_receiver: inconsistent dimensions");
  }
  CMat a = h * r_des * h.adjoint();
  a = hermitian_part(a);
  a.diagonal().array() += noise_var;
  return a.llt().solve(h * f_k);
}

double achievable_rate(const CMat& f_k, const std::vector<CMat>& interference_blocks,
                       const CMat& h, double noise_var) {
  const Eigen::Index n_rx = h.rows();
  CMat j = noise_var * CMat::Identity(n_rx, n_rx);
  for (const CMat& block : interference_blocks) {
    if (block.cols() == 0) continue;
    if (block.rows() != h.cols()) {
      throw InvalidInputError("achievable_rate: interference block has wrong row count");
    }
    const CMat hb = h * block;
    j.noalias() += hb * hb.adjoint();
  }
  j = hermitian_part(j);
  Eigen::LLT<CMat> llt(j);
  if (llt.info() != Eigen::Success) {
    throw NumericalConsistencyError(
        "achievable_rate: noise-plus-interference covariance not positive definite");
  }
  const CMat hf = h * f_k;
  CMat m = CMat::Identity(f_k.cols(), f_k.cols());
  m.noalias() += hf.adjoint() * llt.solve(hf);
  return std::max(log_det_hpd(m) / kLn2, 0.0);
}

SingleUserSolution solve_single_user(const CMat& h, const CovarianceSpec& spec,
                                     double noise_var, int streams) {
  const Eigen::Index n_tx = spec.chol.rows();
  const Eigen::Index n_rx = h.rows();
  if (h.cols() != n_tx) {
    throw InvalidInputError("solve_single_user: channel column count must equal n_tx");
  }
  if (streams <= 0 || streams > std::min(n_tx, n_rx)) {
    throw InvalidInputError("solve_single_user: streams must satisfy 1 <= d <= min(n_tx, n_rx)");
  }
  if (!(noise_var > 0.0)) {
    throw InvalidInputError("solve_single_user: noise variance must be > 0");
  }

  const CMat h_tilde = h * spec.chol;
  const SvdResult svd = svd_desc(h_tilde);

  SingleUserSolution sol;
  sol.f = spec.chol * svd.v;
  sol.f_c = sol.f.leftCols(streams);
  sol.f_r = sol.f.rightCols(n_tx - streams);
  sol.receiver = mmse_receiver(h, spec.effective(), sol.f_c, noise_var);
  sol.rate = achievable_rate(sol.f_c, {sol.f_r}, h, noise_var);

  // Independent value route: the optimum equals the whitened-channel capacity
  // term minus the contribution of the n_tx - d smallest eigenvalues of
  // H_e = sigma^2 I + (HL)^H (HL).
  CMat h_e = hermitian_part(CMat(h_tilde.adjoint() * h_tilde));
  h_e.diagonal().array() += noise_var;
  sol.he_eigenvalues = eig_herm_desc(h_e).values;

  CMat full = hermitian_part(CMat(h_tilde * h_tilde.adjoint()));
  full.diagonal().array() += noise_var;
  double identity = log_det_hpd(full) / kLn2;
  identity -= static_cast<double>(n_rx) * std::log2(noise_var);
  for (Eigen::Index m = streams; m < n_tx; ++m) {
    identity -= std::log2(sol.he_eigenvalues[m] / noise_var);
  }
  sol.rate_identity = identity;
  return sol;
}

}  // namespace dfrc
