#pragma once

#include <utility>
#include <vector>

#include "dfrc/beampattern.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/solution.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

// Multi-user weighted-sum-rate maximization under F F^H = R_des, solved as a
// matrix-weighted sum-MSE minimization by block coordinate descent. All three
// blocks have closed-form minimizers; the transmit update is an orthogonal
// Procrustes problem in the whitened domain.

// MSE matrix of one user for receiver g_k and transmit block f_k, using the
// covariance-constraint simplification (valid when F F^H = r_des):
// E_k = I - X - X^H + G^H (H R H^H + s2 I) G with X = G^H H F_k.
CMat mse_matrix(const CMat& g_k, const CMat& f_k, const CMat& h_k, const CMat& r_des,
                double noise_var);

// MMSE receivers for all users given the current transmit beamformer.
std::vector<CMat> update_receivers(const CMat& f, const ChannelSet& channels,
                                   const CovarianceSpec& spec, const SystemConfig& cfg);

// E_k^mmse = I - F_k^H H_k^H (H_k R H_k^H + s2 I)^{-1} H_k F_k for all users.
std::vector<CMat> mmse_mse_matrices(const CMat& f, const ChannelSet& channels,
                                    const CovarianceSpec& spec, const SystemConfig& cfg);

// W_k = (E_k^mmse)^{-1}, Hermitian-symmetrized.
std::vector<CMat> update_weights(const std::vector<CMat>& e_mmse);

// M = [w_1 Ht_1^H G_1 W_1^H, ..., w_K Ht_K^H G_K W_K^H], n_tx x D.
CMat assemble_m(const std::vector<CMat>& channels_tilde, const std::vector<CMat>& receivers,
                const std::vector<CMat>& weights, const RVec& user_weights);

// Maximizer of Re Tr(M^H X) over X^H X = I: X = U_M(:, 1:D) V_M^H.
CMat solve_opp(const CMat& m);

// Columns D+1..n_tx of the unitary factor; together with the OPP solution
// they form a unitary matrix, so the covariance constraint holds exactly.
CMat complete_radar(const CMat& u_m, int d_total);

// Dual certificate that the OPP solution also solves the SDP relaxation:
// Q = F_c^H M must be Hermitian PSD.
struct KktCertificate {
  CMat q;
  bool valid = false;
  double max_asymmetry = 0.0;   // ||Q - Q^H||_F
  double min_eigenvalue = 0.0;  // of the Hermitian part
};
KktCertificate opp_kkt_certificate(const CMat& m, const CMat& f_c_tilde);

// Weighted sum-rate (bits/s/Hz) and the per-user rates for a full beamformer.
std::pair<double, RVec> weighted_sum_rate(const CMat& f, const ChannelSet& channels,
                                          const SystemConfig& cfg);

// sum_k w_k (Tr(W_k E_k) - log det W_k), natural log.
double wmmse_objective(const CMat& f, const std::vector<CMat>& receivers,
                       const std::vector<CMat>& weights, const ChannelSet& channels,
                       const CovarianceSpec& spec, const SystemConfig& cfg);

// State carried across BCD iterations; f_tilde has orthonormal columns at
// every iterate by construction.
struct BcdState {
  CMat f_tilde;                 // n_tx x n_tx
  std::vector<CMat> receivers;  // G_k, n_rx x d
  std::vector<CMat> weights;    // W_k, d x d Hermitian PD
  CMat m;                       // last assembly matrix, n_tx x D
  int iteration = 0;
  std::vector<double> wsr_trace;
  std::vector<double> wmmse_trace;  // non-increasing
};

// One G -> W -> F triple update. identity_weights freezes W_k = I, which
// turns the loop into plain sum-MSE minimization (the MMSE-filter baseline).
void bcd_step(BcdState& state, const std::vector<CMat>& channels_tilde,
              const ChannelSet& channels, const CovarianceSpec& spec, const SystemConfig& cfg,
              bool identity_weights = false);

BcdState bcd_init(const SystemConfig& cfg);

BeamformerSolution run_bcd(const ChannelSet& channels, const CovarianceSpec& spec,
                           const SystemConfig& cfg, const SolverOptions& opts = {});

// Internal driver shared with the MMSE-filter baseline.
BeamformerSolution run_bcd_loop(const ChannelSet& channels, const CovarianceSpec& spec,
                                const SystemConfig& cfg, const SolverOptions& opts,
                                bool identity_weights);

}  // namespace dfrc
