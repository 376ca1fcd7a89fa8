#pragma once

#include <vector>

#include "dfrc/beampattern.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

// Closed-form single-user optimum: F = L V with V the right singular matrix
// of the whitened channel H L. The first d columns carry communication, the
// rest the radar waveform; the split is orthogonal in the whitened domain.
struct SingleUserSolution {
  CMat f;               // n_tx x n_tx, f * f^H = R_des + ridge I
  CMat f_c;             // first d columns
  CMat f_r;             // remaining n_tx - d columns
  CMat receiver;        // MMSE receive filter, n_rx x d
  double rate = 0.0;    // bits/s/Hz, via achievable_rate
  RVec he_eigenvalues;  // eigenvalues of sigma^2 I + (HL)^H (HL), descending
  double rate_identity = 0.0;  // independent route: log2 det(s2 I + HL(HL)^H)
                               // minus the log2 of the n_tx - d smallest
                               // eigenvalues above, with the noise-power
                               // factor from det(s2 I + AB) = s2^(m-p) *
                               // det(s2 I + BA) accounted for
};

SingleUserSolution solve_single_user(const CMat& h, const CovarianceSpec& spec,
                                     double noise_var, int streams);

// G = (H R H^H + sigma^2 I)^{-1} H F_k, the rate-optimal linear receiver.
CMat mmse_receiver(const CMat& h, const CMat& r_des, const CMat& f_k, double noise_var);

// log2 det(I + F_k^H H^H J^{-1} H F_k) with J the noise-plus-interference
// covariance built from the given blocks (other users' beamformers and F_r).
double achievable_rate(const CMat& f_k, const std::vector<CMat>& interference_blocks,
                       const CMat& h, double noise_var);

}  // namespace dfrc
