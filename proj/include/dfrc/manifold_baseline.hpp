#pragma once

#include <vector>

#include "dfrc/beampattern.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/solution.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

// Riemannian gradient-ascent benchmark on the unitary group F~ F~^H = I:
// Euclidean conjugate gradient of the whitened sum-rate objective, tangent
// projection, polar retraction, Armijo backtracking.

struct ManifoldOptions {
  int max_iters = 500;
  double grad_tol = 1e-6;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 30;
};

// 0/1 selector with S_k^T S_k = I: F~ S_k keeps every column block except
// user k's (other users first, then the radar block). user is 0-based.
RMat selection_matrix(int user, int n_users, int streams_per_user, int n_tx);

// f(F~) = sum_k w_k * -log det(s2 I + Ht_k F~ S_k S_k^H F~^H Ht_k^H), the
// variable part of the whitened weighted sum-rate in nats.
double manifold_objective(const CMat& f_tilde, const std::vector<CMat>& channels_tilde,
                          const RVec& user_weights, double noise_var, int streams_per_user);

// Conjugate gradient (d/d conj(F~)) of manifold_objective.
CMat euclidean_conj_gradient(const CMat& f_tilde, const std::vector<CMat>& channels_tilde,
                             const RVec& user_weights, double noise_var, int streams_per_user);

// Tangent-space projection at a unitary point: G - F~ herm(F~^H G).
CMat riemannian_project(const CMat& f_tilde, const CMat& euclidean_grad);

// Polar retraction: unitary factor of F~ + step.
CMat retract(const CMat& f_tilde, const CMat& tangent_step);

BeamformerSolution run_manifold_descent(const ChannelSet& channels, const CovarianceSpec& spec,
                                        const SystemConfig& cfg, const ManifoldOptions& opts = {});

}  // namespace dfrc
