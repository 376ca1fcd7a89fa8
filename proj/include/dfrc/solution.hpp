#pragma once

#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

// One per-iteration trace record, shared by every iterative solver. The
// objective column holds the solver's own minimized objective (WMMSE for BCD,
// sum-MSE for the MMSE filter, negated sum log-rate in nats for the manifold
// method); wsr is always the audited weighted sum-rate in bits/s/Hz.
struct TracePoint {
  int iteration = 0;
  double wsr = 0.0;
  double objective = 0.0;
  double constraint_residual = 0.0;  // ||F F^H - (R_des + ridge I)||_F / ||R_des||_F
};

struct SolverOptions {
  int max_iters = 200;
  double wsr_tol = 1e-6;  // stop when |dWSR| / max(1, WSR) drops below this
};

struct BeamformerSolution {
  CMat f;                  // n_tx x n_tx transmit beamformer, F F^H = R_des + ridge I
  RVec per_user_rates;     // bits/s/Hz
  double weighted_sum_rate = 0.0;
  int iterations_used = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

}  // namespace dfrc
