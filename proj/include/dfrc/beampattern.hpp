#pragma once

#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

// Ideal radar beampattern: unit gain inside each mainlobe interval
// [theta_j - delta/2, theta_j + delta/2] (closed), zero elsewhere.
struct BeampatternSpec {
  RVec target_angles_deg;
  double beam_width_deg = 0.0;
  RVec grid_deg;  // evaluation angles, strictly increasing

  BeampatternSpec(RVec targets, double beam_width, RVec grid = default_grid());
  static RVec default_grid();  // 181 points over [-90, 90]
};

double ideal_pattern(const BeampatternSpec& spec, double theta_deg);

// a(theta)^H R a(theta); real and non-negative for Hermitian PSD R.
double evaluate_beampattern(const CMat& r, double theta_deg);

struct CovarianceDesignOptions {
  int max_iters = 2000;
  double rel_tol = 1e-8;
  int max_backtracks = 60;
};

// Least-squares beampattern matching under per-antenna power P/n_tx and PSD
// constraints, free pattern scaling, solved by monotone projected gradient.
struct CovarianceDesignResult {
  CMat r_des;
  std::vector<double> objective_trace;  // non-increasing, one entry per accepted iterate
  double scale = 0.0;                   // final pattern scaling alpha
  bool converged = false;               // stopped before the iteration cap
  bool warning = false;                 // objective not reduced below the omnidirectional start
};

CovarianceDesignResult design_covariance(const BeampatternSpec& spec, int n_tx, double power,
                                         const CovarianceDesignOptions& opts = {});

// Desired covariance plus the Cholesky factor every solver consumes.
struct CovarianceSpec {
  CMat r_des;   // Hermitian PSD, trace = power
  CMat chol;    // lower triangular, chol * chol^H = r_des + ridge * I
  double power = 0.0;
  double ridge = 0.0;

  // The covariance the emitted beamformers satisfy exactly: r_des + ridge*I.
  CMat effective() const;
};

// Validates r_des and factorizes it; a ridge of 1e-8 * power / n is applied
// and recorded when r_des is singular to working precision.
CovarianceSpec make_covariance_spec(const CMat& r_des, double power);

}  // namespace dfrc
