#include "dfrc/beampattern.hpp"

#include <cmath>
#include <sstream>

#include "dfrc/matrix_kernels.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

RVec BeampatternSpec::default_grid() {
  RVec grid(181);
  for (int i = 0; i < 181; ++i) grid[i] = -90.0 + i;
  return grid;
}

BeampatternSpec::BeampatternSpec(RVec targets, double beam_width, RVec grid)
    : target_angles_deg(std::move(targets)),
      beam_width_deg(beam_width),
      grid_deg(std::move(grid)) {
  if (target_angles_deg.size() == 0) {
    throw InvalidInputError("BeampatternSpec: at least one target angle required");
  }
  for (Eigen::Index j = 0; j < target_angles_deg.size(); ++j) {
    if (!(target_angles_deg[j] >= -90.0 && target_angles_deg[j] <= 90.0)) {
      throw InvalidAngleError("BeampatternSpec: target angle outside [-90, 90]");
    }
  }
  if (!(beam_width_deg > 0.0)) {
    throw InvalidInputError("BeampatternSpec: beam width must be > 0");
  }
  if (grid_deg.size() < 2) {
    throw InvalidInputError("BeampatternSpec: grid needs at least two angles");
  }
  for (Eigen::Index i = 1; i < grid_deg.size(); ++i) {
    if (!(grid_deg[i] > grid_deg[i - 1])) {
      throw InvalidInputError("BeampatternSpec: grid must be strictly increasing");
    }
  }
}

double ideal_pattern(const BeampatternSpec& spec, double theta_deg) {
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0)) {
    std::ostringstream msg;
    msg << "ideal_pattern: angle " << theta_deg << " outside [-90, 90] degrees";
    throw InvalidAngleError(msg.str());
  }
  const double half = spec.beam_width_deg / 2.0;
  for (Eigen::Index j = 0; j < spec.target_angles_deg.size(); ++j) {
    const double t = spec.target_angles_deg[j];
    if (theta_deg >= t - half && theta_deg <= t + half) return 1.0;
  }
  return 0.0;
}

double evaluate_beampattern(const CMat& r, double theta_deg) {
  if (r.rows() != r.cols()) {
    throw InvalidInputError("evaluate_beampattern: covariance must be square");
  }
  const CVec a = steering_vector(static_cast<int>(r.rows()), theta_deg);
  // Real part of the quadratic form == quadratic form of the Hermitian part.
  const double value = (a.adjoint() * r * a).value().real();
  const double trace = r.trace().real();
  if (value < -1e-10 * std::max(trace, 0.0)) {
    std::ostringstream msg;
    msg << "evaluate_beampattern: negative power " << value << " at " << theta_deg << " degrees";
    throw NumericalConsistencyError(msg.str());
  }
  return std::max(value, 0.0);
}

namespace {

// Projection used by the covariance design: Hermitian part, eigenvalue clip
// at zero, then force the diagonal to P/n_tx (symmetric scaling preserves
// positive semidefiniteness; dead antennas get their power restored on the
// diagonal alone).
CMat project_feasible(const CMat& r, double per_antenna) {
  const Eigen::Index n = r.rows();
  HermEigResult eig = eig_herm_desc(hermitian_part(r));
  RVec clipped = eig.values.cwiseMax(0.0);
  CMat out = eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dii = out(i, i).real();
    if (dii > 1e-14 * per_antenna) {
      const double s = std::sqrt(per_antenna / dii);
      out.row(i) *= s;
      out.col(i) *= s;
    }
    out(i, i) = per_antenna;
  }
  return hermitian_part(out);
}

}  // namespace

CovarianceDesignResult design_covariance(const BeampatternSpec& spec, int n_tx, double power,
                                         const CovarianceDesignOptions& opts) {
  if (n_tx <= 0) throw InvalidInputError("design_covariance: n_tx must be positive");
  if (!(power > 0.0)) throw InvalidInputError("design_covariance: power must be > 0");

  const Eigen::Index g_count = spec.grid_deg.size();
  std::vector<CVec> steer(g_count);
  RVec ideal(g_count);
  for (Eigen::Index g = 0; g < g_count; ++g) {
    steer[g] = steering_vector(n_tx, spec.grid_deg[g]);
    ideal[g] = ideal_pattern(spec, spec.grid_deg[g]);
  }
  const double ideal_energy = ideal.squaredNorm();

  auto pattern_of = [&](const CMat& r) {
    RVec p(g_count);
    for (Eigen::Index g = 0; g < g_count; ++g) {
      p[g] = (steer[g].adjoint() * r * steer[g]).value().real();
    }
    return p;
  };
  auto best_scale = [&](const RVec& p) {
    return ideal_energy > 0.0 ? ideal.dot(p) / ideal_energy : 0.0;
  };
  auto objective_of = [&](const RVec& p, double alpha) {
    return (p - alpha * ideal).squaredNorm();
  };

  const double per_antenna = power / n_tx;
  CovarianceDesignResult res;
  res.r_des = per_antenna * CMat::Identity(n_tx, n_tx);

  RVec p = pattern_of(res.r_des);
  res.scale = best_scale(p);
  double obj = objective_of(p, res.scale);
  const double baseline_obj = obj;
  res.objective_trace.push_back(obj);

  double step = 1e-4;
  for (int it = 0; it < opts.max_iters; ++it) {
    // Gradient of sum_g (a_g^H R a_g - alpha * ideal_g)^2 in R.
    CMat grad = CMat::Zero(n_tx, n_tx);
    for (Eigen::Index g = 0; g < g_count; ++g) {
      const double e = p[g] - res.scale * ideal[g];
      if (e != 0.0) grad.noalias() += (2.0 * e) * (steer[g] * steer[g].adjoint());
    }
    double t = step;
    bool accepted = false;
    CMat r_next;
    RVec p_next;
    double alpha_next = 0.0, obj_next = 0.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      r_next = project_feasible(res.r_des - t * grad, per_antenna);
      p_next = pattern_of(r_next);
      alpha_next = best_scale(p_next);
      obj_next = objective_of(p_next, alpha_next);
      if (obj_next <= obj) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {  // no descent direction survives the projection
      res.converged = true;
      break;
    }
    step = 2.0 * t;
    const bool small_change = (obj - obj_next) < opts.rel_tol * std::max(obj, 1e-30);
    res.r_des = std::move(r_next);
    p = std::move(p_next);
    res.scale = alpha_next;
    obj = obj_next;
    res.objective_trace.push_back(obj);
    if (small_change) {
      res.converged = true;
      break;
    }
  }
  res.warning = obj > baseline_obj;
  return res;
}

CMat CovarianceSpec::effective() const {
  CMat r = r_des;
  r.diagonal().array() += ridge;
  return r;
}

CovarianceSpec make_covariance_spec(const CMat& r_des, double power) {
  if (r_des.rows() != r_des.cols() || r_des.rows() == 0) {
    throw InvalidInputError("make_covariance_spec: covariance must be square and non-empty");
  }
  const Eigen::Index n = r_des.rows();
  const double scale = std::max(r_des.norm(), 1e-300);
  if ((r_des - r_des.adjoint()).norm() > 1e-8 * scale) {
    throw InvalidInputError("make_covariance_spec: covariance not Hermitian to 1e-8");
  }
  const double trace = r_des.trace().real();
  if (std::abs(trace - power) > 1e-6 * std::max(power, 1.0)) {
    std::ostringstream msg;
    msg << "make_covariance_spec: trace " << trace << " does not match power " << power;
    throw InvalidInputError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(r_des), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * power) {
    std::ostringstream msg;
    msg << "make_covariance_spec: covariance indefinite, smallest eigenvalue " << min_eig;
    throw NotPositiveDefiniteError(msg.str(), min_eig);
  }

  CovarianceSpec spec;
  spec.r_des = hermitian_part(r_des);
  spec.power = power;
  spec.ridge = 0.0;
  const double ridge_size = 1e-8 * power / static_cast<double>(n);
  if (min_eig <= ridge_size) {
    spec.ridge = ridge_size;  // singular to working precision
  }
  spec.chol = cholesky_lower(spec.r_des, spec.ridge);
  return spec;
}

}  // namespace dfrc
