#include "dfrc/baselines.hpp"

#include "dfrc/wmmse_bcd.hpp"

namespace dfrc {

BeamformerSolution cholesky_beamformer(const CovarianceSpec& spec, const ChannelSet& channels,
                                       const SystemConfig& cfg) {
  BeamformerSolution sol;
  sol.f = spec.chol;
  auto [wsr, rates] = weighted_sum_rate(sol.f, channels, cfg);
  sol.weighted_sum_rate = wsr;
  sol.per_user_rates = rates;
  sol.iterations_used = 0;
  sol.converged = true;
  const CMat r_eff = spec.effective();
  sol.trace.push_back({0, wsr, 0.0,
                       (sol.f * sol.f.adjoint() - r_eff).norm() /
                           std::max(spec.r_des.norm(), 1e-300)});
  return sol;
}

BeamformerSolution run_mmse_filter(const ChannelSet& channels, const CovarianceSpec& spec,
                                   const SystemConfig& cfg, const SolverOptions& opts) {
  return run_bcd_loop(channels, spec, cfg, opts, /*identity_weights=*/true);
}

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names = {"bcd", "manopt", "mmse_filter", "cholesky",
                                                 "single_user_closed_form"};
  return names;
}

}  // namespace dfrc
