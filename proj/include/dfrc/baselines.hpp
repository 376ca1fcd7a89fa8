#pragma once

#include <string>
#include <vector>

#include "dfrc/beampattern.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/solution.hpp"

namespace dfrc {

// Benchmark schemes from the experiment section that are self-contained
// enough to build: F = L (also the BCD initial point), and the sum-MSE
// alternating design (the BCD loop with all weight matrices frozen at I).

BeamformerSolution cholesky_beamformer(const CovarianceSpec& spec, const ChannelSet& channels,
                                       const SystemConfig& cfg);

BeamformerSolution run_mmse_filter(const ChannelSet& channels, const CovarianceSpec& spec,
                                   const SystemConfig& cfg, const SolverOptions& opts = {});

// CLI scheme vocabulary.
const std::vector<std::string>& scheme_names();

}  // namespace dfrc
