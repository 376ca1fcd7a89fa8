#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc {

// One downlink scenario: array sizes, load, power and noise. Validated on
// construction; every solver trusts these invariants.
struct SystemConfig {
  int n_tx = 0;               // BS transmit antennas
  int n_rx = 0;               // receive antennas per user
  int n_users = 0;            // K
  int streams_per_user = 0;   // d
  double power = 0.0;         // total transmit power P = tr(R_des)
  double noise_var = 0.0;     // sigma^2 per receive antenna
  RVec weights;               // omega_k, length K, defaults to all ones

  SystemConfig(int n_tx, int n_rx, int n_users, int streams_per_user,
               double power, double noise_var, RVec weights = RVec());

  int total_streams() const { return n_users * streams_per_user; }   // D
  int radar_streams() const { return n_tx - total_streams(); }       // N_tx - D

  SystemConfig with_noise_var(double s2) const;
};

struct ChannelSet {
  std::vector<CMat> channels;  // K matrices, n_rx x n_tx
  std::uint64_t seed = 0;
};

// One draw of CN(0,1) using a fixed Box-Muller construction; mt19937_64 plus
// this mapping is stable across platforms, unlike std::normal_distribution.
Complex standard_complex_gaussian(std::mt19937_64& rng);

// K i.i.d. Rayleigh channels, entries CN(0,1). (cfg, seed) fully determines
// the output; trials use seed_base + trial_index.
ChannelSet sample_channels(const SystemConfig& cfg, std::uint64_t seed);

// Half-wavelength ULA response, entry n = exp(i*pi*n*sin(theta)).
CVec steering_vector(int n_tx, double theta_deg);

}  // namespace dfrc
