#include "dfrc/scenario.hpp"

#include <cmath>
#include <sstream>

namespace dfrc {

SystemConfig::SystemConfig(int n_tx_, int n_rx_, int n_users_, int streams_per_user_,
                           double power_, double noise_var_, RVec weights_)
    : n_tx(n_tx_),
      n_rx(n_rx_),
      n_users(n_users_),
      streams_per_user(streams_per_user_),
      power(power_),
      noise_var(noise_var_),
      weights(std::move(weights_)) {
  auto fail = [](const std::string& msg) { throw InvalidInputError("SystemConfig: " + msg); };
  if (n_tx <= 0) fail("n_tx must be positive");
  if (n_rx <= 0) fail("n_rx must be positive");
  if (n_users <= 0) fail("n_users must be positive");
  if (streams_per_user <= 0) fail("streams_per_user must be positive");
  if (n_rx > n_tx) fail("n_rx must not exceed n_tx");
  if (streams_per_user > std::min(n_tx, n_rx)) {
    fail("streams_per_user must not exceed min(n_tx, n_rx)");
  }
  if (total_streams() > n_tx) {
    std::ostringstream msg;
    msg << "total streams d*K = " << total_streams() << " exceeds n_tx = " << n_tx;
    fail(msg.str());
  }
  if (!(power > 0.0)) fail("power must be > 0");
  if (!(noise_var > 0.0)) fail("noise_var must be > 0");
  if (weights.size() == 0) {
    weights = RVec::Ones(n_users);
  }
  if (weights.size() != n_users) fail("weights length must equal n_users");
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0)) fail("weights must all be > 0");
  }
}

SystemConfig SystemConfig::with_noise_var(double s2) const {
  return SystemConfig(n_tx, n_rx, n_users, streams_per_user, power, s2, weights);
}

Complex standard_complex_gaussian(std::mt19937_64& rng) {
  // u1 in (0, 1], u2 in [0, 1); 53-bit mantissa draws.
  const double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-std::log(u1));
  return std::polar(radius, 2.0 * kPi * u2);
}

ChannelSet sample_channels(const SystemConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ChannelSet out;
  out.seed = seed;
  out.channels.reserve(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    CMat h(cfg.n_rx, cfg.n_tx);
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        h(i, j) = standard_complex_gaussian(rng);
      }
    }
    out.channels.push_back(std::move(h));
  }
  return out;
}

CVec steering_vector(int n_tx, double theta_deg) {
  if (n_tx <= 0) throw InvalidInputError("steering_vector: n_tx must be positive");
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0)) {
    std::ostringstream msg;
    msg << "steering_vector: angle " << theta_deg << " outside [-90, 90] degrees";
    throw InvalidAngleError(msg.str());
  }
  const double s = std::sin(theta_deg * kPi / 180.0);
  CVec a(n_tx);
  for (int n = 0; n < n_tx; ++n) {
    a[n] = std::polar(1.0, kPi * n * s);
  }
  return a;
}

}  // namespace dfrc
