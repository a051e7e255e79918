#pragma once

// Independent reference computations used only by tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "reiqnd/params.hpp"
#include "reiqnd/protocol.hpp"

namespace oracle {

/// Dimensionless small parameters of the photon-present protocol.
struct SmallParameters {
  double inverse_c = 0.0;   // kappa gamma / g^2
  double bandwidth = 0.0;   // kappa sqrt(ln2) / (pi T_p g^2)
  double dephasing = 0.0;   // gamma_gs T_sp
  double dispersive = 0.0;  // g~^2 / (kappa Delta)
  double phi_p = 0.0;
  double phi_r = 0.0;

  SmallParameters scaled(double s) const {
    return {inverse_c * s, bandwidth * s, dephasing * s, dispersive * s, phi_p * s, phi_r * s};
  }
};

/// Rates in units of g (g = 1, kappa = 10) realising `p` with alpha = 2.
struct Realisation {
  reiqnd::CouplingParams coupling;
  reiqnd::DephasingPolicy policy;
  reiqnd::ProtocolErrors errors;
  double pulse_hwhm = 0.0;
};

inline Realisation realise(const SmallParameters& p) {
  const double g = 1.0, kappa = 10.0, alpha = 2.0;
  Realisation r;
  r.pulse_hwhm = kappa * std::sqrt(std::numbers::ln2) / (std::numbers::pi * p.bandwidth * g * g);
  r.coupling = {g, g, kappa, p.inverse_c * g * g / kappa, g * g / (kappa * p.dispersive)};
  r.policy = {p.dephasing / (alpha * r.pulse_hwhm), alpha};
  r.errors = {p.phi_p, p.phi_r};
  return r;
}

/// First-order final density matrix as printed for the photon-present branch
/// after the read-out rotation.
inline Eigen::Matrix2cd first_order_final_state(const SmallParameters& p) {
  const std::complex<double> i(0.0, 1.0);
  const double rot2 = 0.25 * (p.phi_r * p.phi_r + p.phi_p * p.phi_p);
  const double off_re = -0.5 * p.inverse_c - 0.5 * p.bandwidth + 0.5 * (p.phi_r - p.phi_p);
  Eigen::Matrix2cd rho;
  rho(0, 0) = 1.0 - p.inverse_c - p.bandwidth - 0.5 * p.dephasing - rot2;
  rho(0, 1) = off_re - i * p.dispersive;
  rho(1, 0) = off_re + i * p.dispersive;
  rho(1, 1) = 0.5 * p.dephasing + rot2;
  return rho;
}

/// Monte-Carlo estimate of the probability that at least n_m photons are
/// detected. Each trial draws the number of cavity-channel emissions before
/// the first decay into another channel (geometric with success 1 - p_cav,
/// i.e. emissions k >= 0 with P = p_cav^k (1 - p_cav)) and then the number
/// detected (binomial with p_det).
inline double detection_monte_carlo(double p_cav, double p_det, int n_m, long trials,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::geometric_distribution<long> emissions(1.0 - p_cav);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    const long k = emissions(rng);
    if (k < n_m) continue;
    std::binomial_distribution<long> detected(k, p_det);
    if (detected(rng) >= n_m) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace oracle
