#pragma once

#include <cstdint>
#include <optional>

namespace reiqnd {

struct ReadoutSpec {
  double branching_ratio = 0.0;      // beta
  double purcell_factor = 0.0;       // F_P
  double detector_efficiency = 0.0;  // p_det
  int min_photons = 1;               // n_M
  double rabi_frequency = 0.0;       // rad/s, Omega
  std::optional<double> n_cyc_override;
};

void validate(const ReadoutSpec& spec);

/// F_P beta / (1 - beta + F_P beta).
double cavity_emission_probability(double branching_ratio, double purcell_factor);

/// Probability that a cycling readout yields at least n_M detected photons:
///
///   sum_{n>=1} p_cav^n (1 - p_cav) sum_{k=n_M}^{n} C(n,k) p_det^k (1-p_det)^(n-k)
///
/// The outer sum stops at n = ceil(ln 1e-12 / ln p_cav); the omitted tail is
/// below 1e-12.
double detection_efficiency(double p_cav, double p_det, int min_photons);

/// Number of outer terms detection_efficiency() evaluates.
std::int64_t detection_series_length(double p_cav);

/// (Omega^2 / Delta^2) n_cyc (g~^2 / g^2).
double false_positive_probability(double rabi_frequency, double detuning_offstate, double n_cyc,
                                  double coupling_ratio_sq);

/// `override_value` when set, else the mean emission count 1/(1 - p_cav).
double expected_cycles(double p_cav, std::optional<double> override_value = std::nullopt);

struct ReadoutReport {
  double p_cav = 0.0;
  double detection_efficiency = 0.0;
  double n_cyc = 0.0;
  double p_off = 0.0;
};

ReadoutReport evaluate_readout(const ReadoutSpec& spec, double detuning_offstate,
                               double coupling_ratio_sq);

}  // namespace reiqnd
