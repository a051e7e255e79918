#include "reiqnd/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "reiqnd/error.hpp"

namespace reiqnd {

namespace {

constexpr double kTailTolerance = 1e-12;

void require_probability(double p, const char* what) {
  require(p > 0.0 && p < 1.0, std::string(what) + " must lie in (0, 1)");
}

// log C(n, k) p^k (1-p)^(n-k)
double log_binomial_term(std::int64_t n, std::int64_t k, double log_p, double log_q) {
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * log_p + (nd - kd) * log_q;
}

}  // namespace

void validate(const ReadoutSpec& spec) {
  require_probability(spec.branching_ratio, "readout: branching ratio");
  require(spec.detector_efficiency > 0.0 && spec.detector_efficiency <= 1.0,
          "readout: detector efficiency must lie in (0, 1]");
  require(spec.min_photons >= 1, "readout: n_M must be >= 1");
  require(spec.purcell_factor > 0.0, "readout: Purcell factor must be > 0");
  require(spec.rabi_frequency >= 0.0, "readout: Rabi frequency must be >= 0");
  if (spec.n_cyc_override)
    require(*spec.n_cyc_override > 0.0, "readout: n_cyc override must be > 0");
}

double cavity_emission_probability(double branching_ratio, double purcell_factor) {
  require_probability(branching_ratio, "cavity_emission_probability: branching ratio");
  require(purcell_factor > 0.0, "cavity_emission_probability: Purcell factor must be > 0");
  const double enhanced = purcell_factor * branching_ratio;
  return enhanced / (1.0 - branching_ratio + enhanced);
}

std::int64_t detection_series_length(double p_cav) {
  require(p_cav >= 0.0 && p_cav < 1.0, "detection_efficiency: p_cav must lie in [0, 1)");
  if (p_cav == 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(std::log(kTailTolerance) / std::log(p_cav)));
}

double detection_efficiency(double p_cav, double p_det, int min_photons) {
  require(p_det > 0.0 && p_det <= 1.0, "detection_efficiency: p_det must lie in (0, 1]");
  require(min_photons >= 1, "detection_efficiency: n_M must be >= 1");
  const std::int64_t n_max = detection_series_length(p_cav);
  if (n_max == 0) return 0.0;

  const double log_p = std::log(p_cav), log_fail = std::log1p(-p_cav);
  const double log_det = std::log(p_det);
  const double log_miss = p_det < 1.0 ? std::log1p(-p_det)
                                      : -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::int64_t n = min_photons; n <= n_max; ++n) {
    // P(at least n_M of n detected) as one minus the short lower tail.
    double lower = 0.0;
    for (std::int64_t k = 0; k < min_photons; ++k)
      lower += std::exp(log_binomial_term(n, k, log_det, log_miss));
    const double upper = std::max(0.0, 1.0 - lower);
    total += std::exp(static_cast<double>(n) * log_p + log_fail) * upper;
  }
  return total;
}

double false_positive_probability(double rabi_frequency, double detuning_offstate, double n_cyc,
                                  double coupling_ratio_sq) {
  require(detuning_offstate > 0.0, "false_positive_probability: Delta must be > 0");
  require(n_cyc > 0.0, "false_positive_probability: n_cyc must be > 0");
  require(coupling_ratio_sq >= 0.0, "false_positive_probability: g~^2/g^2 must be >= 0");
  const double ratio = rabi_frequency / detuning_offstate;
  return ratio * ratio * n_cyc * coupling_ratio_sq;
}

double expected_cycles(double p_cav, std::optional<double> override_value) {
  if (override_value) {
    require(*override_value > 0.0, "expected_cycles: override must be > 0");
    return *override_value;
  }
  require(p_cav >= 0.0 && p_cav < 1.0, "expected_cycles: p_cav must lie in [0, 1)");
  return 1.0 / (1.0 - p_cav);
}

ReadoutReport evaluate_readout(const ReadoutSpec& spec, double detuning_offstate,
                               double coupling_ratio_sq) {
  validate(spec);
  ReadoutReport r;
  r.p_cav = cavity_emission_probability(spec.branching_ratio, spec.purcell_factor);
  r.detection_efficiency =
      detection_efficiency(r.p_cav, spec.detector_efficiency, spec.min_photons);
  r.n_cyc = expected_cycles(r.p_cav, spec.n_cyc_override);
  r.p_off = false_positive_probability(spec.rabi_frequency, detuning_offstate, r.n_cyc,
                                       coupling_ratio_sq);
  return r;
}

}  // namespace reiqnd
