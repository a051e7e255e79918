#include "reiqnd/reflection.hpp"

#include <algorithm>
#include <limits>

#include "reiqnd/parallel.hpp"

namespace reiqnd {

namespace {

Regime classify(double ratio) {
  if (ratio > 10.0) return Regime::clean;
  if (ratio > 3.0) return Regime::marginal;
  return Regime::violated;
}

Regime worse(Regime a, Regime b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

}  // namespace

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::cavity_dip: return "cavity_dip";
    case FeatureKind::atomic_peak: return "atomic_peak";
    case FeatureKind::fano: return "fano";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::clean: return "clean";
    case Regime::marginal: return "marginal";
    case Regime::violated: return "violated";
  }
  return "unknown";
}

PartialFractions resonant_partial_fractions(double coupling, double kappa, double gamma) {
  require(coupling > 0.0, "resonant_partial_fractions: coupling must be > 0");
  require(gamma >= 0.0, "resonant_partial_fractions: gamma must be >= 0");
  if (!(kappa > coupling))
    throw RegimeViolation("resonant_partial_fractions: requires kappa > g (bad cavity)");

  const double g2k = coupling * coupling / kappa;
  PartialFractions pf;
  pf.cavity = {0.0, kappa - g2k, {0.0, 2.0 * kappa * (1.0 - g2k / kappa)},
               FeatureKind::cavity_dip};
  pf.atomic = {0.0, g2k + gamma / 2.0, {0.0, -2.0 * g2k}, FeatureKind::atomic_peak};
  pf.regime = classify(kappa / coupling);
  return pf;
}

PartialFractions detuned_partial_fractions(double coupling_offstate, double kappa, double gamma,
                                           double ion_detuning) {
  require(coupling_offstate >= 0.0, "detuned_partial_fractions: coupling must be >= 0");
  require(gamma >= 0.0, "detuned_partial_fractions: gamma must be >= 0");
  require(kappa > 0.0, "detuned_partial_fractions: kappa must be > 0");
  if (!(kappa > coupling_offstate) || !(ion_detuning > coupling_offstate))
    throw RegimeViolation("detuned_partial_fractions: requires kappa, Delta > g_tilde");

  using Complex = std::complex<double>;
  const Complex i(0.0, 1.0);
  const double g2 = coupling_offstate * coupling_offstate;
  const double q = g2 / (ion_detuning * ion_detuning + kappa * kappa);
  const Complex mix = g2 / ((ion_detuning + i * kappa) * (ion_detuning + i * kappa));

  PartialFractions pf;
  pf.cavity = {ion_detuning * q, kappa * (1.0 - q), 2.0 * i * kappa * (1.0 - mix),
               FeatureKind::cavity_dip};
  pf.atomic = {-ion_detuning * (1.0 + q), gamma / 2.0 + kappa * q, 2.0 * i * kappa * mix,
               FeatureKind::fano};

  const double ratio = coupling_offstate > 0.0
                           ? std::min(kappa, ion_detuning) / coupling_offstate
                           : std::numeric_limits<double>::infinity();
  pf.regime = classify(ratio);
  if (!(ion_detuning > 10.0 * gamma)) pf.regime = worse(pf.regime, Regime::violated);
  return pf;
}

std::vector<ReflectionAmplitude> spectrum_sweep(const CavityIonParams& params,
                                                double detuning_min, double detuning_max,
                                                std::size_t n_points, unsigned workers) {
  require(n_points >= 2, "spectrum_sweep: need at least two points");
  require(std::isfinite(detuning_min) && std::isfinite(detuning_max) &&
              detuning_max > detuning_min,
          "spectrum_sweep: empty detuning range");
  require(params.kappa > 0.0, "spectrum_sweep: kappa must be > 0");

  std::vector<ReflectionAmplitude> out(n_points);
  const double step = (detuning_max - detuning_min) / static_cast<double>(n_points - 1);
  parallel_for(n_points, workers, [&](std::size_t k) {
    const double d = k + 1 == n_points ? detuning_max : detuning_min + step * k;
    out[k] = {reflection_coefficient(d, params), d};
  });
  return out;
}

}  // namespace reiqnd
