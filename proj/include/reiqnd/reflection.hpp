#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "reiqnd/error.hpp"

namespace reiqnd {

/// Steady-state response of a one-sided cavity holding a single emitter.
///
/// All rates in rad/s (or any common unit). `ion_detuning` is the emitter's
/// detuning from the cavity; pass the resonant coupling g with
/// ion_detuning = 0 for the coupled state, g_tilde with the off-state
/// detuning for the shelved state.
struct CavityIonParams {
  double coupling = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double ion_detuning = 0.0;
};

/// Ratio a_out/a_in for a monochromatic probe detuned by `detuning` from the
/// cavity:
///
///   [g^2 + (i d + i D + gamma/2)(i d - kappa)] / [g^2 + (i d + i D + gamma/2)(i d + kappa)]
template <typename Scalar>
std::complex<Scalar> reflection_coefficient(Scalar detuning, Scalar ion_detuning, Scalar coupling,
                                            Scalar kappa, Scalar gamma) {
  if (!(kappa > Scalar(0))) throw InvalidInput("reflection_coefficient: kappa must be > 0");
  using Complex = std::complex<Scalar>;
  const Complex i(0, 1);
  const Complex atom = i * (detuning + ion_detuning) + gamma / Scalar(2);
  const Scalar g2 = coupling * coupling;
  return (g2 + atom * (i * detuning - kappa)) / (g2 + atom * (i * detuning + kappa));
}

inline std::complex<double> reflection_coefficient(double detuning, const CavityIonParams& p) {
  return reflection_coefficient(detuning, p.ion_detuning, p.coupling, p.kappa, p.gamma);
}

enum class FeatureKind { cavity_dip, atomic_peak, fano };

std::string to_string(FeatureKind kind);

/// One Lorentzian pole term  amplitude / (delta - center - i hwhm).
struct SpectralFeature {
  double center = 0.0;
  double hwhm = 0.0;
  std::complex<double> amplitude;
  FeatureKind label = FeatureKind::cavity_dip;

  std::complex<double> operator()(double detuning) const {
    return amplitude / std::complex<double>(detuning - center, -hwhm);
  }
};

/// How far inside the bad-cavity regime an expansion was requested.
/// clean: kappa (and Delta) > 10 g; marginal: > 3 g; violated otherwise.
enum class Regime { clean, marginal, violated };

std::string to_string(Regime regime);

/// Two-pole bad-cavity expansion of the reflection coefficient.
struct PartialFractions {
  SpectralFeature cavity;
  SpectralFeature atomic;
  Regime regime = Regime::clean;

  std::complex<double> operator()(double detuning) const {
    return 1.0 + cavity(detuning) + atomic(detuning);
  }
};

/// Resonant ion (Delta = 0): broad cavity term of HWHM kappa - g^2/kappa and a
/// narrow atomic term of HWHM g^2/kappa + gamma/2. Throws RegimeViolation for
/// kappa <= g. The expansion is first order in g^2/kappa^2; its relative error
/// against reflection_coefficient is about 4 g^2/kappa^2.
PartialFractions resonant_partial_fractions(double coupling, double kappa, double gamma);

/// Far-detuned ion: cavity term centred at Delta g~^2/(Delta^2+kappa^2) and a
/// Fano term at -Delta (1 + g~^2/(Delta^2+kappa^2)). Throws RegimeViolation when
/// kappa or Delta is not above g~.
PartialFractions detuned_partial_fractions(double coupling_offstate, double kappa, double gamma,
                                           double ion_detuning);

/// 1 - kappa gamma / g^2, the resonant reflection at delta = 0 to first order
/// in 1/C. Requires C > 1.
template <typename Scalar>
std::complex<Scalar> on_resonance_resonant(Scalar coupling, Scalar kappa, Scalar gamma) {
  if (!(coupling * coupling > kappa * gamma))
    throw InvalidInput("on_resonance_resonant: requires cooperativity > 1");
  return {Scalar(1) - kappa * gamma / (coupling * coupling), Scalar(0)};
}

/// -1 - 2i g~^2/(kappa Delta): the photon enters the cavity and picks up a pi
/// shift plus a small residual phase from the detuned ion.
template <typename Scalar>
std::complex<Scalar> on_resonance_detuned(Scalar coupling_offstate, Scalar kappa,
                                          Scalar ion_detuning) {
  if (!(ion_detuning > Scalar(0)))
    throw InvalidInput("on_resonance_detuned: ion detuning must be > 0");
  if (!(kappa > Scalar(0))) throw InvalidInput("on_resonance_detuned: kappa must be > 0");
  return {Scalar(-1),
          Scalar(-2) * coupling_offstate * coupling_offstate / (kappa * ion_detuning)};
}

/// Exponent kappa sqrt(ln 2) / (pi T_p g^2) of the finite-bandwidth penalty.
template <typename Scalar>
Scalar bandwidth_exponent(Scalar coupling, Scalar kappa, Scalar pulse_hwhm) {
  using std::sqrt;
  return kappa * sqrt(std::numbers::ln2_v<Scalar>) /
         (std::numbers::pi_v<Scalar> * pulse_hwhm * coupling * coupling);
}

/// Resonant reflection averaged over a Gaussian pulse of intensity HWHM
/// `pulse_hwhm`: (1 - kappa gamma/g^2) exp(-kappa sqrt(ln 2)/(pi T_p g^2)).
/// The logarithm is natural. The form assumes a pulse spectrum narrower than
/// the resonant feature; see pulse_bandwidth_ratio().
template <typename Scalar>
std::complex<Scalar> pulse_averaged_resonant(Scalar coupling, Scalar kappa, Scalar gamma,
                                             Scalar pulse_hwhm) {
  if (!(pulse_hwhm > Scalar(0)))
    throw InvalidInput("pulse_averaged_resonant: pulse duration must be > 0");
  using std::exp;
  const Scalar base = Scalar(1) - kappa * gamma / (coupling * coupling);
  return {base * exp(-bandwidth_exponent(coupling, kappa, pulse_hwhm)), Scalar(0)};
}

/// (1/T_p) / (g^2/kappa). Values approaching one mean the pulse spectrum is as
/// wide as the resonant feature and the averaged form stops being reliable.
inline double pulse_bandwidth_ratio(double coupling, double kappa, double pulse_hwhm) {
  return (1.0 / pulse_hwhm) / (coupling * coupling / kappa);
}

/// Standard deviation of the power spectrum (rad/s) times the intensity HWHM
/// of a transform-limited Gaussian pulse: |E(t)|^2 ~ exp(-t^2 ln2 / T_p^2)
/// has |E(w)|^2 ~ exp(-w^2 / (2 sigma^2)) with sigma T_p = sqrt(ln2 / 2).
inline const double kGaussianSpectralSigmaTimesHwhm = std::sqrt(std::numbers::ln2 / 2.0);

struct ReflectionAmplitude {
  std::complex<double> value;
  double detuning = 0.0;
};

/// Uniform sweep of reflection_coefficient over [detuning_min, detuning_max],
/// endpoints included. Sample order follows the detuning index regardless of
/// `workers`.
std::vector<ReflectionAmplitude> spectrum_sweep(const CavityIonParams& params,
                                                double detuning_min, double detuning_max,
                                                std::size_t n_points, unsigned workers = 1);

}  // namespace reiqnd
