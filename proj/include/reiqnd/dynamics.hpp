#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "reiqnd/error.hpp"
#include "reiqnd/reflection.hpp"

namespace reiqnd {

/// Mean-amplitude Langevin model in the frame rotating at the probe carrier:
///
///   da/dt = (-kappa - i delta) a + g s - sqrt(2 kappa) a_in
///   ds/dt = -g a + (-gamma/2 - i delta - i Delta) s
///   a_out = a_in + sqrt(2 kappa) a
///
/// For a constant drive the fixed point gives a_out/a_in equal to
/// reflection_coefficient(delta, ...). With the opposite output sign the
/// empty-cavity limit would be 1 + 2 kappa/(i delta + kappa) instead of the
/// unit-modulus (i delta - kappa)/(i delta + kappa).

enum class PulseKind {
  gaussian,
  // Gaussian rise up to center_time, constant afterwards. Used to reach a
  // monochromatic steady state without a hard switch-on.
  flat_top,
};

struct PulseShape {
  PulseKind kind = PulseKind::gaussian;
  double t_p = 0.0;               // s, intensity HWHM of the rising edge
  double carrier_detuning = 0.0;  // rad/s, probe minus cavity
  std::complex<double> peak_amplitude{1.0, 0.0};
  double center_time = 0.0;  // s

  /// Complex envelope a_in(t); |a_in|^2 is a photon flux.
  std::complex<double> operator()(double t) const {
    const double x = t - center_time;
    if (kind == PulseKind::flat_top && x >= 0.0) return peak_amplitude;
    return peak_amplitude * std::exp(-x * x * std::numbers::ln2 / (2.0 * t_p * t_p));
  }
};

/// Gaussian pulse carrying exactly one photon: integral |a_in|^2 dt = 1.
PulseShape unit_energy_gaussian(double t_p, double carrier_detuning, double center_time);

enum class IntegrationMethod { rk4 };

struct IntegrationConfig {
  double dt = 0.0;      // s
  double t_span = 0.0;  // s, grid runs over [0, t_span]
  IntegrationMethod method = IntegrationMethod::rk4;
  std::size_t output_stride = 1;  // keep every n-th step in the trace
};

/// Largest step accepted by integrate_langevin: 1/(20 kappa), tightened when
/// the detunings make the generator's spectral radius exceed kappa.
double max_stable_step(const CavityIonParams& params, double carrier_detuning);

/// Step at the stability bound and a window covering the pulse plus ten
/// decay times of the slowest mode.
IntegrationConfig default_config(const CavityIonParams& params, const PulseShape& pulse);

struct FieldTrace {
  Eigen::VectorXd times;
  Eigen::VectorXcd cavity_amplitude;
  Eigen::VectorXcd atomic_amplitude;
  Eigen::VectorXcd input;
  Eigen::VectorXcd output;

  // Trapezoidal integrals over the full step grid, independent of
  // output_stride.
  double input_energy = 0.0;
  double output_energy = 0.0;
  double atomic_population_integral = 0.0;  // integral |s|^2 dt
  double stored_energy_final = 0.0;         // |a|^2 + |s|^2 at t_span

  std::size_t size() const { return static_cast<std::size_t>(times.size()); }
};

/// Fixed-step RK4 from a(0) = s(0) = 0. Throws InvalidInput before integrating
/// when dt exceeds max_stable_step or the window does not hold center_time +-
/// 4 t_p.
FieldTrace integrate_langevin(const CavityIonParams& params, const PulseShape& pulse,
                              const IntegrationConfig& cfg);

struct TransferSample {
  double detuning = 0.0;
  std::complex<double> ratio;
  double relative_error = 0.0;
};

/// Drives a flat-top pulse at each carrier detuning until the slowest mode has
/// decayed and compares the final a_out/a_in with reflection_coefficient.
/// Independent detunings run on up to `workers` threads.
std::vector<TransferSample> transfer_function_check(const CavityIonParams& params,
                                                    const std::vector<double>& detunings,
                                                    unsigned workers = 1);

/// gamma * integral |s|^2 dt for a trace driven by a one-photon pulse: the
/// probability that the photon was scattered by the ion. Throws InvalidInput
/// if the input energy differs from one by more than 1e-3.
double atomic_excitation_probability(const FieldTrace& trace, double gamma);

/// (E_in - E_out - gamma int|s|^2 - stored) / E_in. Zero up to integration
/// error for a one-sided cavity.
double energy_balance_residual(const FieldTrace& trace, double gamma);

namespace detail {

template <typename Scalar>
using State = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <typename Scalar>
using Generator = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Linear generator M and drive vector b with d/dt (a, s) = M (a, s) + b a_in.
template <typename Scalar>
void langevin_system(Scalar coupling, Scalar kappa, Scalar gamma, Scalar ion_detuning,
                     Scalar detuning, Generator<Scalar>& m, State<Scalar>& b) {
  using Complex = std::complex<Scalar>;
  m << Complex(-kappa, -detuning), Complex(coupling, 0),
      Complex(-coupling, 0), Complex(-gamma / Scalar(2), -(detuning + ion_detuning));
  b << Complex(-std::sqrt(Scalar(2) * kappa), 0), Complex(0, 0);
}

template <typename Scalar, typename Drive>
State<Scalar> rk4_step(const Generator<Scalar>& m, const State<Scalar>& b, const State<Scalar>& y,
                       Scalar t, Scalar dt, const Drive& drive) {
  const Scalar half = dt / Scalar(2);
  const auto u0 = drive(t);
  const auto uh = drive(t + half);
  const auto u1 = drive(t + dt);
  const State<Scalar> k1 = m * y + b * u0;
  const State<Scalar> k2 = m * (y + half * k1) + b * uh;
  const State<Scalar> k3 = m * (y + half * k2) + b * uh;
  const State<Scalar> k4 = m * (y + dt * k3) + b * u1;
  return y + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

}  // namespace detail

}  // namespace reiqnd
