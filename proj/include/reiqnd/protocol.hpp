#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "reiqnd/error.hpp"
#include "reiqnd/params.hpp"

namespace reiqnd {

/// Ion density matrix over {|0>_a, |1>_a}. |0>_a is the ground state of the
/// cavity-resonant transition, |1>_a the shelved off-resonant one.
template <typename Scalar>
using DensityMatrix = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Ion state conditioned on one photon having been reflected. Not
/// renormalized: the trace deficit is the probability the photon was lost.
using JointConditionalState = DensityMatrix<double>;

struct ProtocolErrors {
  double prep_angle_error = 0.0;     // rad, phi_P
  double readout_angle_error = 0.0;  // rad, phi_R
};

/// Pure dephasing of the spin superposition over T_sp = alpha T_p.
struct DephasingPolicy {
  double spin_dephasing_rate = 0.0;            // rad/s
  double superposition_time_multiplier = 2.0;  // alpha >= 1
};

struct BranchAmplitudes {
  std::complex<double> resonant_amplitude;  // r0, ion in |0>_a
  std::complex<double> detuned_amplitude;   // r1, ion in |1>_a
};

void validate(const ProtocolErrors& errors);
void validate(const DephasingPolicy& policy);

/// Real rotation family through angle theta:
///
///   R(theta) = [[-sin(theta/2), cos(theta/2)],
///               [ cos(theta/2), sin(theta/2)]]
///
/// At theta = pi/2 it maps |0> -> (|1> - |0>)/sqrt2 and |1> -> (|1> + |0>)/sqrt2.
/// Every member is a reflection (det = -1), so R(pi/2)^2 = I and there is no
/// group law R(a) R(b) = R(a + b).
template <typename Scalar>
DensityMatrix<Scalar> rotation(Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(theta / Scalar(2));
  const Scalar s = sin(theta / Scalar(2));
  DensityMatrix<Scalar> r;
  r << -s, c, c, s;
  return r;
}

/// R(pi/2 + phi_P) |1><1| R^T. Diagonal (1 -+ sin phi_P)/2, coherence cos(phi_P)/2.
template <typename Scalar>
DensityMatrix<Scalar> prepare_superposition(Scalar prep_angle_error) {
  const auto r = rotation(std::numbers::pi_v<Scalar> / Scalar(2) + prep_angle_error);
  DensityMatrix<Scalar> ground = DensityMatrix<Scalar>::Zero();
  ground(1, 1) = Scalar(1);
  return r * ground * r.adjoint();
}

/// Multiplies the coherences by exp(-gamma_gs alpha T_p).
template <typename Scalar>
DensityMatrix<Scalar> dephase(const DensityMatrix<Scalar>& rho, Scalar spin_dephasing_rate,
                              Scalar multiplier, Scalar pulse_hwhm) {
  using std::exp;
  const Scalar factor = exp(-spin_dephasing_rate * multiplier * pulse_hwhm);
  DensityMatrix<Scalar> out = rho;
  out(0, 1) *= factor;
  out(1, 0) *= factor;
  return out;
}

/// K rho K^dagger with K = diag(r0, r1).
template <typename Scalar>
DensityMatrix<Scalar> apply_conditional_reflection(const DensityMatrix<Scalar>& rho,
                                                   std::complex<Scalar> r0,
                                                   std::complex<Scalar> r1) {
  DensityMatrix<Scalar> k = DensityMatrix<Scalar>::Zero();
  k(0, 0) = r0;
  k(1, 1) = r1;
  return k * rho * k.adjoint();
}

template <typename Scalar>
DensityMatrix<Scalar> final_rotation(const DensityMatrix<Scalar>& rho, Scalar readout_angle_error) {
  const auto r = rotation(std::numbers::pi_v<Scalar> / Scalar(2) + readout_angle_error);
  return r * rho * r.adjoint();
}

JointConditionalState prepare_superposition(const ProtocolErrors& errors);
JointConditionalState dephase(const JointConditionalState& rho, const DephasingPolicy& policy,
                              double pulse_hwhm);
JointConditionalState apply_conditional_reflection(const JointConditionalState& rho,
                                                   const BranchAmplitudes& amps);
JointConditionalState final_rotation(const JointConditionalState& rho,
                                     const ProtocolErrors& errors);

/// r0 from the pulse-averaged resonant reflection, r1 from the far-detuned
/// on-resonance form. Throws RegimeViolation outside the bad-cavity regime
/// (kappa <= g).
BranchAmplitudes branch_amplitudes(const CouplingParams& params, double pulse_hwhm);

/// Throws NumericalIntegrity unless rho is Hermitian (1e-12), positive
/// semidefinite (1e-10) and has trace in (0, 1 + 1e-9].
void check_state(const JointConditionalState& rho, const std::string& stage);

/// eta_det sqrt(<0|rho|0>) on the unnormalized photon-present branch.
double fidelity_exact(const JointConditionalState& rho, double detection_efficiency);

struct ClosedFormFidelity {
  double value = 0.0;
  double reflection_loss = 0.0;  // kappa gamma / 2 g^2
  double bandwidth_loss = 0.0;   // kappa sqrt(ln2) / (2 pi T_p g^2)
  double dephasing_loss = 0.0;   // gamma_gs alpha T_p / 4
  double rotation_loss = 0.0;    // (phi_R^2 + phi_P^2) / 8
  // Set when any single loss term reaches 0.2; the expansion is first order.
  bool outside_small_parameter_regime = false;
};

ClosedFormFidelity fidelity_closed_form(const CouplingParams& params,
                                        const DephasingPolicy& policy,
                                        const ProtocolErrors& errors,
                                        double detection_efficiency, double pulse_hwhm);

struct ProtocolRun {
  JointConditionalState prepared;
  JointConditionalState dephased;
  JointConditionalState reflected;
  JointConditionalState final_state;
  BranchAmplitudes amplitudes;
  double fidelity_exact = 0.0;
  ClosedFormFidelity closed_form;
};

/// Full photon-present pipeline at one pulse duration, with check_state after
/// every stage.
ProtocolRun run_protocol(const CouplingParams& params, const DephasingPolicy& policy,
                         const ProtocolErrors& errors, double detection_efficiency,
                         double pulse_hwhm);

}  // namespace reiqnd
