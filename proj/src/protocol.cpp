#include "reiqnd/protocol.hpp"

#include <algorithm>

#include "reiqnd/reflection.hpp"

namespace reiqnd {

void validate(const ProtocolErrors& errors) {
  const double limit = std::numbers::pi / 4.0;
  require(std::abs(errors.prep_angle_error) < limit,
          "protocol: |phi_P| must be below pi/4");
  require(std::abs(errors.readout_angle_error) < limit,
          "protocol: |phi_R| must be below pi/4");
}

void validate(const DephasingPolicy& policy) {
  require(policy.spin_dephasing_rate >= 0.0, "protocol: spin dephasing rate must be >= 0");
  require(policy.superposition_time_multiplier >= 1.0,
          "protocol: superposition time multiplier alpha must be >= 1");
}

JointConditionalState prepare_superposition(const ProtocolErrors& errors) {
  validate(errors);
  return prepare_superposition(errors.prep_angle_error);
}

JointConditionalState dephase(const JointConditionalState& rho, const DephasingPolicy& policy,
                              double pulse_hwhm) {
  validate(policy);
  require(pulse_hwhm > 0.0, "dephase: T_p must be > 0");
  return dephase(rho, policy.spin_dephasing_rate, policy.superposition_time_multiplier,
                 pulse_hwhm);
}

JointConditionalState apply_conditional_reflection(const JointConditionalState& rho,
                                                   const BranchAmplitudes& amps) {
  return apply_conditional_reflection(rho, amps.resonant_amplitude, amps.detuned_amplitude);
}

JointConditionalState final_rotation(const JointConditionalState& rho,
                                     const ProtocolErrors& errors) {
  validate(errors);
  return final_rotation(rho, errors.readout_angle_error);
}

BranchAmplitudes branch_amplitudes(const CouplingParams& params, double pulse_hwhm) {
  require(params.coupling > 0.0, "branch_amplitudes: g must be > 0");
  require(params.kappa > 0.0 && params.gamma >= 0.0,
          "branch_amplitudes: kappa must be > 0 and gamma >= 0");
  if (!(params.kappa > params.coupling))
    throw RegimeViolation("branch_amplitudes: requires kappa > g (bad cavity)");
  return {pulse_averaged_resonant(params.coupling, params.kappa, params.gamma, pulse_hwhm),
          on_resonance_detuned(params.coupling_offstate, params.kappa,
                               params.detuning_offstate)};
}

void check_state(const JointConditionalState& rho, const std::string& stage) {
  if (!rho.allFinite()) throw NumericalIntegrity(stage + ": non-finite density matrix");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalIntegrity(stage + ": density matrix is not Hermitian");
  const Eigen::SelfAdjointEigenSolver<JointConditionalState> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw NumericalIntegrity(stage + ": density matrix is not positive semidefinite");
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || tr > 1.0 + 1e-9)
    throw NumericalIntegrity(stage + ": trace " + std::to_string(tr) + " outside (0, 1]");
}

double fidelity_exact(const JointConditionalState& rho, double detection_efficiency) {
  require(detection_efficiency > 0.0 && detection_efficiency <= 1.0,
          "fidelity_exact: detection efficiency must be in (0, 1]");
  const double p0 = rho(0, 0).real();
  if (p0 < -1e-12) throw NumericalIntegrity("fidelity_exact: negative population <0|rho|0>");
  return detection_efficiency * std::sqrt(std::max(p0, 0.0));
}

ClosedFormFidelity fidelity_closed_form(const CouplingParams& params,
                                        const DephasingPolicy& policy,
                                        const ProtocolErrors& errors,
                                        double detection_efficiency, double pulse_hwhm) {
  validate(policy);
  validate(errors);
  require(params.coupling > 0.0 && params.kappa > 0.0,
          "fidelity_closed_form: g and kappa must be > 0");
  require(pulse_hwhm > 0.0, "fidelity_closed_form: T_p must be > 0");
  require(detection_efficiency > 0.0 && detection_efficiency <= 1.0,
          "fidelity_closed_form: detection efficiency must be in (0, 1]");

  const double g2 = params.coupling * params.coupling;
  ClosedFormFidelity f;
  f.reflection_loss = params.kappa * params.gamma / (2.0 * g2);
  f.bandwidth_loss = bandwidth_exponent(params.coupling, params.kappa, pulse_hwhm) / 2.0;
  f.dephasing_loss =
      0.25 * policy.spin_dephasing_rate * policy.superposition_time_multiplier * pulse_hwhm;
  f.rotation_loss = (errors.readout_angle_error * errors.readout_angle_error +
                     errors.prep_angle_error * errors.prep_angle_error) /
                    8.0;
  f.value = detection_efficiency *
            (1.0 - f.reflection_loss - f.bandwidth_loss - f.dephasing_loss - f.rotation_loss);
  f.outside_small_parameter_regime =
      std::max({f.reflection_loss, f.bandwidth_loss, f.dephasing_loss, f.rotation_loss}) >= 0.2;
  return f;
}

ProtocolRun run_protocol(const CouplingParams& params, const DephasingPolicy& policy,
                         const ProtocolErrors& errors, double detection_efficiency,
                         double pulse_hwhm) {
  ProtocolRun run;
  run.prepared = prepare_superposition(errors);
  check_state(run.prepared, "prepare_superposition");
  run.dephased = dephase(run.prepared, policy, pulse_hwhm);
  check_state(run.dephased, "dephase");
  run.amplitudes = branch_amplitudes(params, pulse_hwhm);
  run.reflected = apply_conditional_reflection(run.dephased, run.amplitudes);
  check_state(run.reflected, "apply_conditional_reflection");
  run.final_state = final_rotation(run.reflected, errors);
  check_state(run.final_state, "final_rotation");
  run.fidelity_exact = fidelity_exact(run.final_state, detection_efficiency);
  run.closed_form =
      fidelity_closed_form(params, policy, errors, detection_efficiency, pulse_hwhm);
  return run;
}

}  // namespace reiqnd
