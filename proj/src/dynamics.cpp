#include "reiqnd/dynamics.hpp"

#include <limits>

#include "reiqnd/parallel.hpp"

namespace reiqnd {

namespace {

using Generator = detail::Generator<double>;
using State = detail::State<double>;

Generator generator(const CavityIonParams& p, double detuning) {
  Generator m;
  State b;
  detail::langevin_system(p.coupling, p.kappa, p.gamma, p.ion_detuning, detuning, m, b);
  return m;
}

// Decay rate of the slowest mode the drive can reach. With g = 0 the ion is
// never excited, so only the cavity mode counts.
double slowest_rate(const CavityIonParams& p, double detuning) {
  if (p.coupling == 0.0) return p.kappa;
  Eigen::ComplexEigenSolver<Generator> solver(generator(p, detuning), false);
  double rate = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) rate = std::min(rate, -solver.eigenvalues()[k].real());
  if (!(rate > 0.0)) throw InvalidInput("integrate_langevin: system has an undamped mode");
  return rate;
}

void validate(const CavityIonParams& p) {
  require(p.kappa > 0.0, "dynamics: kappa must be > 0");
  require(p.coupling >= 0.0 && p.gamma >= 0.0, "dynamics: g and gamma must be >= 0");
  require(std::isfinite(p.ion_detuning), "dynamics: ion detuning must be finite");
}

}  // namespace

PulseShape unit_energy_gaussian(double t_p, double carrier_detuning, double center_time) {
  require(t_p > 0.0, "unit_energy_gaussian: t_p must be > 0");
  PulseShape pulse;
  pulse.kind = PulseKind::gaussian;
  pulse.t_p = t_p;
  pulse.carrier_detuning = carrier_detuning;
  pulse.center_time = center_time;
  // integral exp(-t^2 ln2 / T^2) dt = T sqrt(pi / ln2)
  pulse.peak_amplitude = std::pow(std::numbers::ln2 / std::numbers::pi, 0.25) / std::sqrt(t_p);
  return pulse;
}

double max_stable_step(const CavityIonParams& params, double carrier_detuning) {
  validate(params);
  Eigen::ComplexEigenSolver<Generator> solver(generator(params, carrier_detuning), false);
  const double radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  return 1.0 / (20.0 * std::max(params.kappa, radius));
}

IntegrationConfig default_config(const CavityIonParams& params, const PulseShape& pulse) {
  IntegrationConfig cfg;
  cfg.dt = max_stable_step(params, pulse.carrier_detuning);
  const double tail = 10.0 / slowest_rate(params, pulse.carrier_detuning);
  cfg.t_span = pulse.center_time + (pulse.kind == PulseKind::gaussian ? 4.0 * pulse.t_p : 0.0) +
               tail;
  return cfg;
}

FieldTrace integrate_langevin(const CavityIonParams& params, const PulseShape& pulse,
                              const IntegrationConfig& cfg) {
  validate(params);
  require(pulse.t_p > 0.0, "integrate_langevin: pulse t_p must be > 0");
  require(cfg.output_stride >= 1, "integrate_langevin: output_stride must be >= 1");
  require(cfg.dt > 0.0 && cfg.t_span > 0.0, "integrate_langevin: dt and t_span must be > 0");
  const double dt_max = max_stable_step(params, pulse.carrier_detuning);
  if (cfg.dt > dt_max * (1.0 + 1e-12))
    throw InvalidInput("integrate_langevin: dt = " + std::to_string(cfg.dt) +
                       " exceeds the stability bound " + std::to_string(dt_max));
  const double lead = pulse.center_time - 4.0 * pulse.t_p;
  const double trail =
      pulse.center_time + (pulse.kind == PulseKind::gaussian ? 4.0 * pulse.t_p : 0.0);
  const double slack = 1e-9 * cfg.t_span;
  if (lead < -slack || trail > cfg.t_span + slack)
    throw InvalidInput("integrate_langevin: window [0, t_span] must hold center_time +- 4 t_p");

  // Step count rounded up to a stride multiple so the recorded grid is uniform
  // and ends exactly at t_span.
  const auto n_min = static_cast<std::size_t>(std::ceil(cfg.t_span / cfg.dt - 1e-9));
  const std::size_t stride = std::min(cfg.output_stride, n_min);
  const auto n_rows = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n_min) / static_cast<double>(stride) - 1e-9));
  const std::size_t n_steps = n_rows * stride;
  const double dt = cfg.t_span / static_cast<double>(n_steps);

  Generator m;
  State b;
  detail::langevin_system(params.coupling, params.kappa, params.gamma, params.ion_detuning,
                          pulse.carrier_detuning, m, b);
  const double root2k = std::sqrt(2.0 * params.kappa);

  const std::size_t n_out = n_rows + 1;
  FieldTrace trace;
  trace.times.resize(n_out);
  trace.cavity_amplitude.resize(n_out);
  trace.atomic_amplitude.resize(n_out);
  trace.input.resize(n_out);
  trace.output.resize(n_out);

  State y = State::Zero();
  std::complex<double> u = pulse(0.0);
  std::complex<double> out = u;
  double f_in = std::norm(u), f_out = std::norm(out), f_s = 0.0;
  std::size_t row = 0;
  auto record = [&](std::size_t step) {
    trace.times[row] = dt * static_cast<double>(step);
    trace.cavity_amplitude[row] = y[0];
    trace.atomic_amplitude[row] = y[1];
    trace.input[row] = u;
    trace.output[row] = out;
    ++row;
  };
  record(0);

  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = dt * static_cast<double>(k);
    y = detail::rk4_step<double>(m, b, y, t, dt, pulse);
    if (!std::isfinite(y[0].real()) || !std::isfinite(y[1].real()))
      throw NumericalIntegrity("integrate_langevin: state diverged");
    u = pulse(t + dt);
    out = u + root2k * y[0];
    const double g_in = std::norm(u), g_out = std::norm(out), g_s = std::norm(y[1]);
    trace.input_energy += 0.5 * dt * (f_in + g_in);
    trace.output_energy += 0.5 * dt * (f_out + g_out);
    trace.atomic_population_integral += 0.5 * dt * (f_s + g_s);
    f_in = g_in;
    f_out = g_out;
    f_s = g_s;
    if ((k + 1) % stride == 0) record(k + 1);
  }
  trace.stored_energy_final = y.squaredNorm();
  return trace;
}

std::vector<TransferSample> transfer_function_check(const CavityIonParams& params,
                                                    const std::vector<double>& detunings,
                                                    unsigned workers) {
  validate(params);
  for (double d : detunings)
    require(std::isfinite(d), "transfer_function_check: detunings must be finite");

  std::vector<TransferSample> out(detunings.size());
  parallel_for(detunings.size(), workers, [&](std::size_t k) {
    const double delta = detunings[k];
    PulseShape drive;
    drive.kind = PulseKind::flat_top;
    drive.t_p = 5.0 / params.kappa;
    drive.center_time = 4.0 * drive.t_p;
    drive.carrier_detuning = delta;
    IntegrationConfig cfg;
    cfg.dt = max_stable_step(params, delta);
    cfg.t_span = drive.center_time + 30.0 / slowest_rate(params, delta);
    cfg.output_stride = std::numeric_limits<std::size_t>::max();
    const FieldTrace trace = integrate_langevin(params, drive, cfg);
    const Eigen::Index last = trace.times.size() - 1;
    const std::complex<double> ratio = trace.output[last] / trace.input[last];
    const std::complex<double> exact = reflection_coefficient(delta, params);
    out[k] = {delta, ratio, std::abs(ratio - exact) / std::abs(exact)};
  });
  return out;
}

double atomic_excitation_probability(const FieldTrace& trace, double gamma) {
  require(gamma >= 0.0, "atomic_excitation_probability: gamma must be >= 0");
  if (std::abs(trace.input_energy - 1.0) > 1e-3)
    throw InvalidInput("atomic_excitation_probability: trace input energy is " +
                       std::to_string(trace.input_energy) + ", expected 1");
  return gamma * trace.atomic_population_integral;
}

double energy_balance_residual(const FieldTrace& trace, double gamma) {
  require(trace.input_energy > 0.0, "energy_balance_residual: trace carries no input energy");
  return (trace.input_energy - trace.output_energy - gamma * trace.atomic_population_integral -
          trace.stored_energy_final) /
         trace.input_energy;
}

}  // namespace reiqnd
