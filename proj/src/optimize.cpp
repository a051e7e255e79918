#include "reiqnd/optimize.hpp"

#include <algorithm>
#include <numbers>

#include "reiqnd/parallel.hpp"
#include "reiqnd/reflection.hpp"

namespace reiqnd {

namespace {

constexpr std::size_t kUnimodalitySamples = 33;
constexpr double kSearchTolerance = 1e-4;

void check_unimodal(const std::vector<double>& values) {
  const auto peak = std::max_element(values.begin(), values.end()) - values.begin();
  const double slack = 1e-12 * std::max(1.0, std::abs(values[peak]));
  for (std::ptrdiff_t k = 1; k <= peak; ++k)
    if (values[k] < values[k - 1] - slack)
      throw NumericalIntegrity("maximize_fidelity: objective is not unimodal on the bracket");
  for (std::size_t k = peak + 1; k < values.size(); ++k)
    if (values[k] > values[k - 1] + slack)
      throw NumericalIntegrity("maximize_fidelity: objective is not unimodal on the bracket");
}

}  // namespace

std::string to_string(OptimumMethod method) {
  return method == OptimumMethod::closed_form ? "closed_form" : "golden_section";
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo, "log_spaced_grid: need 0 < lo < hi");
  require(n >= 2, "log_spaced_grid: need at least two points");
  std::vector<double> grid(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) grid[k] = lo * std::exp(step * static_cast<double>(k));
  grid.back() = hi;
  return grid;
}

Optimum optimal_pulse_duration_closed_form(const CouplingParams& params,
                                           const DephasingPolicy& policy,
                                           const ProtocolErrors& errors,
                                           double detection_efficiency) {
  validate(policy);
  require(params.coupling > 0.0 && params.kappa > 0.0,
          "optimal_pulse_duration_closed_form: g and kappa must be > 0");
  if (!(policy.spin_dephasing_rate > 0.0))
    throw InvalidInput(
        "optimal_pulse_duration_closed_form: gamma_gs = 0 leaves the optimum unbounded");
  const double a = params.kappa * std::sqrt(std::numbers::ln2) /
                   (2.0 * std::numbers::pi * params.coupling * params.coupling);
  const double t_star =
      std::sqrt(4.0 * a / (policy.superposition_time_multiplier * policy.spin_dephasing_rate));
  Optimum opt;
  opt.t_p_star = t_star;
  opt.fidelity_star =
      fidelity_closed_form(params, policy, errors, detection_efficiency, t_star).value;
  opt.method = OptimumMethod::closed_form;
  opt.bracket = {t_star, t_star};
  return opt;
}

Optimum maximize_fidelity(const CouplingParams& params, const DephasingPolicy& policy,
                          const ProtocolErrors& errors, double detection_efficiency,
                          std::optional<std::pair<double, double>> bracket,
                          FidelityObjective objective) {
  const double t_closed =
      optimal_pulse_duration_closed_form(params, policy, errors, detection_efficiency).t_p_star;
  const auto [lo, hi] = bracket.value_or(std::pair{0.1 * t_closed, 10.0 * t_closed});
  require(lo > 0.0 && hi > lo, "maximize_fidelity: bracket must satisfy 0 < lo < hi");
  require(lo <= t_closed / 4.0 && hi >= 4.0 * t_closed,
          "maximize_fidelity: bracket must extend a factor 4 past the closed-form optimum");

  auto fidelity = [&](double t_p) {
    if (objective == FidelityObjective::closed_form)
      return fidelity_closed_form(params, policy, errors, detection_efficiency, t_p).value;
    return run_protocol(params, policy, errors, detection_efficiency, t_p).fidelity_exact;
  };

  std::vector<double> samples;
  for (double t : log_spaced_grid(lo, hi, kUnimodalitySamples)) samples.push_back(fidelity(t));
  check_unimodal(samples);

  // A width w in ln T_p is a relative width w in T_p to first order.
  const double log_t = golden_section_maximize<double>(
      [&](double x) { return fidelity(std::exp(x)); }, std::log(lo), std::log(hi),
      kSearchTolerance);
  Optimum opt;
  opt.t_p_star = std::exp(log_t);
  opt.fidelity_star = fidelity(opt.t_p_star);
  opt.method = OptimumMethod::golden_section;
  opt.bracket = {lo, hi};
  return opt;
}

std::vector<ScanPoint> fidelity_scan(const CouplingParams& params, const DephasingPolicy& policy,
                                     const ProtocolErrors& errors, double detection_efficiency,
                                     const std::vector<double>& t_p_grid, unsigned workers) {
  require(!t_p_grid.empty(), "fidelity_scan: empty grid");
  require(t_p_grid.front() > 0.0, "fidelity_scan: grid must be positive");
  for (std::size_t k = 1; k < t_p_grid.size(); ++k)
    require(t_p_grid[k] > t_p_grid[k - 1], "fidelity_scan: grid must be strictly increasing");

  std::vector<ScanPoint> out(t_p_grid.size());
  parallel_for(t_p_grid.size(), workers, [&](std::size_t k) {
    const double t = t_p_grid[k];
    const ProtocolRun run = run_protocol(params, policy, errors, detection_efficiency, t);
    out[k] = {t, run.closed_form.value, run.fidelity_exact};
  });
  return out;
}

}  // namespace reiqnd
