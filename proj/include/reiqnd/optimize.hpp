#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reiqnd/error.hpp"
#include "reiqnd/params.hpp"
#include "reiqnd/protocol.hpp"

namespace reiqnd {

enum class OptimumMethod { closed_form, golden_section };

std::string to_string(OptimumMethod method);

struct Optimum {
  double t_p_star = 0.0;  // s
  double fidelity_star = 0.0;
  OptimumMethod method = OptimumMethod::closed_form;
  std::pair<double, double> bracket;  // s
};

/// Golden-section search for the maximum of a unimodal `fn` on [lo, hi].
/// Stops once the bracket is narrower than `tol`.
template <typename Scalar, typename Fn>
Scalar golden_section_maximize(Fn&& fn, Scalar lo, Scalar hi, Scalar tol) {
  if (!(hi > lo)) throw InvalidInput("golden_section_maximize: empty bracket");
  if (!(tol > Scalar(0))) throw InvalidInput("golden_section_maximize: tol must be > 0");
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar a = lo, b = hi;
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = fn(c), fd = fn(d);
  while ((b - a) > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return (a + b) / Scalar(2);
}

/// `n` points log-spaced over [lo, hi], endpoints included.
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t n);

/// Stationary point of the closed-form fidelity, where the bandwidth and
/// dephasing losses are equal:
///
///   T_p* = sqrt(4 A / (alpha gamma_gs)),  A = kappa sqrt(ln2) / (2 pi g^2)
///
/// Throws InvalidInput when gamma_gs = 0 (fidelity then grows without bound
/// in T_p). The bracket is [T_p*, T_p*].
Optimum optimal_pulse_duration_closed_form(const CouplingParams& params,
                                           const DephasingPolicy& policy,
                                           const ProtocolErrors& errors = {},
                                           double detection_efficiency = 1.0);

enum class FidelityObjective { closed_form, exact };

/// Golden-section search in ln T_p with relative tolerance 1e-4. The default
/// bracket is [0.1, 10] times the closed-form optimum; a supplied bracket
/// must reach a factor 4 past it on each side. Before searching, 33
/// log-spaced samples are checked for a single interior maximum; otherwise
/// NumericalIntegrity is thrown.
Optimum maximize_fidelity(const CouplingParams& params, const DephasingPolicy& policy,
                          const ProtocolErrors& errors, double detection_efficiency,
                          std::optional<std::pair<double, double>> bracket = std::nullopt,
                          FidelityObjective objective = FidelityObjective::closed_form);

struct ScanPoint {
  double t_p = 0.0;  // s
  double fidelity = 0.0;        // closed form
  double fidelity_exact = 0.0;  // density-matrix pipeline
};

/// Both fidelities at every grid point. Grid must be positive and strictly
/// increasing; points run on up to `workers` threads, output order follows
/// the grid.
std::vector<ScanPoint> fidelity_scan(const CouplingParams& params, const DephasingPolicy& policy,
                                     const ProtocolErrors& errors, double detection_efficiency,
                                     const std::vector<double>& t_p_grid, unsigned workers = 1);

}  // namespace reiqnd
