#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reiqnd/params.hpp"

namespace reiqnd::cli {

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& text);
std::string to_string(OutputFormat format);

/// Normalized model used by `spectrum` and `dynamics`: rates in units of g.
struct NormalizedModel {
  double kappa_over_g = 10.0;
  double gamma_over_g = 0.01;
  double offstate_detuning_over_g = 20.0;  // Delta for the shelved-state curve
};

struct SpectrumOptions {
  double delta_min_over_g = -30.0;
  double delta_max_over_g = 30.0;
  std::size_t points = 1201;
};

struct DynamicsOptions {
  double t_p_times_g = 200.0;  // pulse intensity HWHM in units of 1/g
  double carrier_over_g = 0.0;
  double ion_detuning_over_g = 0.0;
  double amplitude_scale = 1.0;  // 1 = one photon; 0 = no drive
  std::size_t output_stride = 20;
  std::vector<double> transfer_detunings_over_g = {-10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0};
};

struct OptimizeOptions {
  double t_p_min_us = 1.0;
  double t_p_max_us = 100.0;
  std::size_t points = 199;
};

/// Everything a subcommand needs. Precedence, lowest first: built-in
/// defaults, the selected preset, the `--config` file, command-line flags.
struct RunConfig {
  std::string preset = "nd_yvo4_demonstrated";
  nlohmann::json physics_overrides = nlohmann::json::object();  // cavity/ion/spin
  std::optional<double> rabi_frequency;                        // rad/s

  double alpha = 2.0;
  double phi_p = 0.0;
  double phi_r = 0.0;
  std::optional<double> t_p_us;

  int n_m = 2;
  double p_det = 0.9;
  std::optional<double> n_cyc;

  NormalizedModel model;
  SpectrumOptions spectrum;
  DynamicsOptions dynamics;
  OptimizeOptions optimize;

  std::optional<std::string> out;
  std::optional<OutputFormat> format;
  bool timestamp = true;
  unsigned workers = 1;
};

/// Merges a JSON config document into `cfg`. Recognised top-level keys:
/// preset, cavity, ion, spin, readout, protocol, model, spectrum, dynamics,
/// optimize. Unknown keys and ill-typed values raise InvalidInput naming the
/// offending path.
void merge_config(RunConfig& cfg, const nlohmann::json& doc);

/// Reads and merges a config file; IoError if unreadable, InvalidInput if not
/// valid JSON.
void merge_config_file(RunConfig& cfg, const std::string& path);

/// Worker count from REIQND_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Preset with overrides applied and every physical invariant checked.
Preset resolve_preset(const RunConfig& cfg);

/// Checks option ranges that do not depend on the preset.
void validate(const RunConfig& cfg);

}  // namespace reiqnd::cli
