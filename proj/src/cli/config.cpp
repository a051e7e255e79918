#include "reiqnd/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "reiqnd/error.hpp"

namespace reiqnd::cli {

namespace {

using nlohmann::json;

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw InvalidInput("config: '" + path + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInput("config: '" + path + "' must be finite");
  return x;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InvalidInput("config: '" + path + "' must be a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

using Handler = std::function<void(const json&, const std::string&)>;

void read_block(const json& doc, const std::string& name,
                const std::map<std::string, Handler>& handlers) {
  if (!doc.contains(name)) return;
  const json& block = doc.at(name);
  if (!block.is_object()) throw InvalidInput("config: '" + name + "' must be an object");
  for (const auto& [key, value] : block.items()) {
    const auto it = handlers.find(key);
    const std::string path = name + "." + key;
    if (it == handlers.end()) throw InvalidInput("config: unknown key '" + path + "'");
    it->second(value, path);
  }
}

Handler number_into(double& target) {
  return [&target](const json& v, const std::string& p) { target = as_number(v, p); };
}

Handler optional_into(std::optional<double>& target) {
  return [&target](const json& v, const std::string& p) { target = as_number(v, p); };
}

Handler count_into(std::size_t& target) {
  return [&target](const json& v, const std::string& p) { target = as_count(v, p); };
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw InvalidInput("unknown format '" + text + "' (options: csv, json)");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

void merge_config(RunConfig& cfg, const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config: document must be an object");
  static const char* known[] = {"preset",   "cavity",   "ion",      "spin",     "readout",
                                "protocol", "model",    "spectrum", "dynamics", "optimize"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw InvalidInput("config: unknown key '" + key + "'");
  }

  if (doc.contains("preset")) {
    if (!doc.at("preset").is_string()) throw InvalidInput("config: 'preset' must be a string");
    cfg.preset = doc.at("preset").get<std::string>();
  }
  for (const char* block : {"cavity", "ion", "spin"}) {
    if (!doc.contains(block)) continue;
    if (!doc.at(block).is_object())
      throw InvalidInput(std::string("config: '") + block + "' must be an object");
    for (const auto& [key, value] : doc.at(block).items())
      cfg.physics_overrides[block][key] = value;
  }

  read_block(doc, "readout",
             {{"n_m",
               [&](const json& v, const std::string& p) {
                 cfg.n_m = static_cast<int>(as_count(v, p));
               }},
              {"p_det", number_into(cfg.p_det)},
              {"n_cyc", optional_into(cfg.n_cyc)},
              {"rabi_frequency_hz",
               [&](const json& v, const std::string& p) {
                 cfg.rabi_frequency = angular_from_hz(as_number(v, p));
               }},
              {"rabi_frequency_rad_s", optional_into(cfg.rabi_frequency)}});
  read_block(doc, "protocol",
             {{"alpha", number_into(cfg.alpha)},
              {"phi_p", number_into(cfg.phi_p)},
              {"phi_r", number_into(cfg.phi_r)},
              {"t_p_us", optional_into(cfg.t_p_us)}});
  read_block(doc, "model",
             {{"kappa_over_g", number_into(cfg.model.kappa_over_g)},
              {"gamma_over_g", number_into(cfg.model.gamma_over_g)},
              {"offstate_detuning_over_g", number_into(cfg.model.offstate_detuning_over_g)}});
  read_block(doc, "spectrum",
             {{"delta_min_over_g", number_into(cfg.spectrum.delta_min_over_g)},
              {"delta_max_over_g", number_into(cfg.spectrum.delta_max_over_g)},
              {"points", count_into(cfg.spectrum.points)}});
  read_block(doc, "dynamics",
             {{"t_p_times_g", number_into(cfg.dynamics.t_p_times_g)},
              {"carrier_over_g", number_into(cfg.dynamics.carrier_over_g)},
              {"ion_detuning_over_g", number_into(cfg.dynamics.ion_detuning_over_g)},
              {"amplitude_scale", number_into(cfg.dynamics.amplitude_scale)},
              {"output_stride", count_into(cfg.dynamics.output_stride)},
              {"transfer_detunings_over_g", [&](const json& v, const std::string& p) {
                 if (!v.is_array()) throw InvalidInput("config: '" + p + "' must be an array");
                 cfg.dynamics.transfer_detunings_over_g.clear();
                 for (std::size_t k = 0; k < v.size(); ++k)
                   cfg.dynamics.transfer_detunings_over_g.push_back(
                       as_number(v[k], p + "[" + std::to_string(k) + "]"));
               }}});
  read_block(doc, "optimize",
             {{"t_p_min_us", number_into(cfg.optimize.t_p_min_us)},
              {"t_p_max_us", number_into(cfg.optimize.t_p_max_us)},
              {"points", count_into(cfg.optimize.points)}});
}

void merge_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw InvalidInput("config file '" + path + "' is not valid JSON: " + e.what());
  }
  merge_config(cfg, doc);
}

unsigned default_workers() {
  if (const char* env = std::getenv("REIQND_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1)
      throw InvalidInput("REIQND_WORKERS must be a positive integer");
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Preset resolve_preset(const RunConfig& cfg) {
  Preset preset = load_preset(cfg.preset);
  apply_overrides(preset, cfg.physics_overrides);
  if (cfg.rabi_frequency) preset.rabi_frequency = *cfg.rabi_frequency;
  validate(preset.cavity);
  validate(preset.ion);
  validate(preset.spin);
  require(preset.rabi_frequency >= 0.0, "readout.rabi_frequency must be >= 0");
  return preset;
}

void validate(const RunConfig& cfg) {
  const double quarter_pi = std::numbers::pi / 4.0;
  require(cfg.alpha >= 1.0, "protocol.alpha must be >= 1");
  require(std::abs(cfg.phi_p) < quarter_pi, "protocol.phi_p must satisfy |phi_p| < pi/4");
  require(std::abs(cfg.phi_r) < quarter_pi, "protocol.phi_r must satisfy |phi_r| < pi/4");
  if (cfg.t_p_us) require(*cfg.t_p_us > 0.0, "protocol.t_p_us must be > 0");
  require(cfg.n_m >= 1, "readout.n_m must be >= 1");
  require(cfg.p_det > 0.0 && cfg.p_det <= 1.0, "readout.p_det must lie in (0, 1]");
  if (cfg.n_cyc) require(*cfg.n_cyc > 0.0, "readout.n_cyc must be > 0");

  require(cfg.model.kappa_over_g > 1.0, "model.kappa_over_g must be > 1 (bad cavity)");
  require(cfg.model.gamma_over_g >= 0.0, "model.gamma_over_g must be >= 0");
  require(cfg.model.offstate_detuning_over_g > 0.0, "model.offstate_detuning_over_g must be > 0");

  require(cfg.spectrum.delta_max_over_g > cfg.spectrum.delta_min_over_g,
          "spectrum: delta_max_over_g must exceed delta_min_over_g");
  require(cfg.spectrum.points >= 2, "spectrum.points must be >= 2");

  require(cfg.dynamics.t_p_times_g > 0.0, "dynamics.t_p_times_g must be > 0");
  require(cfg.dynamics.output_stride >= 1, "dynamics.output_stride must be >= 1");

  require(cfg.optimize.points >= 1, "optimize: empty T_p grid");
  require(cfg.optimize.t_p_min_us > 0.0, "optimize.t_p_min_us must be > 0");
  require(cfg.optimize.points == 1 || cfg.optimize.t_p_max_us > cfg.optimize.t_p_min_us,
          "optimize.t_p_max_us must exceed t_p_min_us");
  require(cfg.workers >= 1, "worker count must be >= 1");
}

}  // namespace reiqnd::cli
