#include "reiqnd/params.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "reiqnd/error.hpp"

namespace reiqnd {

namespace {

// Nd:YVO4 parameter sets. Rates are ordinary frequencies (Hz) and go through
// the same `_hz` ingestion as user config files. Annotations are literature
// quotes that do not follow from the inputs; they are only ever compared.
constexpr const char* kEmbeddedPresets = R"json({
  "nd_yvo4_demonstrated": {
    "cavity": {"wavelength_m": 879.7e-9, "refractive_index": 2.2, "quality_factor": 20000},
    "ion": {"dipole_moment_c_m": 9.1e-32, "optical_dephasing_rate_hz": 5.9e3,
            "detuning_offstate_hz": 30e9, "coupling_ratio_sq": 1.0, "branching_ratio": 0.104},
    "spin": {"spin_dephasing_rate_hz": 340, "spin_lifetime_s": 0.1},
    "rabi_frequency_hz": 5.9e3,
    "annotations": [
      {"quantity": "cooperativity", "value": 246,
       "remark": "quoted alongside g = 2pi*30.6 MHz, kappa = 2pi*8.5 GHz, gamma = 2pi*5.9 kHz"},
      {"quantity": "cavity_emission_probability", "value": 0.9985,
       "remark": "quoted for beta = 0.104 and F_P = 1520"},
      {"quantity": "resonant_bandwidth_hz", "value": 1.3e6,
       "remark": "quoted width of the resonant reflection feature"}
    ]
  },
  "nd_yvo4_subkelvin": {
    "cavity": {"wavelength_m": 879.7e-9, "refractive_index": 2.2, "quality_factor": 20000},
    "ion": {"dipole_moment_c_m": 9.1e-32, "optical_dephasing_rate_hz": 5.9e3,
            "detuning_offstate_hz": 30e9, "coupling_ratio_sq": 1.0, "branching_ratio": 0.104},
    "spin": {"spin_dephasing_rate_hz": 34, "spin_lifetime_s": 0.1},
    "rabi_frequency_hz": 5.9e3,
    "annotations": [
      {"quantity": "cooperativity", "value": 246,
       "remark": "quoted alongside g = 2pi*30.6 MHz, kappa = 2pi*8.5 GHz, gamma = 2pi*5.9 kHz"}
    ]
  },
  "nd_yvo4_theoretical_q": {
    "cavity": {"wavelength_m": 879.7e-9, "refractive_index": 2.2, "quality_factor": 300000},
    "ion": {"dipole_moment_c_m": 9.1e-32, "optical_dephasing_rate_hz": 5.9e3,
            "detuning_offstate_hz": 30e9, "coupling_ratio_sq": 1.0, "branching_ratio": 0.104},
    "spin": {"spin_dephasing_rate_hz": 34, "spin_lifetime_s": 0.1},
    "rabi_frequency_hz": 5.9e3,
    "annotations": [
      {"quantity": "cooperativity", "value": 7392,
       "remark": "quoted alongside kappa = 2pi*565 MHz, g = 2pi*30.6 MHz"},
      {"quantity": "detection_efficiency", "value": 0.991,
       "remark": "quoted for F_P = 22797, n_M = 2, p_det = 0.9"}
    ]
  }
})json";

const nlohmann::json& embedded_presets() {
  static const nlohmann::json doc = nlohmann::json::parse(kEmbeddedPresets);
  return doc;
}

double number_at(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number())
    throw InvalidInput("config: '" + path + "' must be a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw InvalidInput("config: '" + path + "' must be finite");
  return x;
}

using Setter = std::function<void(double)>;

struct FieldBinding {
  const char* name;
  enum class Unit { plain, rate } unit;
  Setter set;
};

// Rates accept `<name>_hz` (times 2 pi) or `<name>_rad_s`; plain fields use
// their name verbatim.
void apply_block(const nlohmann::json& block, const std::string& block_name,
                 const std::vector<FieldBinding>& fields) {
  if (!block.is_object())
    throw InvalidInput("config: '" + block_name + "' must be an object");
  for (const auto& [key, value] : block.items()) {
    const std::string path = block_name + "." + key;
    bool handled = false;
    for (const auto& field : fields) {
      const std::string name = field.name;
      if (field.unit == FieldBinding::Unit::plain && key == name) {
        field.set(number_at(value, path));
        handled = true;
      } else if (field.unit == FieldBinding::Unit::rate) {
        if (key == name + "_hz") {
          field.set(angular_from_hz(number_at(value, path)));
          handled = true;
        } else if (key == name + "_rad_s") {
          field.set(number_at(value, path));
          handled = true;
        }
      }
      if (handled) break;
    }
    if (!handled) throw InvalidInput("config: unknown key '" + path + "'");
  }
}

std::string format_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

double CavitySpec::effective_mode_volume() const {
  if (mode_volume) return *mode_volume;
  const double reduced = wavelength / refractive_index;
  return reduced * reduced * reduced;
}

void validate(const CavitySpec& spec) {
  require(std::isfinite(spec.wavelength) && spec.wavelength > 0.0,
          "cavity.wavelength must be > 0");
  require(std::isfinite(spec.refractive_index) && spec.refractive_index >= 1.0,
          "cavity.refractive_index must be >= 1");
  require(std::isfinite(spec.quality_factor) && spec.quality_factor > 0.0,
          "cavity.quality_factor must be > 0");
  if (spec.mode_volume)
    require(std::isfinite(*spec.mode_volume) && *spec.mode_volume > 0.0,
            "cavity.mode_volume must be > 0");
}

void validate(const IonSpec& spec) {
  require(std::isfinite(spec.dipole_moment) && spec.dipole_moment > 0.0,
          "ion.dipole_moment must be > 0");
  require(std::isfinite(spec.optical_dephasing_rate) && spec.optical_dephasing_rate >= 0.0,
          "ion.optical_dephasing_rate must be >= 0");
  require(std::isfinite(spec.detuning_offstate) && spec.detuning_offstate >= 0.0,
          "ion.detuning_offstate must be >= 0");
  require(spec.coupling_ratio_sq > 0.0 && spec.coupling_ratio_sq <= 1.0,
          "ion.coupling_ratio_sq must lie in (0, 1]");
  require(spec.branching_ratio > 0.0 && spec.branching_ratio < 1.0,
          "ion.branching_ratio must lie in (0, 1)");
}

void validate(const SpinSpec& spec) {
  require(std::isfinite(spec.spin_dephasing_rate) && spec.spin_dephasing_rate >= 0.0,
          "spin.spin_dephasing_rate must be >= 0");
  require(std::isfinite(spec.spin_lifetime) && spec.spin_lifetime > 0.0,
          "spin.spin_lifetime must be > 0");
}

double cavity_angular_frequency(const CavitySpec& spec) {
  require(std::isfinite(spec.wavelength) && spec.wavelength > 0.0,
          "cavity.wavelength must be > 0");
  return two_pi * PhysicalConstants::speed_of_light / spec.wavelength;
}

double single_photon_field(const CavitySpec& spec) {
  const double volume = spec.effective_mode_volume();
  require(volume > 0.0, "cavity.mode_volume must be > 0");
  const double omega = cavity_angular_frequency(spec);
  return std::sqrt(PhysicalConstants::reduced_planck * omega /
                   (2.0 * PhysicalConstants::vacuum_permittivity * volume));
}

double cavity_linewidth(const CavitySpec& spec) {
  require(spec.quality_factor > 0.0, "cavity.quality_factor must be > 0");
  return cavity_angular_frequency(spec) / (2.0 * spec.quality_factor);
}

double coupling_rate(const IonSpec& ion, double field) {
  require(ion.dipole_moment > 0.0, "ion.dipole_moment must be > 0");
  return ion.dipole_moment * field / (2.0 * PhysicalConstants::reduced_planck);
}

double cooperativity(double coupling, double kappa, double gamma) {
  require(kappa > 0.0, "cooperativity: kappa must be > 0");
  require(gamma > 0.0, "cooperativity: gamma must be > 0");
  return coupling * coupling / (kappa * gamma);
}

double purcell_factor(const CavitySpec& spec) {
  const double volume = spec.effective_mode_volume();
  require(volume > 0.0, "cavity.mode_volume must be > 0");
  const double reduced = spec.wavelength / spec.refractive_index;
  return 3.0 / (4.0 * std::numbers::pi * std::numbers::pi) * reduced * reduced * reduced *
         (spec.quality_factor / volume);
}

std::optional<std::string> discrepancy_note(std::string_view quantity, double computed,
                                            double quoted, double tolerance) {
  const double rel = std::abs(computed - quoted) / std::abs(quoted);
  if (!(rel > tolerance)) return std::nullopt;
  return std::string(quantity) + ": computed " + format_g(computed) + " vs quoted " +
         format_g(quoted) + " (relative difference " + format_g(100.0 * rel) +
         "%); quoted value not used";
}

DerivedParams derive(const CavitySpec& cavity, const IonSpec& ion,
                     std::span<const QuotedValue> quotes) {
  validate(cavity);
  validate(ion);

  DerivedParams out;
  out.cavity_angular_frequency = cavity_angular_frequency(cavity);
  out.single_photon_field = single_photon_field(cavity);
  out.cavity_linewidth = cavity_linewidth(cavity);
  out.coupling_rate = coupling_rate(ion, out.single_photon_field);
  out.cooperativity = ion.optical_dephasing_rate > 0.0
                          ? cooperativity(out.coupling_rate, out.cavity_linewidth,
                                          ion.optical_dephasing_rate)
                          : std::numeric_limits<double>::infinity();
  out.purcell_factor = purcell_factor(cavity);
  out.notes.push_back("gamma taken as 1/T2; kappa is the HWHM omega_c/(2Q)");

  const std::map<std::string, double, std::less<>> recomputed = {
      {"cooperativity", out.cooperativity},
      {"purcell_factor", out.purcell_factor},
      {"single_photon_field", out.single_photon_field},
      {"cavity_linewidth_hz", hz_from_angular(out.cavity_linewidth)},
      {"coupling_rate_hz", hz_from_angular(out.coupling_rate)},
  };
  for (const auto& quote : quotes) {
    const auto it = recomputed.find(quote.quantity);
    if (it == recomputed.end()) continue;
    if (auto note = discrepancy_note(quote.quantity, it->second, quote.value))
      out.notes.push_back(*note);
  }
  return out;
}

CouplingParams coupling_params(const DerivedParams& derived, const IonSpec& ion) {
  CouplingParams p;
  p.coupling = derived.coupling_rate;
  p.coupling_offstate = derived.coupling_rate * std::sqrt(ion.coupling_ratio_sq);
  p.kappa = derived.cavity_linewidth;
  p.gamma = ion.optical_dephasing_rate;
  p.detuning_offstate = ion.detuning_offstate;
  return p;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : embedded_presets().items()) names.push_back(name);
  return names;
}

void apply_overrides(Preset& preset, const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidInput("config: document must be an object");
  if (doc.contains("cavity")) {
    auto& c = preset.cavity;
    apply_block(doc.at("cavity"), "cavity",
                {{"wavelength_m", FieldBinding::Unit::plain, [&](double x) { c.wavelength = x; }},
                 {"refractive_index", FieldBinding::Unit::plain,
                  [&](double x) { c.refractive_index = x; }},
                 {"quality_factor", FieldBinding::Unit::plain,
                  [&](double x) { c.quality_factor = x; }},
                 {"mode_volume_m3", FieldBinding::Unit::plain,
                  [&](double x) { c.mode_volume = x; }}});
  }
  if (doc.contains("ion")) {
    auto& i = preset.ion;
    apply_block(doc.at("ion"), "ion",
                {{"dipole_moment_c_m", FieldBinding::Unit::plain,
                  [&](double x) { i.dipole_moment = x; }},
                 {"optical_dephasing_rate", FieldBinding::Unit::rate,
                  [&](double x) { i.optical_dephasing_rate = x; }},
                 {"detuning_offstate", FieldBinding::Unit::rate,
                  [&](double x) { i.detuning_offstate = x; }},
                 {"coupling_ratio_sq", FieldBinding::Unit::plain,
                  [&](double x) { i.coupling_ratio_sq = x; }},
                 {"branching_ratio", FieldBinding::Unit::plain,
                  [&](double x) { i.branching_ratio = x; }}});
  }
  if (doc.contains("spin")) {
    auto& s = preset.spin;
    apply_block(doc.at("spin"), "spin",
                {{"spin_dephasing_rate", FieldBinding::Unit::rate,
                  [&](double x) { s.spin_dephasing_rate = x; }},
                 {"spin_lifetime_s", FieldBinding::Unit::plain,
                  [&](double x) { s.spin_lifetime = x; }}});
  }
}

Preset load_preset(std::string_view name) {
  const auto& all = embedded_presets();
  const auto it = all.find(std::string(name));
  if (it == all.end()) {
    std::string options;
    for (const auto& n : preset_names()) options += (options.empty() ? "" : ", ") + n;
    throw InvalidInput("unknown preset '" + std::string(name) + "' (options: " + options + ")");
  }
  Preset preset;
  preset.name = std::string(name);
  apply_overrides(preset, *it);
  preset.rabi_frequency = angular_from_hz(it->at("rabi_frequency_hz").get<double>());
  for (const auto& a : it->at("annotations"))
    preset.annotations.push_back(
        {a.at("quantity").get<std::string>(), a.at("value").get<double>(),
         a.at("remark").get<std::string>()});
  validate(preset.cavity);
  validate(preset.ion);
  validate(preset.spin);
  return preset;
}

}  // namespace reiqnd
