#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace reiqnd {

// CODATA 2018. Not configurable.
struct PhysicalConstants {
  static constexpr double reduced_planck = 1.054571817e-34;       // J s
  static constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
  static constexpr double speed_of_light = 299792458.0;           // m/s
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Every rate and frequency in the library is an angular frequency (rad/s).
constexpr double angular_from_hz(double hz) { return two_pi * hz; }
constexpr double hz_from_angular(double rad_s) { return rad_s / two_pi; }

struct CavitySpec {
  double wavelength = 0.0;        // m
  double refractive_index = 1.0;
  double quality_factor = 0.0;
  std::optional<double> mode_volume;  // m^3; (wavelength/n)^3 when absent

  double effective_mode_volume() const;
};

struct IonSpec {
  double dipole_moment = 0.0;           // C m
  double optical_dephasing_rate = 0.0;  // rad/s, taken as 1/T2
  double detuning_offstate = 0.0;       // rad/s, off-state transition vs cavity
  double coupling_ratio_sq = 1.0;       // g_tilde^2 / g^2
  double branching_ratio = 0.0;
};

struct SpinSpec {
  double spin_dephasing_rate = 0.0;  // rad/s
  double spin_lifetime = 0.0;        // s (T1)
};

void validate(const CavitySpec& spec);
void validate(const IonSpec& spec);
void validate(const SpinSpec& spec);

/// A number quoted in the literature for a preset, kept for comparison only.
struct QuotedValue {
  std::string quantity;
  double value = 0.0;
  std::string remark;
};

/// Secondary quantities of a cavity + ion pair.
///
/// cavity_linewidth is the HWHM amplitude decay rate, kappa = omega_c / (2 Q),
/// not the FWHM.
struct DerivedParams {
  double cavity_angular_frequency = 0.0;  // rad/s
  double single_photon_field = 0.0;       // V/m
  double cavity_linewidth = 0.0;          // rad/s, HWHM
  double coupling_rate = 0.0;             // rad/s
  double cooperativity = 0.0;
  double purcell_factor = 0.0;
  std::vector<std::string> notes;
};

double cavity_angular_frequency(const CavitySpec& spec);
double single_photon_field(const CavitySpec& spec);
double cavity_linewidth(const CavitySpec& spec);
double coupling_rate(const IonSpec& ion, double field);
double cooperativity(double coupling, double kappa, double gamma);
double purcell_factor(const CavitySpec& spec);

/// Formats a discrepancy note when `computed` and `quoted` differ by more than
/// `tolerance` (relative to the quote).
std::optional<std::string> discrepancy_note(std::string_view quantity, double computed,
                                            double quoted, double tolerance = 0.10);

/// Runs the full derivation chain. Any quote in `quotes` whose quantity is one
/// of the derived fields is compared against the recomputed value and, when
/// inconsistent, reported in `notes`; quotes never enter the computation.
DerivedParams derive(const CavitySpec& cavity, const IonSpec& ion,
                     std::span<const QuotedValue> quotes = {});

/// Rates consumed by the reflection, dynamics and protocol models.
struct CouplingParams {
  double coupling = 0.0;          // g, resonant transition
  double coupling_offstate = 0.0; // g_tilde
  double kappa = 0.0;
  double gamma = 0.0;
  double detuning_offstate = 0.0; // Delta
};

CouplingParams coupling_params(const DerivedParams& derived, const IonSpec& ion);

struct Preset {
  std::string name;
  CavitySpec cavity;
  IonSpec ion;
  SpinSpec spin;
  double rabi_frequency = 0.0;  // rad/s, readout pump
  std::vector<QuotedValue> annotations;
};

std::vector<std::string> preset_names();
Preset load_preset(std::string_view name);

/// Applies the `cavity`, `ion` and `spin` blocks of a JSON document to
/// `preset`; other top-level keys are left to the caller. Keys ending in `_hz`
/// are ordinary frequencies and are multiplied by 2 pi; keys ending in
/// `_rad_s` are taken as is. Unknown keys and ill-typed values are rejected
/// with the offending path in the message.
void apply_overrides(Preset& preset, const nlohmann::json& doc);

}  // namespace reiqnd
