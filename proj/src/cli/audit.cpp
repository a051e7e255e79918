#include "reiqnd/cli/audit.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "reiqnd/cli/csv.hpp"
#include "reiqnd/optimize.hpp"
#include "reiqnd/params.hpp"
#include "reiqnd/protocol.hpp"
#include "reiqnd/readout.hpp"

namespace reiqnd::cli {

namespace {

constexpr double kDefaultThreshold = 0.02;
constexpr double kFidelityThreshold = 0.10;

// Coherence times quoted next to the rates they were converted from.
constexpr double kOpticalT2 = 27e-6;  // s
constexpr double kSpinT2 = 471e-6;    // s

struct PresetFigures {
  DerivedParams derived;
  CouplingParams coupling;
  double p_cav = 0.0;
  double eta = 0.0;
  double n_cyc = 0.0;
  double p_off = 0.0;
  Optimum optimum;
};

PresetFigures compute(const std::string& name, const AuditSettings& s) {
  const Preset preset = load_preset(name);
  PresetFigures f;
  f.derived = derive(preset.cavity, preset.ion);
  f.coupling = coupling_params(f.derived, preset.ion);
  f.p_cav = cavity_emission_probability(preset.ion.branching_ratio, f.derived.purcell_factor);
  f.eta = detection_efficiency(f.p_cav, s.p_det, s.n_m);
  f.n_cyc = expected_cycles(f.p_cav);
  f.p_off = false_positive_probability(preset.rabi_frequency, preset.ion.detuning_offstate,
                                       f.n_cyc, preset.ion.coupling_ratio_sq);
  const DephasingPolicy policy{preset.spin.spin_dephasing_rate, s.alpha};
  f.optimum = maximize_fidelity(f.coupling, policy, {}, f.eta);
  return f;
}

}  // namespace

std::string to_string(Verdict verdict) { return verdict == Verdict::match ? "match" : "flagged"; }

std::vector<const AuditEntry*> AuditReport::flagged() const {
  std::vector<const AuditEntry*> out;
  for (const auto& e : entries)
    if (e.verdict == Verdict::flagged) out.push_back(&e);
  return out;
}

Verdict judge(double computed, double quoted, Comparison comparison, double threshold,
              double quote_half_unit, double* relative_difference) {
  double rel = 0.0;
  bool ok = false;
  switch (comparison) {
    case Comparison::relative:
      rel = std::abs(computed - quoted) / std::abs(quoted);
      ok = rel <= threshold;
      break;
    case Comparison::complement:
      rel = std::abs((1.0 - computed) - (1.0 - quoted)) / std::abs(1.0 - quoted);
      ok = rel <= threshold;
      break;
    case Comparison::upper_bound:
      rel = (computed - quoted) / std::abs(quoted);
      ok = computed <= quoted;
      break;
  }
  if (comparison != Comparison::upper_bound && std::abs(computed - quoted) <= quote_half_unit)
    ok = true;
  if (relative_difference) *relative_difference = rel;
  return ok ? Verdict::match : Verdict::flagged;
}

namespace {

AuditEntry make_entry(const std::string& preset, const std::string& quantity, double quoted,
                      double computed, double half_unit, Comparison comparison,
                      double threshold) {
  AuditEntry e{preset, quantity, quoted, computed, 0.0, comparison, threshold, half_unit,
               Verdict::match};
  e.verdict = judge(computed, quoted, comparison, threshold, half_unit, &e.relative_difference);
  return e;
}

}  // namespace

std::vector<AuditEntry> audit_parameter_chain(const std::string& preset, const CavitySpec& cavity,
                                              const DerivedParams& derived, bool include_field) {
  struct ChainQuotes {
    double linewidth_hz, linewidth_half_unit, cooperativity, purcell;
  };
  std::optional<ChainQuotes> q;
  if (cavity.quality_factor == 20000.0) q = ChainQuotes{8.5e9, 0.05e9, 246.0, 1520.0};
  if (cavity.quality_factor == 300000.0) q = ChainQuotes{565e6, 0.5e6, 7392.0, 22797.0};
  std::vector<AuditEntry> out;
  if (!q) return out;
  const auto rel = Comparison::relative;
  if (include_field)
    out.push_back(make_entry(preset, "single_photon_field_v_per_m", 446229.0,
                             derived.single_photon_field, 0.5, rel, kDefaultThreshold));
  out.push_back(make_entry(preset, "cavity_linewidth_hz", q->linewidth_hz,
                           hz_from_angular(derived.cavity_linewidth), q->linewidth_half_unit, rel,
                           kDefaultThreshold));
  out.push_back(make_entry(preset, "coupling_rate_hz", 30.6e6,
                           hz_from_angular(derived.coupling_rate), 0.05e6, rel,
                           kDefaultThreshold));
  out.push_back(make_entry(preset, "cooperativity", q->cooperativity, derived.cooperativity, 0.5,
                           rel, kDefaultThreshold));
  out.push_back(make_entry(preset, "purcell_factor", q->purcell, derived.purcell_factor, 0.5, rel,
                           kDefaultThreshold));
  return out;
}

AuditReport run_audit(const AuditSettings& settings) {
  const std::string demo = "nd_yvo4_demonstrated";
  const std::string cold = "nd_yvo4_subkelvin";
  const std::string high_q = "nd_yvo4_theoretical_q";
  std::map<std::string, PresetFigures> figs;
  for (const auto& name : {demo, cold, high_q}) figs.emplace(name, compute(name, settings));
  const auto& d = figs.at(demo);
  const auto& h = figs.at(high_q);

  const Preset demo_preset = load_preset(demo);
  const Preset high_q_preset = load_preset(high_q);
  const double bandwidth =
      d.coupling.coupling * d.coupling.coupling / d.coupling.kappa + d.coupling.gamma / 2.0;

  AuditReport report;
  auto add = [&](const std::string& preset, const std::string& quantity, double quoted,
                 double computed, double half_unit,
                 Comparison comparison = Comparison::relative,
                 double threshold = kDefaultThreshold) {
    report.entries.push_back(
        make_entry(preset, quantity, quoted, computed, half_unit, comparison, threshold));
  };
  auto add_chain = [&](const std::string& preset, const Preset& p, const DerivedParams& derived,
                       bool include_field) {
    for (auto& e : audit_parameter_chain(preset, p.cavity, derived, include_field))
      report.entries.push_back(e);
  };

  add(demo, "mode_volume_um3", 0.064, demo_preset.cavity.effective_mode_volume() * 1e18, 0.0005);
  add(demo, "optical_dephasing_rate_hz", 5.9e3, hz_from_angular(1.0 / kOpticalT2), 50.0);
  add_chain(demo, demo_preset, d.derived, true);
  add(demo, "cavity_emission_probability", 0.9985, d.p_cav, 0.00005, Comparison::complement);
  add(demo, "detection_efficiency", 0.988, d.eta, 0.0005, Comparison::complement);
  add(demo, "spin_dephasing_rate_hz", 340.0, hz_from_angular(1.0 / kSpinT2), 5.0);
  add(demo, "resonant_bandwidth_hz", 1.3e6, hz_from_angular(bandwidth), 0.05e6);
  add(demo, "optimal_pulse_duration_us", 13.0, d.optimum.t_p_star * 1e6, 0.5);
  add(demo, "fidelity", 0.934, d.optimum.fidelity_star, 0.0005, Comparison::complement,
      kFidelityThreshold);
  add(demo, "false_positive_probability", 1e-4, d.p_off, 0.0, Comparison::upper_bound);
  add(cold, "fidelity", 0.953, figs.at(cold).optimum.fidelity_star, 0.0005,
      Comparison::complement, kFidelityThreshold);
  add_chain(high_q, high_q_preset, h.derived, false);
  add(high_q, "detection_efficiency", 0.991, h.eta, 0.0005, Comparison::complement);
  add(high_q, "optimal_pulse_duration_us", 11.0, h.optimum.t_p_star * 1e6, 0.5);
  add(high_q, "fidelity", 0.995, h.optimum.fidelity_star, 0.0005, Comparison::complement,
      kFidelityThreshold);
  return report;
}

nlohmann::ordered_json to_json(const AuditReport& report) {
  static const char* comparison_names[] = {"relative", "complement", "upper_bound"};
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json j;
    j["preset"] = e.preset;
    j["quantity"] = e.quantity;
    j["paper_value"] = e.paper_value;
    j["computed_value"] = e.computed_value;
    j["relative_difference"] = e.relative_difference;
    j["comparison"] = comparison_names[static_cast<int>(e.comparison)];
    j["threshold"] = e.threshold;
    j["verdict"] = to_string(e.verdict);
    entries.push_back(j);
  }
  nlohmann::ordered_json out;
  out["entries"] = entries;
  out["flagged_count"] = report.flagged().size();
  return out;
}

std::string to_csv(const AuditReport& report) {
  CsvWriter csv({"preset", "quantity", "paper_value", "computed_value", "relative_difference",
                 "verdict"});
  for (const auto& e : report.entries)
    csv.row(std::vector<std::string>{e.preset, e.quantity, format_number(e.paper_value),
                                     format_number(e.computed_value),
                                     format_number(e.relative_difference), to_string(e.verdict)});
  return csv.str();
}

}  // namespace reiqnd::cli
