#include "reiqnd/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "reiqnd/cli/audit.hpp"
#include "reiqnd/cli/csv.hpp"
#include "reiqnd/dynamics.hpp"
#include "reiqnd/error.hpp"
#include "reiqnd/optimize.hpp"
#include "reiqnd/protocol.hpp"
#include "reiqnd/readout.hpp"
#include "reiqnd/reflection.hpp"

namespace reiqnd::cli {

namespace {

using ojson = nlohmann::ordered_json;

ojson complex_json(std::complex<double> z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

ojson matrix_json(const JointConditionalState& rho) {
  ojson re = ojson::array(), im = ojson::array();
  for (int r = 0; r < 2; ++r) {
    re.push_back({rho(r, 0).real(), rho(r, 1).real()});
    im.push_back({rho(r, 0).imag(), rho(r, 1).imag()});
  }
  return ojson{{"re", re}, {"im", im}};
}

// Physical chain shared by derive, protocol, readout and optimize.
struct PresetContext {
  Preset preset;
  DerivedParams derived;
  CouplingParams coupling;
  double p_cav = 0.0;
  double eta = 0.0;
};

PresetContext build_context(const Preset& preset, const RunConfig& cfg) {
  PresetContext c;
  c.preset = preset;
  c.derived = derive(preset.cavity, preset.ion, preset.annotations);
  c.coupling = coupling_params(c.derived, preset.ion);
  c.p_cav = cavity_emission_probability(preset.ion.branching_ratio, c.derived.purcell_factor);
  c.eta = detection_efficiency(c.p_cav, cfg.p_det, cfg.n_m);
  return c;
}

PresetContext build_context(const RunConfig& cfg) {
  validate(cfg);
  return build_context(resolve_preset(cfg), cfg);
}

ojson inputs_json(const Preset& p) {
  ojson j;
  j["wavelength_m"] = p.cavity.wavelength;
  j["refractive_index"] = p.cavity.refractive_index;
  j["quality_factor"] = p.cavity.quality_factor;
  j["mode_volume_m3"] = p.cavity.effective_mode_volume();
  j["dipole_moment_c_m"] = p.ion.dipole_moment;
  j["optical_dephasing_rate_hz"] = hz_from_angular(p.ion.optical_dephasing_rate);
  j["detuning_offstate_hz"] = hz_from_angular(p.ion.detuning_offstate);
  j["coupling_ratio_sq"] = p.ion.coupling_ratio_sq;
  j["branching_ratio"] = p.ion.branching_ratio;
  j["spin_dephasing_rate_hz"] = hz_from_angular(p.spin.spin_dephasing_rate);
  j["spin_lifetime_s"] = p.spin.spin_lifetime;
  j["rabi_frequency_hz"] = hz_from_angular(p.rabi_frequency);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

CommandOutput cmd_derive(const RunConfig& cfg) {
  const PresetContext c = build_context(cfg);
  const DerivedParams& d = c.derived;
  CommandOutput out;
  ojson& r = out.report;
  r["command"] = "derive";
  r["preset"] = c.preset.name;
  r["inputs"] = inputs_json(c.preset);
  ojson derived;
  derived["cavity_angular_frequency_rad_s"] = d.cavity_angular_frequency;
  derived["single_photon_field_v_per_m"] = d.single_photon_field;
  derived["cavity_linewidth_rad_s"] = d.cavity_linewidth;
  derived["cavity_linewidth_hz"] = hz_from_angular(d.cavity_linewidth);
  derived["coupling_rate_rad_s"] = d.coupling_rate;
  derived["coupling_rate_hz"] = hz_from_angular(d.coupling_rate);
  derived["cooperativity"] = d.cooperativity;
  derived["purcell_factor"] = d.purcell_factor;
  r["derived"] = derived;
  r["notes"] = d.notes;
  AuditReport audit{audit_parameter_chain(c.preset.name, c.preset.cavity, d, true)};
  r["audit"] = to_json(audit)["entries"];
  return out;
}

CommandOutput cmd_spectrum(const RunConfig& cfg) {
  validate(cfg);
  const auto& m = cfg.model;
  const auto& s = cfg.spectrum;
  CsvWriter csv({"Delta_over_g", "delta_over_g", "re", "im", "abs", "phase_rad"});
  CommandOutput out;
  ojson& r = out.report;
  r["command"] = "spectrum";
  r["model"] = {{"g", 1.0}, {"kappa_over_g", m.kappa_over_g}, {"gamma_over_g", m.gamma_over_g}};
  ojson cases = ojson::array();
  double max_abs_all = 0.0;
  for (double ion_detuning : {0.0, m.offstate_detuning_over_g}) {
    const CavityIonParams params{1.0, m.kappa_over_g, m.gamma_over_g, ion_detuning};
    const auto sweep = spectrum_sweep(params, s.delta_min_over_g, s.delta_max_over_g, s.points,
                                      cfg.workers);
    double max_abs = 0.0, min_re = 1.0;
    for (const auto& a : sweep) {
      csv.row(std::vector<double>{ion_detuning, a.detuning, a.value.real(), a.value.imag(),
                                  std::abs(a.value), std::arg(a.value)});
      max_abs = std::max(max_abs, std::abs(a.value));
      min_re = std::min(min_re, a.value.real());
    }
    max_abs_all = std::max(max_abs_all, max_abs);
    ojson c;
    c["Delta_over_g"] = ion_detuning;
    c["points"] = sweep.size();
    c["max_abs"] = max_abs;
    c["min_re"] = min_re;
    c["r_at_zero"] = complex_json(reflection_coefficient(0.0, params));
    cases.push_back(c);
  }
  r["cases"] = cases;
  r["passive"] = max_abs_all <= 1.0 + 1e-9;
  out.csv = csv.str();
  out.preferred = OutputFormat::csv;
  return out;
}

CommandOutput cmd_dynamics(const RunConfig& cfg) {
  validate(cfg);
  const auto& m = cfg.model;
  const auto& dyn = cfg.dynamics;
  const CavityIonParams params{1.0, m.kappa_over_g, m.gamma_over_g, dyn.ion_detuning_over_g};

  PulseShape pulse =
      unit_energy_gaussian(dyn.t_p_times_g, dyn.carrier_over_g, 4.0 * dyn.t_p_times_g);
  pulse.peak_amplitude *= dyn.amplitude_scale;
  IntegrationConfig icfg = default_config(params, pulse);
  icfg.output_stride = dyn.output_stride;
  const FieldTrace trace = integrate_langevin(params, pulse, icfg);

  CsvWriter csv({"t_times_g", "re_a", "im_a", "re_s", "im_s", "re_out", "im_out"});
  for (Eigen::Index k = 0; k < trace.times.size(); ++k)
    csv.row(std::vector<double>{trace.times[k], trace.cavity_amplitude[k].real(),
                                trace.cavity_amplitude[k].imag(), trace.atomic_amplitude[k].real(),
                                trace.atomic_amplitude[k].imag(), trace.output[k].real(),
                                trace.output[k].imag()});

  std::vector<double> detunings = dyn.transfer_detunings_over_g;
  const auto transfer = transfer_function_check(params, detunings, cfg.workers);
  double max_err = 0.0;
  ojson samples = ojson::array();
  for (const auto& t : transfer) {
    max_err = std::max(max_err, t.relative_error);
    samples.push_back({{"delta_over_g", t.detuning},
                       {"ratio", complex_json(t.ratio)},
                       {"relative_error", t.relative_error}});
  }

  CommandOutput out;
  ojson& r = out.report;
  r["command"] = "dynamics";
  r["model"] = {{"g", 1.0},
                {"kappa_over_g", m.kappa_over_g},
                {"gamma_over_g", m.gamma_over_g},
                {"ion_detuning_over_g", dyn.ion_detuning_over_g}};
  r["pulse"] = {{"t_p_times_g", dyn.t_p_times_g},
                {"carrier_over_g", dyn.carrier_over_g},
                {"amplitude_scale", dyn.amplitude_scale}};
  r["integration"] = {{"dt_times_g", icfg.dt},
                      {"t_span_times_g", icfg.t_span},
                      {"method", "rk4"},
                      {"rows", trace.size()}};
  r["energies"] = {{"input", trace.input_energy},
                   {"output", trace.output_energy},
                   {"scattered", m.gamma_over_g * trace.atomic_population_integral},
                   {"stored_final", trace.stored_energy_final}};
  if (trace.input_energy > 0.0)
    r["energy_balance_residual"] = energy_balance_residual(trace, m.gamma_over_g);
  else
    r["energy_balance_residual"] = nullptr;
  if (std::abs(trace.input_energy - 1.0) <= 1e-3)
    r["scattered_fraction"] = atomic_excitation_probability(trace, m.gamma_over_g);
  else
    r["scattered_fraction"] = nullptr;
  r["two_over_cooperativity"] = 2.0 * m.kappa_over_g * m.gamma_over_g;
  r["monochromatic_loss"] = 1.0 - std::norm(reflection_coefficient(dyn.carrier_over_g, params));
  r["transfer_function"] = {{"max_relative_error", max_err}, {"samples", samples}};
  out.csv = csv.str();
  out.preferred = OutputFormat::csv;
  return out;
}

CommandOutput cmd_protocol(const RunConfig& cfg) {
  const PresetContext c = build_context(cfg);
  const DephasingPolicy policy{c.preset.spin.spin_dephasing_rate, cfg.alpha};
  const ProtocolErrors errors{cfg.phi_p, cfg.phi_r};
  double t_p = 0.0;
  std::string t_p_source;
  if (cfg.t_p_us) {
    t_p = *cfg.t_p_us * 1e-6;
    t_p_source = "config";
  } else {
    t_p = optimal_pulse_duration_closed_form(c.coupling, policy, errors, c.eta).t_p_star;
    t_p_source = "closed_form_optimum";
  }
  const ProtocolRun run = run_protocol(c.coupling, policy, errors, c.eta, t_p);

  CommandOutput out;
  ojson& r = out.report;
  r["command"] = "protocol";
  r["preset"] = c.preset.name;
  r["t_p_us"] = t_p * 1e6;
  r["t_p_source"] = t_p_source;
  r["alpha"] = cfg.alpha;
  r["phi_p"] = cfg.phi_p;
  r["phi_r"] = cfg.phi_r;
  r["cavity_emission_probability"] = c.p_cav;
  r["detection_efficiency"] = c.eta;
  r["branch_amplitudes"] = {{"r0", complex_json(run.amplitudes.resonant_amplitude)},
                            {"r1", complex_json(run.amplitudes.detuned_amplitude)}};
  r["states"] = {{"prepared", matrix_json(run.prepared)},
                 {"dephased", matrix_json(run.dephased)},
                 {"reflected", matrix_json(run.reflected)},
                 {"final", matrix_json(run.final_state)}};
  r["fidelity_exact"] = run.fidelity_exact;
  r["fidelity_closed_form"] = run.closed_form.value;
  r["closed_form_losses"] = {{"reflection", run.closed_form.reflection_loss},
                             {"bandwidth", run.closed_form.bandwidth_loss},
                             {"dephasing", run.closed_form.dephasing_loss},
                             {"rotation", run.closed_form.rotation_loss}};
  r["outside_small_parameter_regime"] = run.closed_form.outside_small_parameter_regime;
  return out;
}

CommandOutput cmd_readout(const RunConfig& cfg) {
  const PresetContext c = build_context(cfg);
  ReadoutSpec spec;
  spec.branching_ratio = c.preset.ion.branching_ratio;
  spec.purcell_factor = c.derived.purcell_factor;
  spec.detector_efficiency = cfg.p_det;
  spec.min_photons = cfg.n_m;
  spec.rabi_frequency = c.preset.rabi_frequency;
  spec.n_cyc_override = cfg.n_cyc;
  const ReadoutReport rep =
      evaluate_readout(spec, c.preset.ion.detuning_offstate, c.preset.ion.coupling_ratio_sq);

  CommandOutput out;
  ojson& r = out.report;
  r["command"] = "readout";
  r["preset"] = c.preset.name;
  r["branching_ratio"] = spec.branching_ratio;
  r["purcell_factor"] = spec.purcell_factor;
  r["p_det"] = cfg.p_det;
  r["n_m"] = cfg.n_m;
  r["p_cav"] = rep.p_cav;
  r["detection_efficiency"] = rep.detection_efficiency;
  ojson by_n = ojson::array();
  for (int n = 1; n <= 6; ++n)
    by_n.push_back(
        {{"n_m", n}, {"detection_efficiency", detection_efficiency(rep.p_cav, cfg.p_det, n)}});
  r["detection_efficiency_by_n_m"] = by_n;
  r["n_cyc"] = rep.n_cyc;
  r["n_cyc_source"] = cfg.n_cyc ? "override" : "geometric_mean";
  r["rabi_frequency_hz"] = hz_from_angular(spec.rabi_frequency);
  r["p_off"] = rep.p_off;
  return out;
}

CommandOutput cmd_optimize(const RunConfig& cfg) {
  validate(cfg);
  const auto& o = cfg.optimize;
  const std::vector<double> grid_us =
      o.points == 1 ? std::vector<double>{o.t_p_min_us}
                    : log_spaced_grid(o.t_p_min_us, o.t_p_max_us, o.points);
  std::vector<double> grid_s;
  for (double t : grid_us) grid_s.push_back(t * 1e-6);

  CsvWriter csv({"preset", "t_p_us", "fidelity", "fidelity_exact"});
  CommandOutput out;
  ojson& r = out.report;
  r["command"] = "optimize";
  r["alpha"] = cfg.alpha;
  r["p_det"] = cfg.p_det;
  r["n_m"] = cfg.n_m;
  ojson presets = ojson::array();
  for (const auto& name : preset_names()) {
    const Preset preset = name == cfg.preset ? resolve_preset(cfg) : load_preset(name);
    const PresetContext c = build_context(preset, cfg);
    const DephasingPolicy policy{preset.spin.spin_dephasing_rate, cfg.alpha};
    const ProtocolErrors errors{cfg.phi_p, cfg.phi_r};
    const auto scan = fidelity_scan(c.coupling, policy, errors, c.eta, grid_s, cfg.workers);

    ojson p;
    p["preset"] = name;
    p["detection_efficiency"] = c.eta;
    const ScanPoint* best = &scan.front();
    for (const auto& pt : scan) {
      csv.row(std::vector<std::string>{name, format_number(pt.t_p * 1e6),
                                       format_number(pt.fidelity),
                                       format_number(pt.fidelity_exact)});
      if (pt.fidelity > best->fidelity) best = &pt;
    }
    if (policy.spin_dephasing_rate > 0.0) {
      const Optimum closed = optimal_pulse_duration_closed_form(c.coupling, policy, errors, c.eta);
      const Optimum golden = maximize_fidelity(c.coupling, policy, errors, c.eta);
      p["closed_form"] = {{"t_p_us", closed.t_p_star * 1e6}, {"fidelity", closed.fidelity_star}};
      p["golden_section"] = {
          {"t_p_us", golden.t_p_star * 1e6},
          {"fidelity", golden.fidelity_star},
          {"bracket_us", {golden.bracket.first * 1e6, golden.bracket.second * 1e6}}};
    } else {
      p["closed_form"] = nullptr;
      p["golden_section"] = nullptr;
    }
    p["scan_max"] = {{"t_p_us", best->t_p * 1e6}, {"fidelity", best->fidelity}};
    presets.push_back(p);
  }
  r["presets"] = presets;
  out.csv = csv.str();
  out.preferred = OutputFormat::csv;
  return out;
}

CommandOutput cmd_audit(const RunConfig& cfg) {
  validate(cfg);
  const AuditReport report = run_audit({cfg.alpha, cfg.p_det, cfg.n_m});
  CommandOutput out;
  out.report["command"] = "audit";
  out.report["alpha"] = cfg.alpha;
  out.report["p_det"] = cfg.p_det;
  out.report["n_m"] = cfg.n_m;
  const ojson body = to_json(report);
  for (const auto& [key, value] : body.items()) out.report[key] = value;
  out.csv = to_csv(report);
  return out;
}

std::vector<std::string> command_names() {
  return {"derive", "spectrum", "dynamics", "protocol", "readout", "optimize", "audit"};
}

CommandOutput run_command(const std::string& name, const RunConfig& cfg) {
  static const std::map<std::string, std::function<CommandOutput(const RunConfig&)>> table = {
      {"derive", cmd_derive},     {"spectrum", cmd_spectrum}, {"dynamics", cmd_dynamics},
      {"protocol", cmd_protocol}, {"readout", cmd_readout},   {"optimize", cmd_optimize},
      {"audit", cmd_audit}};
  const auto it = table.find(name);
  if (it == table.end()) throw InvalidInput("unknown command '" + name + "'");
  return it->second(cfg);
}

std::string render(const CommandOutput& output, const RunConfig& cfg) {
  const OutputFormat format = cfg.format.value_or(output.preferred);
  if (format == OutputFormat::csv) {
    if (!output.csv) throw InvalidInput("this command has no CSV output; use --format json");
    return *output.csv;
  }
  ojson report = output.report;
  if (cfg.timestamp) report["generated_at"] = utc_timestamp();
  return report.dump(2) + "\n";
}

void write_output(const std::string& text, const RunConfig& cfg, std::ostream& fallback) {
  if (!cfg.out) {
    fallback << text;
    return;
  }
  std::ofstream file(*cfg.out, std::ios::binary);
  if (!file) throw IoError("cannot open output file '" + *cfg.out + "'");
  file << text;
  if (!file.flush()) throw IoError("failed writing output file '" + *cfg.out + "'");
}

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-ion cavity QED photon-detection simulator", "reiqnd"};
  app.require_subcommand(1);

  std::string preset, config_path, out_path, format;
  double alpha = 0.0, t_p_us = 0.0, p_det = 0.0;
  int n_m = 0;
  bool no_timestamp = false;

  std::map<std::string, CLI::Option*> opts;
  std::vector<CLI::App*> subs;
  const std::map<std::string, std::string> descriptions = {
      {"derive", "Derived cavity/ion parameters for a preset"},
      {"spectrum", "Reflection coefficient versus carrier detuning"},
      {"dynamics", "Langevin pulse reflection trace and transfer check"},
      {"protocol", "Density-matrix protocol run at one pulse duration"},
      {"readout", "Detection efficiency and false-positive rate"},
      {"optimize", "Fidelity versus pulse duration and the optimum"},
      {"audit", "Recompute quoted numbers and flag disagreements"}};
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--preset", preset, "Preset name");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_path, "Output path (default: stdout)");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--alpha", alpha, "T_sp / T_p");
    sub->add_option("--t-p-us", t_p_us, "Pulse HWHM in microseconds");
    sub->add_option("--n-m", n_m, "Minimum detected photons");
    sub->add_option("--p-det", p_det, "Single-photon detector efficiency");
    sub->add_flag("--no-timestamp", no_timestamp, "Omit generated_at from JSON");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  CLI::App* chosen = nullptr;
  for (auto* sub : subs)
    if (sub->parsed()) chosen = sub;
  auto given = [&](const char* flag) { return chosen->count(flag) > 0; };

  try {
    RunConfig cfg;
    cfg.workers = default_workers();
    if (given("--config")) merge_config_file(cfg, config_path);
    if (given("--preset")) cfg.preset = preset;
    if (given("--out")) cfg.out = out_path;
    if (given("--format")) cfg.format = parse_format(format);
    if (given("--alpha")) cfg.alpha = alpha;
    if (given("--t-p-us")) cfg.t_p_us = t_p_us;
    if (given("--n-m")) cfg.n_m = n_m;
    if (given("--p-det")) cfg.p_det = p_det;
    if (no_timestamp) cfg.timestamp = false;
    validate(cfg);
    const CommandOutput output = run_command(chosen->get_name(), cfg);
    write_output(render(output, cfg), cfg, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace reiqnd::cli
