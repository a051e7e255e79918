#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reiqnd/cli/audit.hpp"
#include "reiqnd/cli/commands.hpp"
#include "reiqnd/cli/config.hpp"
#include "reiqnd/cli/csv.hpp"
#include "reiqnd/error.hpp"

using namespace reiqnd;
using namespace reiqnd::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_app(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find("\r\n", pos);
    REQUIRE(end != std::string::npos);
    std::vector<std::string> fields;
    std::stringstream line(text.substr(pos, end - pos));
    std::string f;
    while (std::getline(line, f, ',')) fields.push_back(f);
    rows.push_back(fields);
    pos = end + 2;
  }
  return rows;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "reiqnd_test_cli";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("csv escaping") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CsvWriter w({"name", "value"});
  w.row(std::vector<std::string>{"x,y", "1"});
  w.row(std::vector<double>{0.5, 1e-12});
  CHECK(w.str() == "name,value\r\n\"x,y\",1\r\n0.5,1e-12\r\n");
  CHECK_THROWS_AS(w.row(std::vector<double>{1.0}), Error);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(446229.0) == "446229");
}

TEST_CASE("format parsing") {
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK(parse_format("json") == OutputFormat::json);
  CHECK_THROWS_AS(parse_format("xml"), InvalidInput);
}

TEST_CASE("config merge") {
  RunConfig cfg;
  merge_config(cfg, nlohmann::json::parse(R"({
    "preset": "nd_yvo4_subkelvin",
    "cavity": {"quality_factor": 300000},
    "readout": {"n_m": 3, "p_det": 0.8, "n_cyc": 116},
    "protocol": {"alpha": 3, "t_p_us": 20},
    "spectrum": {"points": 11}
  })"));
  CHECK(cfg.preset == "nd_yvo4_subkelvin");
  CHECK(cfg.n_m == 3);
  CHECK(cfg.p_det == 0.8);
  CHECK(cfg.n_cyc == 116.0);
  CHECK(cfg.alpha == 3.0);
  CHECK(cfg.t_p_us == 20.0);
  CHECK(cfg.spectrum.points == 11);
  CHECK(resolve_preset(cfg).cavity.quality_factor == 300000.0);

  CHECK_THROWS_AS(merge_config(cfg, nlohmann::json::parse(R"({"colour": 1})")), InvalidInput);
  CHECK_THROWS_AS(merge_config(cfg, nlohmann::json::parse(R"({"protocol": {"beta": 1}})")),
                  InvalidInput);
  CHECK_THROWS_AS(merge_config(cfg, nlohmann::json::parse(R"({"readout": {"n_m": 1.5}})")),
                  InvalidInput);
  try {
    merge_config(cfg, nlohmann::json::parse(R"({"spectrum": {"points": "many"}})"));
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("spectrum.points") != std::string::npos);
  }
}

TEST_CASE("config validation rejects invariant violations") {
  RunConfig cfg;
  cfg.alpha = 0.5;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg = RunConfig{};
  cfg.p_det = 1.5;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg = RunConfig{};
  cfg.phi_p = 1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg = RunConfig{};
  cfg.optimize.points = 0;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg = RunConfig{};
  cfg.physics_overrides = nlohmann::json::parse(R"({"ion": {"branching_ratio": 2}})");
  CHECK_THROWS_AS(resolve_preset(cfg), InvalidInput);
}

TEST_CASE("exit codes") {
  CHECK(run({"derive", "--no-timestamp"}).code == 0);
  CHECK(run({"derive", "--preset", "nope"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"derive", "--bogus-flag"}).code == 2);
  CHECK(run({"derive", "--format", "xml"}).code == 2);
  CHECK(run({"derive", "--format", "csv"}).code == 2);
  CHECK(run({"protocol", "--alpha", "0.5"}).code == 2);
  CHECK(run({"derive", "--config", (scratch_dir() / "missing.json").string()}).code == 4);
  CHECK(run({"derive", "--config", write_file("broken.json", "{not json").string()}).code == 2);
  CHECK(run({"derive", "--config", write_file("unknown.json", R"({"extra": 1})").string()})
            .code == 2);
  CHECK(run({"derive", "--out", (scratch_dir() / "no/such/dir/out.json").string()}).code == 4);

  const Result bad = run({"derive", "--preset", "nope"});
  CHECK(bad.err.find("nope") != std::string::npos);

  CHECK(exit_code(InvalidInput("x")) == 2);
  CHECK(exit_code(RegimeViolation("x")) == 2);
  CHECK(exit_code(NumericalIntegrity("x")) == 3);
  CHECK(exit_code(IoError("x")) == 4);
}

TEST_CASE("output is deterministic without the timestamp") {
  for (const auto& cmd : command_names()) {
    const Result a = run({cmd, "--no-timestamp"});
    const Result b = run({cmd, "--no-timestamp"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("generated_at") == std::string::npos);
  }
  const Result stamped = run({"readout"});
  CHECK(nlohmann::json::parse(stamped.out).contains("generated_at"));
}

TEST_CASE("worker count does not change output") {
  RunConfig one, many;
  one.timestamp = many.timestamp = false;
  many.workers = 4;
  for (const std::string cmd : {"spectrum", "optimize"}) {
    CHECK(render(run_command(cmd, one), one) == render(run_command(cmd, many), many));
  }
}

TEST_CASE("precedence: defaults < preset < config file < flags") {
  const auto cfg_path =
      write_file("alpha.json", R"({"preset": "nd_yvo4_subkelvin", "protocol": {"alpha": 3}})");
  auto alpha_of = [](const Result& r) { return nlohmann::json::parse(r.out).at("alpha"); };
  CHECK(alpha_of(run({"protocol", "--no-timestamp"})) == 2.0);
  const Result from_file = run({"protocol", "--no-timestamp", "--config", cfg_path.string()});
  CHECK(alpha_of(from_file) == 3.0);
  CHECK(nlohmann::json::parse(from_file.out).at("preset") == "nd_yvo4_subkelvin");
  const Result from_flag =
      run({"protocol", "--no-timestamp", "--config", cfg_path.string(), "--alpha", "4"});
  CHECK(alpha_of(from_flag) == 4.0);
  const Result preset_flag = run(
      {"protocol", "--no-timestamp", "--config", cfg_path.string(), "--preset",
       "nd_yvo4_demonstrated"});
  CHECK(nlohmann::json::parse(preset_flag.out).at("preset") == "nd_yvo4_demonstrated");
}

TEST_CASE("out path writes the file") {
  const fs::path p = scratch_dir() / "readout.json";
  fs::remove(p);
  const Result r = run({"readout", "--no-timestamp", "--out", p.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(p);
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc.at("command") == "readout");
}

TEST_CASE("derive") {
  const auto doc = nlohmann::json::parse(run({"derive", "--no-timestamp"}).out);
  const double e = doc.at("derived").at("single_photon_field_v_per_m");
  CHECK(std::abs(e - 446229.0) / 446229.0 < 2e-3);
  CHECK(doc.at("derived").at("cooperativity").get<double>() == doctest::Approx(18.7).epsilon(0.01));
  std::map<std::string, std::string> verdicts;
  for (const auto& entry : doc.at("audit")) verdicts[entry.at("quantity")] = entry.at("verdict");
  CHECK(verdicts.at("single_photon_field_v_per_m") == "match");
  CHECK(verdicts.at("cooperativity") == "flagged");

  const auto q = write_file("q.json", R"({"cavity": {"quality_factor": 300000}})");
  const auto high = nlohmann::json::parse(run({"derive", "--no-timestamp", "--config", q.string()}).out);
  CHECK(std::abs(high.at("derived").at("purcell_factor").get<double>() - 22797.0) <= 1.0);
  bool purcell_match = false;
  for (const auto& entry : high.at("audit"))
    if (entry.at("quantity") == "purcell_factor") purcell_match = entry.at("verdict") == "match";
  CHECK(purcell_match);
}

TEST_CASE("spectrum") {
  const auto rows = parse_csv(run({"spectrum"}).out);
  REQUIRE(rows.size() == 1 + 2 * 1201);
  CHECK(rows[0] == std::vector<std::string>{"Delta_over_g", "delta_over_g", "re", "im", "abs",
                                            "phase_rad"});
  double fano_min = 1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][4]) <= 1.0 + 1e-9);
    const double big_delta = std::stod(rows[i][0]);
    const double d = std::stod(rows[i][1]);
    if (big_delta == 20.0 && std::abs(d + 20.0) < 1.0) fano_min = std::min(fano_min, std::stod(rows[i][4]));
  }
  CHECK(fano_min < 0.9);
}

TEST_CASE("dynamics") {
  const auto report = nlohmann::json::parse(run({"dynamics", "--no-timestamp", "--format", "json"}).out);
  CHECK(report.at("transfer_function").at("max_relative_error").get<double>() < 1e-3);
  CHECK(report.at("scattered_fraction").get<double>() == doctest::Approx(0.2).epsilon(0.15));
  CHECK(std::abs(report.at("energy_balance_residual").get<double>()) < 1e-3);

  const auto zero = write_file("zero.json", R"({"dynamics": {"amplitude_scale": 0}})");
  const auto rows = parse_csv(run({"dynamics", "--config", zero.string()}).out);
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"t_times_g", "re_a", "im_a", "re_s", "im_s", "re_out",
                                            "im_out"});
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t c = 1; c < rows[i].size(); ++c) CHECK(std::stod(rows[i][c]) == 0.0);
}

TEST_CASE("protocol") {
  const auto doc =
      nlohmann::json::parse(run({"protocol", "--no-timestamp", "--t-p-us", "13"}).out);
  const double exact = doc.at("fidelity_exact"), closed = doc.at("fidelity_closed_form");
  CHECK(std::abs(exact - closed) <= 0.003);
  CHECK(exact == doctest::Approx(0.933).epsilon(0.005));
  for (const auto& [stage, m] : doc.at("states").items()) {
    const auto& re = m.at("re");
    const auto& im = m.at("im");
    CHECK(std::abs(re[0][1].get<double>() - re[1][0].get<double>()) < 1e-12);
    CHECK(std::abs(im[0][1].get<double>() + im[1][0].get<double>()) < 1e-12);
  }

  const auto ideal = write_file("ideal.json", R"({
    "spin": {"spin_dephasing_rate_hz": 0},
    "ion": {"optical_dephasing_rate_hz": 1e-9, "detuning_offstate_hz": 1e18}
  })");
  const auto lossless = nlohmann::json::parse(
      run({"protocol", "--no-timestamp", "--t-p-us", "1e9", "--config", ideal.string()}).out);
  const double eta = lossless.at("detection_efficiency");
  CHECK(lossless.at("fidelity_exact").get<double>() == doctest::Approx(eta).epsilon(1e-6));
  CHECK(lossless.at("fidelity_closed_form").get<double>() == doctest::Approx(eta).epsilon(1e-6));
}

TEST_CASE("optimize") {
  const Result r = run({"optimize"});
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 1 + 3 * 199);
  CHECK(rows[0] == std::vector<std::string>{"preset", "t_p_us", "fidelity", "fidelity_exact"});
  std::map<std::string, std::vector<double>> curves;
  for (std::size_t i = 1; i < rows.size(); ++i) curves[rows[i][0]].push_back(std::stod(rows[i][2]));
  const auto& demo = curves.at("nd_yvo4_demonstrated");
  const auto& cold = curves.at("nd_yvo4_subkelvin");
  const auto& high = curves.at("nd_yvo4_theoretical_q");
  for (std::size_t i = 0; i < demo.size(); ++i) {
    CHECK(high[i] > cold[i]);
    CHECK(cold[i] > demo[i]);
  }

  const auto report = nlohmann::json::parse(run({"optimize", "--no-timestamp", "--format", "json"}).out);
  std::map<std::string, std::pair<double, double>> optima;
  for (const auto& p : report.at("presets"))
    optima[p.at("preset")] = {p.at("golden_section").at("t_p_us"), p.at("golden_section").at("fidelity")};
  CHECK(optima.at("nd_yvo4_demonstrated").first == doctest::Approx(13.0).epsilon(0.05));
  CHECK(optima.at("nd_yvo4_demonstrated").second == doctest::Approx(0.934).epsilon(0.005));
  CHECK(optima.at("nd_yvo4_subkelvin").first == doctest::Approx(42.0).epsilon(0.05));
  CHECK(optima.at("nd_yvo4_subkelvin").second == doctest::Approx(0.953).epsilon(0.005));
  CHECK(optima.at("nd_yvo4_theoretical_q").first == doctest::Approx(11.0).epsilon(0.05));
  CHECK(optima.at("nd_yvo4_theoretical_q").second == doctest::Approx(0.995).epsilon(0.003));

  const auto empty = write_file("empty_grid.json", R"({"optimize": {"points": 0}})");
  CHECK(run({"optimize", "--config", empty.string()}).code == 2);
}

TEST_CASE("audit") {
  const AuditReport report = run_audit();
  std::set<std::pair<std::string, std::string>> flagged;
  for (const auto* e : report.flagged()) flagged.insert({e->preset, e->quantity});
  const std::set<std::pair<std::string, std::string>> expected{
      {"nd_yvo4_demonstrated", "cooperativity"},
      {"nd_yvo4_theoretical_q", "cooperativity"},
      {"nd_yvo4_demonstrated", "cavity_emission_probability"},
      {"nd_yvo4_theoretical_q", "detection_efficiency"},
      {"nd_yvo4_demonstrated", "resonant_bandwidth_hz"}};
  CHECK(flagged == expected);

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : report.entries) CHECK(seen.insert({e.preset, e.quantity}).second);

  const std::string csv = to_csv(report);
  CHECK(csv.rfind("preset,quantity,paper_value,computed_value,relative_difference,verdict\r\n", 0) ==
        0);
  CHECK(run({"audit", "--format", "csv"}).out == csv);
}

TEST_CASE("audit comparison rules") {
  double rel = 0.0;
  CHECK(judge(1.01, 1.0, Comparison::relative, 0.02, 0.0, &rel) == Verdict::match);
  CHECK(rel == doctest::Approx(0.01));
  CHECK(judge(1.05, 1.0, Comparison::relative, 0.02, 0.0) == Verdict::flagged);
  CHECK(judge(0.9944, 0.9985, Comparison::complement, 0.02, 0.00005) == Verdict::flagged);
  CHECK(judge(0.98752, 0.988, Comparison::complement, 0.02, 0.0005) == Verdict::match);
  CHECK(judge(6.8e-12, 1e-4, Comparison::upper_bound, 0.0, 0.0) == Verdict::match);
  CHECK(judge(2e-4, 1e-4, Comparison::upper_bound, 0.0, 0.0) == Verdict::flagged);
  CHECK(audit_parameter_chain("x", CavitySpec{879.7e-9, 2.2, 5e4, std::nullopt}, DerivedParams{},
                              true)
            .empty());
}
