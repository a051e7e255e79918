#include <doctest.h>

#include <cmath>
#include <random>

#include "reiqnd/error.hpp"
#include "reiqnd/params.hpp"

using namespace reiqnd;

namespace {

constexpr double kC = 299792458.0;
constexpr double kHbar = 1.054571817e-34;
constexpr double kEps0 = 8.8541878128e-12;
constexpr double kPi = 3.14159265358979323846;

CavitySpec nd_cavity(double q = 20000.0) { return {879.7e-9, 2.2, q, std::nullopt}; }

}  // namespace

TEST_CASE("cavity angular frequency") {
  CHECK(cavity_angular_frequency(nd_cavity()) == doctest::Approx(2.0 * kPi * kC / 879.7e-9));
  CHECK(cavity_angular_frequency(nd_cavity()) == doctest::Approx(2.141e15).epsilon(1e-3));
  CHECK(cavity_angular_frequency({2.0 * kPi * kC, 1.0, 1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(cavity_angular_frequency({1e15, 1.0, 1.0, 1.0}) < 1e-5);
  CHECK_THROWS_AS(cavity_angular_frequency({0.0, 1.0, 1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(cavity_angular_frequency({-1e-6, 1.0, 1.0, 1.0}), InvalidInput);
}

TEST_CASE("single photon field") {
  const double e = single_photon_field(nd_cavity());
  CHECK(std::abs(e - 446229.0) / 446229.0 < 2e-3);

  CavitySpec big = nd_cavity();
  big.mode_volume = 4.0 * nd_cavity().effective_mode_volume();
  CHECK(single_photon_field(big) == doctest::Approx(e / 2.0).epsilon(1e-12));

  const double wavelength = 1e-6;
  const double omega = 2.0 * kPi * kC / wavelength;
  CHECK(single_photon_field({wavelength, 1.0, 1.0, kHbar * omega / (2.0 * kEps0)}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(single_photon_field({wavelength, 1.0, 1.0, 0.0}), InvalidInput);
}

TEST_CASE("cavity linewidth is HWHM") {
  CHECK(hz_from_angular(cavity_linewidth(nd_cavity())) == doctest::Approx(8.5e9).epsilon(0.01));
  CHECK(hz_from_angular(cavity_linewidth(nd_cavity(300000.0))) ==
        doctest::Approx(565e6).epsilon(0.01));
  CHECK(cavity_linewidth(nd_cavity(40000.0)) ==
        doctest::Approx(cavity_linewidth(nd_cavity()) / 2.0).epsilon(1e-14));
  CHECK(cavity_linewidth(nd_cavity()) ==
        doctest::Approx(cavity_angular_frequency(nd_cavity()) / 40000.0));
}

TEST_CASE("coupling rate") {
  IonSpec ion;
  ion.dipole_moment = 9.1e-32;
  CHECK(hz_from_angular(coupling_rate(ion, 446229.0)) == doctest::Approx(30.6e6).epsilon(0.01));
  CHECK(coupling_rate(ion, 0.0) == 0.0);
  ion.dipole_moment = 2.0 * kHbar;
  CHECK(coupling_rate(ion, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  ion.dipole_moment = 0.0;
  CHECK_THROWS_AS(coupling_rate(ion, 1.0), InvalidInput);
}

TEST_CASE("cooperativity from rates") {
  const double g = angular_from_hz(30.6e6);
  CHECK(cooperativity(g, angular_from_hz(8.5e9), angular_from_hz(5.9e3)) ==
        doctest::Approx(18.7).epsilon(0.01));
  CHECK(cooperativity(g, angular_from_hz(565e6), angular_from_hz(5.9e3)) ==
        doctest::Approx(281.0).epsilon(0.01));
  CHECK(cooperativity(3.0, 9.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cooperativity(1.0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(cooperativity(1.0, 1.0, 0.0), InvalidInput);
}

TEST_CASE("purcell factor") {
  CHECK(std::abs(purcell_factor(nd_cavity()) - 1520.0) <= 1.0);
  CHECK(std::abs(purcell_factor(nd_cavity(300000.0)) - 22797.0) <= 1.0);
  CHECK_THROWS_AS(purcell_factor({879.7e-9, 2.2, 2e4, 0.0}), InvalidInput);
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names == std::vector<std::string>{"nd_yvo4_demonstrated", "nd_yvo4_subkelvin",
                                          "nd_yvo4_theoretical_q"});
  const Preset demo = load_preset("nd_yvo4_demonstrated");
  CHECK(demo.ion.optical_dephasing_rate == doctest::Approx(angular_from_hz(5.9e3)));
  CHECK(demo.spin.spin_dephasing_rate == doctest::Approx(angular_from_hz(340.0)));
  CHECK(demo.ion.detuning_offstate == doctest::Approx(angular_from_hz(30e9)));
  CHECK(demo.ion.branching_ratio == 0.104);
  CHECK(demo.ion.coupling_ratio_sq == 1.0);
  CHECK(demo.cavity.quality_factor == 20000.0);
  CHECK(load_preset("nd_yvo4_subkelvin").spin.spin_dephasing_rate ==
        doctest::Approx(angular_from_hz(34.0)));
  CHECK(load_preset("nd_yvo4_theoretical_q").cavity.quality_factor == 300000.0);
  CHECK_THROWS_AS(load_preset("nd_yvo4"), InvalidInput);
}

TEST_CASE("derive keeps quotes out of the computation") {
  const Preset demo = load_preset("nd_yvo4_demonstrated");
  const DerivedParams plain = derive(demo.cavity, demo.ion);
  const DerivedParams quoted = derive(demo.cavity, demo.ion, demo.annotations);
  CHECK(plain.cooperativity == quoted.cooperativity);
  CHECK(plain.notes.size() == 1);
  REQUIRE(quoted.notes.size() == 2);
  CHECK(quoted.notes.back().find("246") != std::string::npos);
  CHECK(quoted.cooperativity ==
        quoted.coupling_rate * quoted.coupling_rate /
            (quoted.cavity_linewidth * demo.ion.optical_dephasing_rate));
}

TEST_CASE("discrepancy note threshold") {
  CHECK_FALSE(discrepancy_note("x", 1.05, 1.0).has_value());
  CHECK(discrepancy_note("x", 1.2, 1.0).has_value());
}

TEST_CASE("overrides convert _hz keys") {
  Preset p = load_preset("nd_yvo4_demonstrated");
  apply_overrides(p, nlohmann::json::parse(R"({"spin": {"spin_dephasing_rate_hz": 100}})"));
  CHECK(p.spin.spin_dephasing_rate == doctest::Approx(angular_from_hz(100.0)));
  CHECK_THROWS_AS(apply_overrides(p, nlohmann::json::parse(R"({"spin": {"bogus": 1}})")),
                  InvalidInput);
  CHECK_THROWS_AS(
      apply_overrides(p, nlohmann::json::parse(R"({"ion": {"branching_ratio": "x"}})")),
      InvalidInput);
  apply_overrides(p, nlohmann::json::parse(R"({"ion": {"branching_ratio": 1.5}})"));
  CHECK_THROWS_AS(validate(p.ion), InvalidInput);
}

TEST_CASE("property: purcell factor at V = (lambda/n)^3 is 3Q/(4 pi^2)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_q(0.0, 9.0);
  std::uniform_real_distribution<double> lam(300e-9, 2e-6);
  std::uniform_real_distribution<double> n(1.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double q = std::pow(10.0, log_q(rng));
    const CavitySpec spec{lam(rng), n(rng), q, std::nullopt};
    CHECK(purcell_factor(spec) == doctest::Approx(3.0 * q / (4.0 * kPi * kPi)).epsilon(1e-13));
  }
}

TEST_CASE("property: field scales as V^-1/2 and omega^1/2") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int i = 0; i < 200; ++i) {
    const CavitySpec base{1e-6 * u(rng), u(rng), 1e4, 1e-19 * u(rng)};
    const double e0 = single_photon_field(base);
    const double sv = u(rng);
    CavitySpec bigger_v = base;
    bigger_v.mode_volume = *base.mode_volume * sv;
    CHECK(single_photon_field(bigger_v) == doctest::Approx(e0 / std::sqrt(sv)).epsilon(1e-12));
    const double sw = u(rng);
    CavitySpec bluer = base;
    bluer.wavelength = base.wavelength / sw;
    CHECK(single_photon_field(bluer) == doctest::Approx(e0 * std::sqrt(sw)).epsilon(1e-12));
  }
}

TEST_CASE("property: cooperativity depends only on g^2/(kappa gamma)") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double g = u(rng), kappa = u(rng), gamma = u(rng), s = u(rng);
    CHECK(cooperativity(s * g, s * s * kappa, gamma) ==
          doctest::Approx(cooperativity(g, kappa, gamma)).epsilon(1e-13));
    CHECK(cooperativity(s * g, s * kappa, s * gamma) ==
          doctest::Approx(cooperativity(g, kappa, gamma)).epsilon(1e-13));
  }
}

TEST_CASE("property: derivation is deterministic") {
  for (const auto& name : preset_names()) {
    const Preset p = load_preset(name);
    const DerivedParams a = derive(p.cavity, p.ion);
    const DerivedParams b = derive(p.cavity, p.ion);
    CHECK(a.cooperativity == b.cooperativity);
    CHECK(a.purcell_factor == b.purcell_factor);
    CHECK(a.coupling_rate == b.coupling_rate);
    CHECK(a.single_photon_field == b.single_photon_field);
  }
}
