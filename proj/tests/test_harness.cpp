#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "polariton/errors.hpp"
#include "polariton/harness.hpp"

using namespace polariton;
using namespace polariton::testing;

namespace {

const std::filesystem::path kFixture = POLARITON_FIXTURE_DIR "/flux5.yaml";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture_text() { return slurp(kFixture); }

/// Replaces the first occurrence of `from` in the fixture text.
std::string edited(const std::string& from, const std::string& to) {
  std::string t = fixture_text();
  const auto pos = t.find(from);
  REQUIRE(pos != std::string::npos);
  return t.replace(pos, from.size(), to);
}

RunConfig small_config(unsigned threads = 1) {
  RunConfig c = parse_config(edited("points: 45", "points: 3"));
  c.power_dbm = {-125.0, -100.0};
  c.threads = threads;
  return c;
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("power conversion") {
  const double w = angular(7.508 * GHz);
  const double kc = angular(12.7 * MHz);
  // 0 dBm is exactly 1 mW: Ω² ħω/κ = 1e-3 W
  const double o0 = power_to_amplitude(0.0, w, kc);
  CHECK(o0 * o0 * units::hbar * w / kc == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(power_to_amplitude(6.02, w, kc) / o0 == doctest::Approx(2.0).epsilon(1e-3));
  // regression constant from an independent evaluation of the formula
  CHECK(power_to_amplitude(-89.0, w, kc) == doctest::Approx(4493674883.5038916).epsilon(1e-12));
  CHECK(power_to_amplitude(-89.0, w, kc, -15.0) ==
        doctest::Approx(power_to_amplitude(-104.0, w, kc)).epsilon(1e-14));
  CHECK(amplitude_to_power(power_to_amplitude(-97.3, w, kc, 2.0), w, kc, 2.0) ==
        doctest::Approx(-97.3).epsilon(1e-13));
  CHECK_THROWS_AS(power_to_amplitude(std::nan(""), w, kc), ParameterError);
}

TEST_CASE("quantities need units") {
  CHECK(parse_quantity("7.575 GHz", Dimension::frequency, "k") == 7.575e9);
  CHECK(parse_quantity("500 ns", Dimension::time, "k") == doctest::Approx(500e-9));
  CHECK(parse_quantity("3.3 us", Dimension::time, "k") == doctest::Approx(3.3e-6));
  CHECK(parse_quantity("-89 dBm", Dimension::power, "k") == -89.0);
  CHECK(parse_quantity("+2 dB", Dimension::ratio, "k") == 2.0);
  CHECK(parse_quantity("1e4 /s", Dimension::rate, "k") == 1e4);
  CHECK_THROWS_WITH_AS(parse_quantity("13.5", Dimension::frequency, "system.U_a"),
                       doctest::Contains("system.U_a"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("13.5 dBm", Dimension::frequency, "k"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("MHz", Dimension::frequency, "k"), ConfigError);
}

TEST_CASE("fixture config") {
  const RunConfig c = load_config(kFixture);
  CHECK(c.system.kappa_c == doctest::Approx(angular(12.7 * MHz)));
  CHECK(c.system.T1 == doctest::Approx(3.3e-6));
  CHECK(c.attenuation_correction_db == -15.0);
  CHECK(c.frequency_hz.size() == 45);
  CHECK(c.frequency_hz.front() == 7.40e9);
  CHECK(c.frequency_hz.back() == 7.62e9);
  CHECK(c.power_dbm.size() == 41);
  CHECK_FALSE(c.noise.sigma_det.has_value());
  CHECK(c.readout.frequency_hz == 7.508e9);
  CHECK(c.readout.power_dbm == -89.0);
}

TEST_CASE("malformed configs name the offending key") {
  CHECK(config_error_key(edited("  kappa_c: 12.7 MHz\n", "")) == "system.kappa_c");
  CHECK(config_error_key(edited("U_a: 13.5 MHz", "U_a: 13.5")) == "system.U_a");
  CHECK(config_error_key(edited("kappa_a: 5.6 MHz", "kapa_a: 5.6 MHz")) == "system.kapa_a");
  CHECK(config_error_key(edited("duration: 500 ns", "duration: 500 GHz")) == "readout.duration");
  CHECK(config_error_key(edited("heralding: false", "heralding: maybe")) == "noise.heralding");
  CHECK(config_error_key("system: [1, 2") == "<root>");
}

TEST_CASE("config hash tracks semantic fields only") {
  const RunConfig base = parse_config(fixture_text());
  RunConfig c = base;
  c.threads = 1;
  c.output_dir = "elsewhere";
  CHECK(c.hash() == base.hash());
  c.seed += 1;
  CHECK(c.hash() != base.hash());
  c = base;
  c.system.kappa_a *= 1.0 + 1e-15;
  CHECK(c.hash() != base.hash());
  c = base;
  c.power_dbm.back() = -80.5;
  CHECK(c.hash() != base.hash());
  c = base;
  c.noise.heralding = true;
  CHECK(c.hash() != base.hash());
  CHECK(parse_config(fixture_text()).hash() == base.hash());
}

TEST_CASE("CSV round trip is lossless") {
  MapArtifact a;
  a.quantity = "test";
  a.unit = "sqrtHz";
  a.freq_ghz = {1.0 / 3.0, 7.4, std::nextafter(7.4, 8.0)};
  a.power_dbm = {-120.0, -89.123456789012345};
  a.values = {1.0 / 3.0, 1e-300, -2.5, 6.02214076e23, 0.0, std::nextafter(1.0, 2.0)};
  const MapArtifact b = MapArtifact::from_csv(a.to_csv());
  CHECK(b.freq_ghz == a.freq_ghz);
  CHECK(b.power_dbm == a.power_dbm);
  CHECK(b.values == a.values);
  CHECK(b.unit == a.unit);
  CHECK(b.to_csv() == a.to_csv());
}

TEST_CASE("deg map artifacts") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const RunConfig c = small_config();
  const MapArtifact a = sweep_deg_map(c);
  CHECK(a.values.size() == 6);
  const std::string csv = a.to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(a.metadata["config_hash"] == c.hash());
  CHECK(a.metadata["timestamp"] == "2023-11-14T22:13:20Z");

  const auto dir = std::filesystem::temp_directory_path() / "polariton_test_harness";
  a.write(dir, "deg");
  const MapArtifact b = MapArtifact::read(dir, "deg");
  CHECK(b.values == a.values);
  CHECK(b.metadata == a.metadata);

  // identical config twice, serial and threaded, gives identical bytes
  const MapArtifact again = sweep_deg_map(small_config(4));
  CHECK(again.to_csv() == csv);
  CHECK(again.to_json() == a.to_json());

  RunConfig one = c;
  one.frequency_hz = {7.552e9};
  one.power_dbm = {-125.0};
  const MapArtifact peak = sweep_deg_map(one);
  REQUIRE(peak.values.size() == 1);
  CHECK(peak.values[0] > 0.0);
}

TEST_CASE("linear system has no bistability contours") {
  RunConfig c = small_config(4);
  c.system.U_a = 0.0;
  c.power_dbm = {-110.0, -90.0, -80.0};
  const MapArtifact a = sweep_bistability(c, QubitState::g);
  for (const char* k : {"B_up", "B_down", "theory_B_up", "theory_B_down"})
    CHECK(a.metadata["contours"][k].empty());
  CHECK(a.metadata["components"] == 0);
}

TEST_CASE("bistability map carries contours") {
  RunConfig c = small_config(4);
  c.frequency_hz = {7.50e9, 7.51e9, 7.52e9};
  c.power_dbm = {-100.0, -96.0, -92.0, -88.0, -84.0, -80.0};
  const MapArtifact a = sweep_bistability(c, QubitState::g);
  const auto& up = a.metadata["contours"]["B_up"];
  const auto& theory = a.metadata["contours"]["theory_B_up"];
  CHECK(up.size() == 3);
  CHECK(theory.size() == 3);
  for (std::size_t i = 0; i < up.size(); ++i) {
    CHECK(a.metadata["contours"]["B_down"][i][1].get<double>() <= up[i][1].get<double>());
    // grid resolution is 4 dB
    CHECK(std::abs(up[i][1].get<double>() - theory[i][1].get<double>()) <= 4.0);
  }
}

TEST_CASE("fidelity sweep labels regions and marks the best cell") {
  RunConfig c = small_config(4);
  c.frequency_hz = {7.508e9};
  c.power_dbm = {-110.0, -89.0, -80.0};
  c.shots_per_point = 200;
  const MapArtifact a = sweep_fidelity(c);
  const auto& labels = a.metadata["region_labels"];
  CHECK(labels == nlohmann::json({"I", "II", "III"}));
  CHECK(a.metadata["star"]["power_dBm"] == -89.0);
  CHECK(a.values[1] > 0.95);
  CHECK(a.metadata["sigma_det"].get<double>() > 0.0);
}
