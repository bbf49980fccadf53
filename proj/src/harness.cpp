#include "polariton/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "polariton/errors.hpp"
#include "polariton/parallel.hpp"
#include "polariton/units.hpp"

namespace polariton {

using nlohmann::json;

namespace {

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timestamp() {
  std::time_t t{};
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

MapArtifact empty_artifact(const RunConfig& config, std::string quantity, std::string unit) {
  MapArtifact a;
  a.quantity = std::move(quantity);
  a.unit = std::move(unit);
  for (double f : config.frequency_hz) a.freq_ghz.push_back(f / units::GHz);
  a.power_dbm = config.power_dbm;
  a.values.assign(a.freq_ghz.size() * a.power_dbm.size(), 0.0);
  a.metadata = artifact_metadata(config);
  return a;
}

std::string at_cell(double freq_ghz, double power_dbm) {
  return " at freq " + format17(freq_ghz) + " GHz, power " + format17(power_dbm) + " dBm";
}

json polyline(const std::vector<std::pair<double, double>>& pts) {
  json out = json::array();
  for (const auto& [f, p] : pts) out.push_back({f, p});
  return out;
}

}  // namespace

double power_to_amplitude(double P_in_dbm, double omega_d, double kappa_c,
                          double attenuation_correction_db) {
  if (!std::isfinite(P_in_dbm) || !std::isfinite(attenuation_correction_db))
    throw ParameterError("power must be finite");
  if (!(omega_d > 0.0) || !(kappa_c >= 0.0)) throw ParameterError("invalid frequency or rate");
  const double watts = std::pow(10.0, (P_in_dbm + attenuation_correction_db - 30.0) / 10.0);
  return std::sqrt(kappa_c * watts / (units::hbar * omega_d));
}

double amplitude_to_power(double Omega_c, double omega_d, double kappa_c,
                          double attenuation_correction_db) {
  if (!(Omega_c > 0.0) || !(omega_d > 0.0) || !(kappa_c > 0.0))
    throw ParameterError("amplitude, frequency and rate must be positive");
  const double watts = Omega_c * Omega_c * units::hbar * omega_d / kappa_c;
  return 10.0 * std::log10(watts) + 30.0 - attenuation_correction_db;
}

std::string MapArtifact::to_csv() const {
  if (values.size() != freq_ghz.size() * power_dbm.size())
    throw ParameterError("artifact shape mismatch");
  std::string out = "freq_GHz,power_dBm,value,unit\n";
  for (std::size_t i = 0; i < freq_ghz.size(); ++i) {
    for (std::size_t j = 0; j < power_dbm.size(); ++j) {
      out += format17(freq_ghz[i]) + ',' + format17(power_dbm[j]) + ',' + format17(at(i, j)) +
             ',' + unit + '\n';
    }
  }
  return out;
}

std::string MapArtifact::to_json() const {
  json j;
  j["quantity"] = quantity;
  j["unit"] = unit;
  j["shape"] = {freq_ghz.size(), power_dbm.size()};
  j["freq_GHz"] = freq_ghz;
  j["power_dBm"] = power_dbm;
  j["metadata"] = metadata;
  return j.dump(2) + '\n';
}

void MapArtifact::write(const std::filesystem::path& dir, const std::string& stem) const {
  std::filesystem::create_directories(dir);
  write_file(dir / (stem + ".csv"), to_csv());
  write_file(dir / (stem + ".json"), to_json());
}

MapArtifact MapArtifact::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "freq_GHz,power_dBm,value,unit")
    throw ParameterError("unexpected CSV header");
  MapArtifact a;
  std::vector<double> f_rows, p_rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f, p, v, u;
    if (!std::getline(row, f, ',') || !std::getline(row, p, ',') || !std::getline(row, v, ',') ||
        !std::getline(row, u))
      throw ParameterError("malformed CSV row: " + line);
    f_rows.push_back(std::strtod(f.c_str(), nullptr));
    p_rows.push_back(std::strtod(p.c_str(), nullptr));
    a.values.push_back(std::strtod(v.c_str(), nullptr));
    if (a.unit.empty()) a.unit = u;
  }
  if (f_rows.empty()) throw ParameterError("CSV has no data rows");
  std::size_t n_p = 0;
  while (n_p < f_rows.size() && f_rows[n_p] == f_rows[0]) ++n_p;
  if (f_rows.size() % n_p != 0) throw ParameterError("CSV rows do not form a grid");
  a.power_dbm.assign(p_rows.begin(), p_rows.begin() + static_cast<std::ptrdiff_t>(n_p));
  for (std::size_t k = 0; k < f_rows.size(); k += n_p) a.freq_ghz.push_back(f_rows[k]);
  for (std::size_t k = 0; k < f_rows.size(); ++k) {
    if (f_rows[k] != a.freq_ghz[k / n_p] || p_rows[k] != a.power_dbm[k % n_p])
      throw ParameterError("CSV rows are not frequency-major");
  }
  return a;
}

MapArtifact MapArtifact::read(const std::filesystem::path& dir, const std::string& stem) {
  MapArtifact a = from_csv(read_file(dir / (stem + ".csv")));
  const json j = json::parse(read_file(dir / (stem + ".json")));
  a.quantity = j.at("quantity").get<std::string>();
  a.metadata = j.at("metadata");
  return a;
}

json artifact_metadata(const RunConfig& config) {
  return {{"config_hash", config.hash()},
          {"version", POLARITON_VERSION},
          {"timestamp", timestamp()}};
}

AmplitudeGrid amplitude_grid(const RunConfig& config) {
  if (config.frequency_hz.empty()) throw ConfigError("sweep.frequency", "missing required key");
  if (config.power_dbm.empty()) throw ConfigError("sweep.power", "missing required key");
  AmplitudeGrid g;
  for (double f : config.frequency_hz) g.omega.push_back(units::angular(f));
  const double w0 = g.omega.front();
  for (double p : config.power_dbm)
    g.amplitude.push_back(power_to_amplitude(p, w0, config.system.kappa_c,
                                             config.attenuation_correction_db));
  for (double w : g.omega) g.column_scale.push_back(std::sqrt(w0 / w));
  return g;
}

ReadoutPulse readout_pulse(const RunConfig& config) {
  if (!(config.readout.frequency_hz > 0.0)) throw ConfigError("readout", "missing required key");
  ReadoutPulse p;
  p.omega_d = units::angular(config.readout.frequency_hz);
  p.amplitude = power_to_amplitude(config.readout.power_dbm, p.omega_d, config.system.kappa_c,
                                   config.attenuation_correction_db);
  p.rise_time = config.readout.rise_time;
  p.duration = config.readout.duration;
  p.window_start = config.readout.window_start;
  p.sample_interval = config.readout.sample_interval;
  return p;
}

NoiseModel readout_noise(const RunConfig& config) {
  NoiseModel n = NoiseModel::from_system(config.system, 0.0, config.seed);
  n.Gamma_up = config.noise.Gamma_up;
  n.preparation_error = config.noise.preparation_error;
  n.heralding = config.noise.heralding;
  if (config.noise.sigma_det) {
    n.sigma_det = *config.noise.sigma_det;
  } else {
    const ReadoutSimulator sim(config.system, readout_pulse(config));
    const double d = std::abs(sim.reference_iq(QubitState::e) - sim.reference_iq(QubitState::g));
    n.sigma_det = calibrate_sigma_det(d, config.noise.overlap_error);
  }
  return n;
}

MapArtifact sweep_deg_map(const RunConfig& config) {
  const AmplitudeGrid g = amplitude_grid(config);
  MapArtifact a = empty_artifact(config, "D_eg", "sqrtHz");
  const std::size_t n_p = g.amplitude.size();
  parallel_for(a.values.size(), config.threads, [&](std::size_t k) {
    const std::size_t i = k / n_p, j = k % n_p;
    double v = 0.0;
    try {
      v = pointer_distance(config.system, {g.omega[i], g.amplitude[j] * g.column_scale[i]});
    } catch (const std::exception& e) {
      throw SolverError(e.what() + at_cell(a.freq_ghz[i], a.power_dbm[j]));
    }
    if (!std::isfinite(v)) throw SolverError("non-finite D_eg" + at_cell(a.freq_ghz[i], a.power_dbm[j]));
    a.values[k] = v;
  });
  return a;
}

MapArtifact sweep_bistability(const RunConfig& config, QubitState eta) {
  const AmplitudeGrid g = amplitude_grid(config);
  MapArtifact a = empty_artifact(config, "D_ud", "sqrtHz");

  BistabilityMapSettings st;
  st.hysteresis = config.hysteresis;
  st.relative_threshold = config.relative_threshold;
  st.column_scale = g.column_scale;
  st.threads = config.threads;
  const BistabilityMap map = bistability_map(config.system, eta, g.omega, g.amplitude, st);
  for (std::size_t k = 0; k < map.D_ud.size(); ++k) {
    if (!std::isfinite(map.D_ud[k])) {
      const std::size_t n_p = g.amplitude.size();
      throw SolverError("non-finite D_ud" + at_cell(a.freq_ghz[k / n_p], a.power_dbm[k % n_p]));
    }
  }
  a.values = map.D_ud;

  const double kc = config.system.kappa_c;
  const double corr = config.attenuation_correction_db;
  std::vector<std::pair<double, double>> up, down, theory_up, theory_down;
  for (std::size_t i = 0; i < g.omega.size(); ++i) {
    const auto& col = map.columns[i];
    if (col.B_up) {
      down.emplace_back(a.freq_ghz[i], amplitude_to_power(*col.B_down, g.omega[i], kc, corr));
      up.emplace_back(a.freq_ghz[i], amplitude_to_power(*col.B_up, g.omega[i], kc, corr));
    }
    if (const auto f = fold_amplitudes(config.system, eta, g.omega[i])) {
      theory_down.emplace_back(a.freq_ghz[i], amplitude_to_power(f->B_down, g.omega[i], kc, corr));
      theory_up.emplace_back(a.freq_ghz[i], amplitude_to_power(f->B_up, g.omega[i], kc, corr));
    }
  }
  std::vector<int> mask(map.bistable.begin(), map.bistable.end());
  a.metadata["qubit_state"] = to_string(eta);
  a.metadata["relative_threshold"] = config.relative_threshold;
  a.metadata["bistable"] = mask;
  a.metadata["components"] = map.components;
  a.metadata["holes"] = map.holes;
  a.metadata["simply_connected"] = map.simply_connected();
  a.metadata["contours"] = {{"B_up", polyline(up)},
                            {"B_down", polyline(down)},
                            {"theory_B_up", polyline(theory_up)},
                            {"theory_B_down", polyline(theory_down)}};
  return a;
}

MapArtifact sweep_fidelity(const RunConfig& config) {
  const AmplitudeGrid g = amplitude_grid(config);
  MapArtifact a = empty_artifact(config, "F_RO", "probability");
  const NoiseModel noise = readout_noise(config);

  FidelityMapSettings st;
  st.pulse = readout_pulse(config);
  st.column_scale = g.column_scale;
  st.threads = config.threads;
  const FidelityMap map =
      fidelity_map(config.system, noise, g.omega, g.amplitude, config.shots_per_point, st);

  const std::size_t n_p = g.amplitude.size();
  std::vector<double> contrast, p_eg, p_ge;
  std::vector<std::string> labels;
  json regions = json::array();
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.omega.size(); ++i) {
    const auto fe = fold_amplitudes(config.system, QubitState::e, g.omega[i]);
    const auto fg = fold_amplitudes(config.system, QubitState::g, g.omega[i]);
    const double up_e = fe ? fe->B_up : inf;
    const double up_g = fg ? fg->B_up : inf;
    auto dbm = [&](double amp) {
      return std::isfinite(amp) ? json(amplitude_to_power(amp, g.omega[i], config.system.kappa_c,
                                                          config.attenuation_correction_db))
                                : json(nullptr);
    };
    regions.push_back({{"freq_GHz", a.freq_ghz[i]}, {"B_up_e_dBm", dbm(up_e)}, {"B_up_g_dBm", dbm(up_g)}});
    for (std::size_t j = 0; j < n_p; ++j) {
      const auto& r = map.reports[map.index(i, j)];
      a.values[map.index(i, j)] = r.F_RO;
      contrast.push_back(r.contrast);
      p_eg.push_back(r.P_e_given_g);
      p_ge.push_back(r.P_g_given_e);
      const double amp = map.amplitude(i, j);
      const int latched = (amp >= up_e) + (amp >= up_g);
      labels.push_back(latched == 0 ? "I" : latched == 1 ? "II" : "III");
    }
  }
  const std::size_t star = map.argmax();
  const auto& best = map.reports[star];
  a.metadata["sigma_det"] = noise.sigma_det;
  a.metadata["shots_per_point"] = config.shots_per_point;
  a.metadata["seed"] = config.seed;
  a.metadata["contrast"] = contrast;
  a.metadata["P_e_given_g"] = p_eg;
  a.metadata["P_g_given_e"] = p_ge;
  a.metadata["region_labels"] = labels;
  a.metadata["region_boundaries"] = regions;
  a.metadata["star"] = {{"freq_GHz", a.freq_ghz[star / n_p]},
                        {"power_dBm", a.power_dbm[star % n_p]},
                        {"F_RO", best.F_RO},
                        {"contrast", best.contrast},
                        {"P_e_given_g", best.P_e_given_g},
                        {"P_g_given_e", best.P_g_given_e}};
  return a;
}

}  // namespace polariton
