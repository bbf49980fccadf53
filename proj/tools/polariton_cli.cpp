// Command-line front end: parameter tables, maps and single-shot traces.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <string>

#include "polariton/errors.hpp"
#include "polariton/harness.hpp"
#include "polariton/units.hpp"

using namespace polariton;
using nlohmann::json;

namespace {

constexpr int kConfigExit = 2;
constexpr int kSolverExit = 3;

double mhz(double w) { return units::ordinary(w) / units::MHz; }
double ghz(double w) { return units::ordinary(w) / units::GHz; }

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

json params_json(const RunConfig& c) {
  json out;
  out["config_hash"] = c.hash();
  for (auto eta : {std::optional<QubitState>{}, std::optional{QubitState::g},
                   std::optional{QubitState::e}}) {
    const PolaritonParams pp = polariton_params(c.system, eta);
    json row = {{"theta_rad", pp.theta},
                {"omega_u_GHz", ghz(pp.omega_u)},
                {"omega_l_GHz", ghz(pp.omega_l)},
                {"chi_u_MHz", mhz(pp.chi_u)},
                {"chi_l_MHz", mhz(pp.chi_l)},
                {"U_uu_MHz", mhz(pp.U_uu)},
                {"U_ll_MHz", mhz(pp.U_ll)},
                {"U_ul_MHz", mhz(pp.U_ul)},
                {"kappa_u_MHz", mhz(pp.kappa_u)},
                {"kappa_l_MHz", mhz(pp.kappa_l)},
                {"N_crit_u", pp.U_uu > 0 ? json(critical_photon_number(pp.kappa_u, pp.U_uu)) : json(nullptr)},
                {"N_crit_l", pp.U_ll > 0 ? json(critical_photon_number(pp.kappa_l, pp.U_ll)) : json(nullptr)}};
    if (eta) {
      row["omega_u_shifted_GHz"] = ghz(shifted_polariton_frequency(pp, Polariton::upper, *eta));
      row["omega_l_shifted_GHz"] = ghz(shifted_polariton_frequency(pp, Polariton::lower, *eta));
    }
    out[eta ? to_string(*eta) : "bare"] = row;
  }
  return out;
}

void print_params(const json& p) {
  std::printf("%-6s %8s %9s %9s %8s %8s %8s %8s %8s %8s %8s %9s %9s\n", "state", "theta",
              "w_u/GHz", "w_l/GHz", "chi_u", "chi_l", "U_uu", "U_ll", "U_ul", "kap_u", "kap_l",
              "Ncrit_u", "Ncrit_l");
  for (const char* k : {"bare", "g", "e"}) {
    const json& r = p.at(k);
    auto num = [&](const char* f) { return r.at(f).is_null() ? NAN : r.at(f).get<double>(); };
    std::printf("%-6s %8.4f %9.5f %9.5f %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f %9.4g %9.4g\n", k,
                num("theta_rad"), num("omega_u_GHz"), num("omega_l_GHz"), num("chi_u_MHz"),
                num("chi_l_MHz"), num("U_uu_MHz"), num("U_ll_MHz"), num("U_ul_MHz"),
                num("kappa_u_MHz"), num("kappa_l_MHz"), num("N_crit_u"), num("N_crit_l"));
  }
  std::printf("(rates and shifts in MHz, frequencies ordinary)\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polariton readout simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string qubit_state;

  auto common = [&](CLI::App* sub, bool with_state) {
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: run.output)");
    sub->add_option("--seed", seed, "master random seed");
    sub->add_option("--threads", threads, "worker threads");
    if (with_state)
      sub->add_option("--qubit-state", qubit_state, "qubit state g or e")->check(CLI::IsMember({"g", "e"}));
  };

  auto* params = app.add_subcommand("params", "polariton parameters and critical photon numbers");
  common(params, false);
  auto* curves = app.add_subcommand("curves", "polariton parameters versus mixing angle");
  common(curves, false);
  auto* deg = app.add_subcommand("deg-map", "pointer distance D_eg over the sweep grid");
  common(deg, false);
  auto* bist = app.add_subcommand("bistability-map", "ramp hysteresis D_ud over the sweep grid");
  common(bist, true);
  auto* fid = app.add_subcommand("fidelity-map", "Monte-Carlo readout fidelity over the sweep grid");
  common(fid, false);
  auto* shot = app.add_subcommand("shot", "single-shot output trace at the readout point");
  common(shot, true);
  std::uint64_t shot_index = 0;
  std::vector<double> jump_ns;
  shot->add_option("--index", shot_index, "shot index (selects the random stream)");
  shot->add_option("--jump-at", jump_ns, "force qubit jumps at these times (ns)");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c = load_config(config_path);
    if (seed) c.seed = *seed;
    if (threads) c.threads = *threads;
    if (!out_dir.empty()) c.output_dir = out_dir;
    const auto out = c.output_dir;

    if (params->parsed()) {
      const json p = params_json(c);
      print_params(p);
      write_text(out / "params.json", p.dump(2) + '\n');
    } else if (curves->parsed()) {
      std::vector<double> theta;
      const double half_pi = std::numbers::pi / 2;
      for (std::size_t k = 1; k <= c.curve_points; ++k)
        theta.push_back(half_pi * static_cast<double>(k) / static_cast<double>(c.curve_points + 1));
      std::string csv = "theta_rad,chi_u_MHz,chi_l_MHz,U_uu_MHz,U_ll_MHz,U_ul_MHz,kappa_u_MHz,kappa_l_MHz\n";
      for (const auto& r : parameter_curves(c.system, theta)) {
        csv += g17(r.theta) + ',' + g17(mhz(r.chi_u)) + ',' + g17(mhz(r.chi_l)) + ',' +
               g17(mhz(r.U_uu)) + ',' + g17(mhz(r.U_ll)) + ',' + g17(mhz(r.U_ul)) + ',' +
               g17(mhz(r.kappa_u)) + ',' + g17(mhz(r.kappa_l)) + '\n';
      }
      write_text(out / "curves.csv", csv);
      std::printf("wrote %s\n", (out / "curves.csv").c_str());
    } else if (deg->parsed()) {
      sweep_deg_map(c).write(out, "deg_map");
      std::printf("wrote %s\n", (out / "deg_map.csv").c_str());
    } else if (bist->parsed()) {
      std::vector<QubitState> states;
      if (!qubit_state.empty()) {
        states.push_back(parse_qubit_state(qubit_state, "--qubit-state"));
      } else if (c.qubit_state) {
        states.push_back(*c.qubit_state);
      } else {
        states = {QubitState::g, QubitState::e};
      }
      for (auto eta : states) {
        const std::string stem = std::string("bistability_") + to_string(eta);
        const MapArtifact a = sweep_bistability(c, eta);
        a.write(out, stem);
        std::printf("wrote %s (%d component(s), %d hole(s))\n", (out / (stem + ".csv")).c_str(),
                    a.metadata["components"].get<int>(), a.metadata["holes"].get<int>());
      }
    } else if (fid->parsed()) {
      const MapArtifact a = sweep_fidelity(c);
      a.write(out, "fidelity_map");
      const json& s = a.metadata["star"];
      std::printf("wrote %s; best F_RO %.4f at %.4f GHz, %.2f dBm\n",
                  (out / "fidelity_map.csv").c_str(), s["F_RO"].get<double>(),
                  s["freq_GHz"].get<double>(), s["power_dBm"].get<double>());
    } else if (shot->parsed()) {
      const QubitState prepared =
          qubit_state.empty() ? c.qubit_state.value_or(QubitState::e)
                              : parse_qubit_state(qubit_state, "--qubit-state");
      const ReadoutPulse pulse = readout_pulse(c);
      const NoiseModel noise = readout_noise(c);
      const ReadoutSimulator sim(c.system, pulse);
      ShotRecord rec;
      Trajectory traj;
      if (jump_ns.empty()) {
        rec = sim.simulate(noise, prepared, shot_index);
      } else {
        std::vector<double> jumps;
        for (double t : jump_ns) jumps.push_back(t * units::ns);
        rec = sim.simulate_forced(noise, prepared, jumps, shot_index);
      }
      if (rec.discarded) {
        traj = {};
      } else if (rec.jump_times.empty()) {
        traj = sim.reference(rec.initial);
      } else {
        IntegratorSettings is;
        is.sample_interval = pulse.sample_interval;
        traj = integrate_with_jumps(c.system, rec.initial, rec.jump_times, pulse.protocol(), {}, is);
      }
      std::string csv = "t_ns,re_c_out,im_c_out,abs_c_out\n";
      const double root = std::sqrt(c.system.kappa_c);
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const cplx co = root * traj.gamma[i];
        csv += g17(traj.times[i] / units::ns) + ',' + g17(co.real()) + ',' + g17(co.imag()) + ',' +
               g17(std::abs(co)) + '\n';
      }
      write_text(out / "shot.csv", csv);
      json j = {{"index", rec.index},
                {"prepared", to_string(rec.prepared)},
                {"initial", to_string(rec.initial)},
                {"discarded", rec.discarded},
                {"jump_times_ns", json::array()},
                {"integrated_iq", {rec.integrated_iq.real(), rec.integrated_iq.imag()}},
                {"noiseless_iq", {rec.noiseless_iq.real(), rec.noiseless_iq.imag()}},
                {"latched", rec.latched},
                {"latch_level", sim.latch_level()},
                {"bifurcation_time_ns", rec.bifurcation_time ? json(*rec.bifurcation_time / units::ns) : json(nullptr)},
                {"final_photons_upper", rec.final_photons},
                {"sigma_det", noise.sigma_det},
                {"metadata", artifact_metadata(c)}};
      for (double t : rec.jump_times) j["jump_times_ns"].push_back(t / units::ns);
      write_text(out / "shot.json", j.dump(2) + '\n');
      std::printf("prepared %s: latched=%s, photons=%.3f; wrote %s\n", to_string(rec.prepared),
                  rec.latched ? "yes" : "no", rec.final_photons, (out / "shot.csv").c_str());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverExit;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kSolverExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
