#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "polariton/errors.hpp"
#include "polariton/harness.hpp"

namespace py = pybind11;
using namespace polariton;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cavity-ancilla polariton readout simulator";
  m.attr("__version__") = POLARITON_VERSION;

  auto parameter_error = py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", parameter_error.ptr());
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::enum_<QubitState>(m, "QubitState").value("g", QubitState::g).value("e", QubitState::e);
  py::enum_<Polariton>(m, "Polariton")
      .value("upper", Polariton::upper)
      .value("lower", Polariton::lower);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("omega_q", &SystemParams::omega_q)
      .def_readwrite("omega_a", &SystemParams::omega_a)
      .def_readwrite("omega_c", &SystemParams::omega_c)
      .def_readwrite("U_a", &SystemParams::U_a)
      .def_readwrite("g_zz", &SystemParams::g_zz)
      .def_readwrite("g_ac", &SystemParams::g_ac)
      .def_readwrite("kappa_a", &SystemParams::kappa_a)
      .def_readwrite("kappa_c", &SystemParams::kappa_c)
      .def_readwrite("T1", &SystemParams::T1)
      .def_readwrite("T2", &SystemParams::T2)
      .def("validate", &SystemParams::validate);

  py::class_<PolaritonParams>(m, "PolaritonParams")
      .def_readonly("theta", &PolaritonParams::theta)
      .def_readonly("omega_u", &PolaritonParams::omega_u)
      .def_readonly("omega_l", &PolaritonParams::omega_l)
      .def_readonly("chi_u", &PolaritonParams::chi_u)
      .def_readonly("chi_l", &PolaritonParams::chi_l)
      .def_readonly("U_uu", &PolaritonParams::U_uu)
      .def_readonly("U_ll", &PolaritonParams::U_ll)
      .def_readonly("U_ul", &PolaritonParams::U_ul)
      .def_readonly("kappa_u", &PolaritonParams::kappa_u)
      .def_readonly("kappa_l", &PolaritonParams::kappa_l);

  m.def("hybridization_angle", &hybridization_angle, py::arg("delta_ac"), py::arg("g_ac"));
  m.def("polariton_params", &polariton_params, py::arg("sys"), py::arg("eta") = py::none());
  m.def("shifted_polariton_frequency", &shifted_polariton_frequency, py::arg("pp"),
        py::arg("j"), py::arg("eta"));
  m.def("critical_photon_number", &critical_photon_number, py::arg("kappa"), py::arg("U"));

  py::class_<CubicCoefficients>(m, "CubicCoefficients")
      .def(py::init([](double A, double B, double C, cplx D) { return CubicCoefficients{A, B, C, D}; }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"));
  py::class_<PhotonNumberRoot>(m, "PhotonNumberRoot")
      .def_readonly("x", &PhotonNumberRoot::x)
      .def_readonly("stable", &PhotonNumberRoot::stable)
      .def_readonly("marginal", &PhotonNumberRoot::marginal);
  m.def("duffing_cubic_photon_numbers", &duffing_cubic_photon_numbers, py::arg("coef"));

  py::class_<DriveSpec>(m, "DriveSpec")
      .def(py::init([](double w, double a) { return DriveSpec{w, a}; }), py::arg("omega_d"),
           py::arg("Omega_c"))
      .def_readwrite("omega_d", &DriveSpec::omega_d)
      .def_readwrite("Omega_c", &DriveSpec::Omega_c);
  py::class_<SteadyStateBranch>(m, "SteadyStateBranch")
      .def_readonly("alpha", &SteadyStateBranch::alpha)
      .def_readonly("gamma", &SteadyStateBranch::gamma)
      .def_readonly("n_a", &SteadyStateBranch::n_a)
      .def_readonly("n_c", &SteadyStateBranch::n_c)
      .def_readonly("stable", &SteadyStateBranch::stable)
      .def_readonly("marginal", &SteadyStateBranch::marginal)
      .def_readonly("c_out", &SteadyStateBranch::c_out);
  py::class_<FoldAmplitudes>(m, "FoldAmplitudes")
      .def_readonly("B_down", &FoldAmplitudes::B_down)
      .def_readonly("B_up", &FoldAmplitudes::B_up);

  m.def("coupled_steady_states", &coupled_steady_states, py::arg("sys"), py::arg("eta"),
        py::arg("drive"));
  m.def("pointer_distance", &pointer_distance, py::arg("sys"), py::arg("drive"));
  m.def("fold_amplitudes", &fold_amplitudes, py::arg("sys"), py::arg("eta"), py::arg("omega_d"));

  py::class_<HysteresisSettings>(m, "HysteresisSettings")
      .def(py::init<>())
      .def_readwrite("ramp_time", &HysteresisSettings::ramp_time)
      .def_readwrite("hold_time", &HysteresisSettings::hold_time)
      .def_readwrite("average_fraction", &HysteresisSettings::average_fraction)
      .def_readwrite("settle_time_constants", &HysteresisSettings::settle_time_constants)
      .def_readwrite("max_hold_time", &HysteresisSettings::max_hold_time);
  py::class_<HysteresisResult>(m, "HysteresisResult")
      .def_readonly("c_out_up", &HysteresisResult::c_out_up)
      .def_readonly("c_out_down", &HysteresisResult::c_out_down)
      .def_readonly("D_ud", &HysteresisResult::D_ud)
      .def_readonly("bifurcated_up", &HysteresisResult::bifurcated_up)
      .def_readonly("bifurcated_down", &HysteresisResult::bifurcated_down);
  m.def("ramp_hysteresis", &ramp_hysteresis, py::arg("sys"), py::arg("eta"), py::arg("omega_d"),
        py::arg("Omega_meas"), py::arg("Omega_peak"), py::arg("settings") = HysteresisSettings{},
        py::call_guard<py::gil_scoped_release>());

  m.def("power_to_amplitude", &power_to_amplitude, py::arg("P_in_dbm"), py::arg("omega_d"),
        py::arg("kappa_c"), py::arg("attenuation_correction_db") = 0.0);
  m.def("amplitude_to_power", &amplitude_to_power, py::arg("Omega_c"), py::arg("omega_d"),
        py::arg("kappa_c"), py::arg("attenuation_correction_db") = 0.0);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init<>())
      .def_readwrite("sigma_det", &NoiseModel::sigma_det)
      .def_readwrite("Gamma_down", &NoiseModel::Gamma_down)
      .def_readwrite("Gamma_up", &NoiseModel::Gamma_up)
      .def_readwrite("rng_seed", &NoiseModel::rng_seed)
      .def_readwrite("preparation_error", &NoiseModel::preparation_error)
      .def_readwrite("heralding", &NoiseModel::heralding)
      .def_static("from_system", &NoiseModel::from_system, py::arg("sys"), py::arg("sigma_det"),
                  py::arg("seed"));
  py::class_<ReadoutPulse>(m, "ReadoutPulse")
      .def(py::init<>())
      .def_readwrite("omega_d", &ReadoutPulse::omega_d)
      .def_readwrite("amplitude", &ReadoutPulse::amplitude)
      .def_readwrite("rise_time", &ReadoutPulse::rise_time)
      .def_readwrite("duration", &ReadoutPulse::duration)
      .def_readwrite("window_start", &ReadoutPulse::window_start)
      .def_readwrite("sample_interval", &ReadoutPulse::sample_interval);
  py::class_<ShotRecord>(m, "ShotRecord")
      .def_readonly("index", &ShotRecord::index)
      .def_readonly("prepared", &ShotRecord::prepared)
      .def_readonly("initial", &ShotRecord::initial)
      .def_readonly("jump_times", &ShotRecord::jump_times)
      .def_readonly("noiseless_iq", &ShotRecord::noiseless_iq)
      .def_readonly("integrated_iq", &ShotRecord::integrated_iq)
      .def_readonly("latched", &ShotRecord::latched)
      .def_readonly("bifurcation_time", &ShotRecord::bifurcation_time)
      .def_readonly("final_photons", &ShotRecord::final_photons)
      .def_readonly("discarded", &ShotRecord::discarded);
  py::class_<ReadoutSimulator>(m, "ReadoutSimulator")
      .def(py::init([](const SystemParams& s, const ReadoutPulse& p) { return ReadoutSimulator(s, p); }),
           py::arg("sys"), py::arg("pulse"), py::call_guard<py::gil_scoped_release>())
      .def("simulate", &ReadoutSimulator::simulate, py::arg("noise"), py::arg("prepared"),
           py::arg("index"), py::call_guard<py::gil_scoped_release>())
      .def(
          "simulate_forced",
          [](const ReadoutSimulator& sim, const NoiseModel& n, QubitState s,
             const std::vector<double>& jumps, std::uint64_t index) {
            py::gil_scoped_release release;
            return sim.simulate_forced(n, s, jumps, index);
          },
          py::arg("noise"), py::arg("prepared"), py::arg("jump_times"), py::arg("index") = 0)
      .def("run", &ReadoutSimulator::run, py::arg("noise"), py::arg("shots"), py::arg("threads") = 1,
           py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("latch_level", &ReadoutSimulator::latch_level)
      .def("reference_iq", &ReadoutSimulator::reference_iq, py::arg("state"));

  py::class_<FidelityReport>(m, "FidelityReport")
      .def_readonly("P_e_given_g", &FidelityReport::P_e_given_g)
      .def_readonly("P_g_given_e", &FidelityReport::P_g_given_e)
      .def_readonly("F_RO", &FidelityReport::F_RO)
      .def_readonly("contrast", &FidelityReport::contrast)
      .def_readonly("threshold", &FidelityReport::threshold)
      .def_readonly("counts", &FidelityReport::counts)
      .def_readonly("discarded", &FidelityReport::discarded)
      .def_readonly("overlap_error", &FidelityReport::overlap_error)
      .def_readonly("preparation_error", &FidelityReport::preparation_error)
      .def_readonly("pre_bifurcation_error", &FidelityReport::pre_bifurcation_error)
      .def_readonly("sigma_det", &FidelityReport::sigma_det);
  m.def(
      "fidelity_report",
      [](const std::vector<ShotRecord>& shots, std::optional<double> threshold, double sigma) {
        return fidelity_report(shots, threshold, sigma);
      },
      py::arg("shots"), py::arg("threshold") = py::none(), py::arg("sigma_det") = 0.0);
  m.def("error_budget", &error_budget, py::arg("sys"), py::arg("t_int"), py::arg("t_b"));
  m.def("calibrate_sigma_det", &calibrate_sigma_det, py::arg("separation"),
        py::arg("overlap_error") = 1e-3);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("system", &RunConfig::system)
      .def_readwrite("attenuation_correction_db", &RunConfig::attenuation_correction_db)
      .def_readwrite("frequency_hz", &RunConfig::frequency_hz)
      .def_readwrite("power_dbm", &RunConfig::power_dbm)
      .def_readwrite("shots_per_point", &RunConfig::shots_per_point)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("threads", &RunConfig::threads)
      .def("hash", &RunConfig::hash);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("yaml_text"));
  m.def("readout_pulse", &readout_pulse, py::arg("config"));
  m.def("readout_noise", &readout_noise, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<MapArtifact>(m, "MapArtifact")
      .def_readonly("quantity", &MapArtifact::quantity)
      .def_readonly("unit", &MapArtifact::unit)
      .def_readonly("freq_ghz", &MapArtifact::freq_ghz)
      .def_readonly("power_dbm", &MapArtifact::power_dbm)
      .def_readonly("values", &MapArtifact::values)
      .def("to_csv", &MapArtifact::to_csv)
      .def("to_json", &MapArtifact::to_json)
      .def("write", &MapArtifact::write, py::arg("dir"), py::arg("stem"));
  m.def("sweep_deg_map", &sweep_deg_map, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("sweep_bistability", &sweep_bistability, py::arg("config"), py::arg("eta"),
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep_fidelity", &sweep_fidelity, py::arg("config"), py::call_guard<py::gil_scoped_release>());
}
