#include "polariton/dynamics.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>

#include "polariton/errors.hpp"
#include "polariton/parallel.hpp"
#include "polariton/units.hpp"

namespace polariton {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr cplx I{0.0, 1.0};

// (Re α, Im α, Re γ, Im γ, Re ∫γ, Im ∫γ)
using State = std::array<double, 6>;

struct FieldEquations {
  double kappa_a, kappa_c, g_ac, U_a;
  double delta_a, delta_c;
  double omega_start, omega_slope, t_start;

  void operator()(const State& x, State& dxdt, double t) const {
    const cplx a(x[0], x[1]);
    const cplx c(x[2], x[3]);
    const double drive = omega_start + omega_slope * (t - t_start);
    const cplx da = cplx(-0.5 * kappa_a, delta_a + U_a * std::norm(a)) * a - I * g_ac * c;
    const cplx dc = cplx(-0.5 * kappa_c, delta_c) * c - I * g_ac * a - I * drive;
    dxdt = {da.real(), da.imag(), dc.real(), dc.imag(), c.real(), c.imag()};
  }
};

std::vector<double> sorted_unique(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double t : v) {
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  }
  return out;
}

// A qubit switch schedule: state at t = 0 and ordered toggle times.
struct QubitSchedule {
  std::optional<QubitState> initial;
  std::vector<double> toggles;
};

Trajectory integrate_impl(const SystemParams& sys, const QubitSchedule& schedule,
                          const DriveProtocol& protocol, const FieldState& initial,
                          const IntegratorSettings& settings) {
  protocol.validate();
  if (!(settings.sample_interval > 0.0))
    throw ParameterError("sample_interval must be positive");
  const double T = protocol.duration();
  const double tol = 1e-6 * std::min(settings.sample_interval, T);

  std::vector<double> bounds = {0.0, T};
  for (const auto& [t, amp] : protocol.envelope) bounds.push_back(t);
  for (double t : schedule.toggles)
    if (t > 0.0 && t < T) bounds.push_back(t);
  bounds = sorted_unique(std::move(bounds), tol);

  std::vector<double> samples = bounds;
  const auto n_uniform = static_cast<std::size_t>(std::floor(T / settings.sample_interval));
  for (std::size_t k = 1; k <= n_uniform; ++k) samples.push_back(k * settings.sample_interval);
  for (double t : settings.extra_samples)
    if (t >= 0.0 && t <= T) samples.push_back(t);
  for (double& t : samples) t = std::min(t, T);
  samples = sorted_unique(std::move(samples), tol);

  Trajectory traj;
  traj.times.reserve(samples.size());
  traj.alpha.reserve(samples.size());
  traj.gamma.reserve(samples.size());
  traj.gamma_integral.reserve(samples.size());

  State x = {initial.alpha.real(), initial.alpha.imag(), initial.gamma.real(),
             initial.gamma.imag(), 0.0, 0.0};
  auto record = [&](const State& s, double t) {
    for (double v : s) {
      if (!std::isfinite(v)) throw IntegrationError("non-finite field state", t);
    }
    traj.times.push_back(t);
    traj.alpha.emplace_back(s[0], s[1]);
    traj.gamma.emplace_back(s[2], s[3]);
    traj.gamma_integral.emplace_back(s[4], s[5]);
  };
  record(x, 0.0);

  // Largest trial step: one period of the fastest linear rate (or of the initial
  // Kerr shift). An oversized first step can overflow inside a stage, and a
  // non-finite error estimate is not rejected by the controller.
  const double n0 = std::norm(initial.alpha) + std::norm(initial.gamma);
  const double rate = std::max(
      {std::abs(protocol.omega_d - sys.omega_a) + sys.g_zz, std::abs(protocol.omega_d - sys.omega_c),
       sys.g_ac, sys.kappa_a, sys.kappa_c, sys.U_a * (n0 + 1.0), 1.0 / T});
  const double max_dt = 1.0 / rate;

  auto stepper = odeint::make_controlled(settings.abs_tol, settings.rel_tol, max_dt,
                                         odeint::runge_kutta_fehlberg78<State>());

  std::optional<QubitState> eta = schedule.initial;
  auto toggle = schedule.toggles.begin();
  auto sample = samples.begin() + 1;

  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const double t0 = bounds[s];
    const double t1 = bounds[s + 1];
    while (toggle != schedule.toggles.end() && *toggle <= t0 + tol) {
      if (eta) eta = flipped(*eta);
      ++toggle;
    }

    const double a0 = protocol.amplitude(t0);
    const double a1 = protocol.amplitude(t1);
    const FieldEquations rhs{sys.kappa_a,
                             sys.kappa_c,
                             sys.g_ac,
                             sys.U_a,
                             protocol.omega_d - shifted_ancilla_frequency(sys, eta),
                             protocol.omega_d - sys.omega_c,
                             a0,
                             (a1 - a0) / (t1 - t0),
                             t0};

    std::vector<double> times = {t0};
    while (sample != samples.end() && *sample <= t1 + tol) times.push_back(*sample++);
    if (times.back() < t1 - tol) times.push_back(t1);

    const double dt = std::min({settings.sample_interval, t1 - t0, max_dt}) * 1e-2;
    bool first = true;
    try {
      odeint::integrate_times(
          stepper, rhs, x, times.begin(), times.end(), dt,
          [&](const State& st, double t) {
            if (first) {
              first = false;
              return;
            }
            record(st, t);
          },
          odeint::max_step_checker(1000000));
    } catch (const IntegrationError&) {
      throw;
    } catch (const std::exception& ex) {
      throw IntegrationError(std::string("integrator failure: ") + ex.what(),
                             traj.times.back());
    }
  }
  return traj;
}

}  // namespace

double DriveProtocol::amplitude(double t) const {
  if (envelope.empty()) return 0.0;
  if (t <= envelope.front().first) return envelope.front().second;
  if (t >= envelope.back().first) return envelope.back().second;
  const auto hi = std::upper_bound(envelope.begin(), envelope.end(), t,
                                   [](double v, const auto& p) { return v < p.first; });
  const auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

double DriveProtocol::duration() const { return envelope.empty() ? 0.0 : envelope.back().first; }

void DriveProtocol::validate() const {
  if (!std::isfinite(omega_d)) throw ParameterError("drive frequency must be finite");
  if (envelope.size() < 2) throw ParameterError("envelope needs at least two breakpoints");
  if (envelope.front().first != 0.0) throw ParameterError("envelope must start at t = 0");
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    const auto& [t, amp] = envelope[i];
    if (!std::isfinite(t) || !std::isfinite(amp) || amp < 0.0)
      throw ParameterError("envelope amplitudes must be finite and non-negative");
    if (i > 0 && !(t > envelope[i - 1].first))
      throw ParameterError("envelope times must be strictly increasing");
  }
}

DriveProtocol DriveProtocol::constant(double omega_d, double amplitude, double duration) {
  return {omega_d, {{0.0, amplitude}, {duration, amplitude}}};
}

DriveProtocol DriveProtocol::square_pulse(double omega_d, double amplitude, double rise,
                                          double duration) {
  if (!(rise > 0.0 && rise < duration))
    throw ParameterError("square pulse rise time must lie in (0, duration)");
  return {omega_d, {{0.0, 0.0}, {rise, amplitude}, {duration, amplitude}}};
}

std::vector<double> Trajectory::output_magnitude(double kappa_c) const {
  std::vector<double> out(gamma.size());
  const double root = std::sqrt(kappa_c);
  std::transform(gamma.begin(), gamma.end(), out.begin(),
                 [root](cplx c) { return root * std::abs(c); });
  return out;
}

std::size_t Trajectory::index_at(double t) const {
  if (times.empty()) throw ParameterError("empty trajectory");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return times.size() - 1;
  const auto i = static_cast<std::size_t>(it - times.begin());
  if (i > 0 && t - times[i - 1] < *it - t) return i - 1;
  return i;
}

cplx Trajectory::mean_gamma(double t0, double t1) const {
  const std::size_t i0 = index_at(t0);
  const std::size_t i1 = index_at(t1);
  if (i1 <= i0) return gamma[i0];
  return (gamma_integral[i1] - gamma_integral[i0]) / (times[i1] - times[i0]);
}

Trajectory integrate(const SystemParams& sys, std::optional<QubitState> eta,
                     const DriveProtocol& protocol, const FieldState& initial,
                     const IntegratorSettings& settings) {
  return integrate_impl(sys, {eta, {}}, protocol, initial, settings);
}

Trajectory integrate_with_jumps(const SystemParams& sys, QubitState initial_state,
                                std::span<const double> jump_times,
                                const DriveProtocol& protocol, const FieldState& initial,
                                const IntegratorSettings& settings) {
  QubitSchedule schedule{initial_state, {jump_times.begin(), jump_times.end()}};
  if (!std::is_sorted(schedule.toggles.begin(), schedule.toggles.end()))
    throw ParameterError("jump times must be increasing");
  std::vector<double> extra = settings.extra_samples;
  extra.insert(extra.end(), jump_times.begin(), jump_times.end());
  IntegratorSettings s = settings;
  s.extra_samples = std::move(extra);
  return integrate_impl(sys, schedule, protocol, initial, s);
}

std::optional<std::size_t> debounced_crossing(std::span<const double> magnitude, double level,
                                              std::size_t debounce, std::size_t first) {
  std::size_t run = 0;
  for (std::size_t i = first; i < magnitude.size(); ++i) {
    run = magnitude[i] > level ? run + 1 : 0;
    if (run >= std::max<std::size_t>(1, debounce)) return i + 1 - run;
  }
  return std::nullopt;
}

HysteresisResult ramp_hysteresis(const SystemParams& sys, QubitState eta, double omega_d,
                                 double Omega_meas, double Omega_peak,
                                 const HysteresisSettings& settings) {
  const double kappa_min = std::min(sys.kappa_a, sys.kappa_c);
  if (!(kappa_min > 0.0 && settings.ramp_time > 10.0 / kappa_min))
    throw ParameterError("ramp_time must exceed 10 / min(kappa)");
  if (!(settings.hold_time > 0.0)) throw ParameterError("hold_time must be positive");
  if (!(settings.average_fraction > 0.0 && settings.average_fraction <= 1.0))
    throw ParameterError("average_fraction must lie in (0, 1]");
  if (!(Omega_peak >= Omega_meas)) throw ParameterError("Omega_peak must be >= Omega_meas");
  if (!(settings.settle_time_constants >= 0.0))
    throw ParameterError("settle_time_constants must be non-negative");

  const auto branches = coupled_steady_states(sys, eta, {omega_d, Omega_meas});
  const double Tr = settings.ramp_time;
  const double Tp = settings.hold_time;
  double Th = Tp;
  if (settings.settle_time_constants > 0.0) {
    double slowest = 0.0;
    for (const auto& b : branches) {
      if (!b.stable) continue;
      const auto v = jacobian_stability(sys, eta, {omega_d, Omega_meas}, b.alpha, b.gamma);
      slowest = std::max(slowest, v.max_real_part < 0.0 ? -1.0 / v.max_real_part
                                                         : settings.max_hold_time);
    }
    Th = std::clamp(settings.settle_time_constants * slowest, Tp,
                    std::max(Tp, settings.max_hold_time));
  }
  const double window = settings.average_fraction * Th;
  const double t_up = Tr + Th;
  const double t_end = 3.0 * Tr + 2.0 * Th + Tp;

  DriveProtocol protocol{omega_d,
                         {{0.0, 0.0},
                          {Tr, Omega_meas},
                          {t_up, Omega_meas},
                          {2.0 * Tr + Th, Omega_peak},
                          {2.0 * Tr + Th + Tp, Omega_peak},
                          {3.0 * Tr + Th + Tp, Omega_meas},
                          {t_end, Omega_meas}}};

  IntegratorSettings is = settings.integrator;
  is.extra_samples.push_back(t_up - window);
  is.extra_samples.push_back(t_end - window);
  const Trajectory traj = integrate(sys, eta, protocol, {}, is);

  const double root = std::sqrt(sys.kappa_c);
  HysteresisResult r;
  r.c_out_up = root * traj.mean_gamma(t_up - window, t_up);
  r.c_out_down = root * traj.mean_gamma(t_end - window, t_end);
  r.D_ud = std::abs(r.c_out_up - r.c_out_down);

  const double low = std::abs(ramp_up_branch(branches).c_out);
  const double high = std::abs(ramp_down_branch(branches).c_out);
  if (high - low > 1e-9 * std::max(high, 1.0)) {
    const double level = 0.5 * (low + high);
    const auto mag = traj.output_magnitude(sys.kappa_c);
    const std::size_t up_end = traj.index_at(t_up);
    const std::size_t down_end = mag.size() - 1;
    auto latched_before = [&](std::size_t end) {
      return end >= 2 && mag[end] > level && mag[end - 1] > level && mag[end - 2] > level;
    };
    r.bifurcated_up = latched_before(up_end);
    r.bifurcated_down = !latched_before(down_end);
  } else if (const auto folds = fold_amplitudes(sys, eta, omega_d)) {
    r.bifurcated_up = Omega_meas >= folds->B_up;
    r.bifurcated_down = Omega_peak >= folds->B_up && Omega_meas <= folds->B_down;
  }
  return r;
}

std::pair<int, int> mask_topology(std::span<const unsigned char> mask, std::size_t rows,
                                  std::size_t cols) {
  if (mask.size() != rows * cols) throw ParameterError("mask shape mismatch");
  std::vector<int> label(mask.size(), -1);
  auto flood = [&](std::size_t start, unsigned char value, int id) {
    bool touches_border = false;
    std::vector<std::size_t> stack = {start};
    label[start] = id;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t r = k / cols;
      const std::size_t c = k % cols;
      if (r == 0 || c == 0 || r + 1 == rows || c + 1 == cols) touches_border = true;
      // 8-connected set cells, 4-connected background
      static constexpr std::array<std::pair<long, long>, 8> nbrs = {
          {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
      const std::size_t n_nbrs = value != 0 ? 8 : 4;
      for (std::size_t q = 0; q < n_nbrs; ++q) {
        const auto [dr, dc] = nbrs[q];
        const long nr = static_cast<long>(r) + dr;
        const long nc = static_cast<long>(c) + dc;
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(rows) || nc >= static_cast<long>(cols))
          continue;
        const std::size_t nk = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
        if (label[nk] < 0 && (mask[nk] != 0) == (value != 0)) {
          label[nk] = id;
          stack.push_back(nk);
        }
      }
    }
    return touches_border;
  };

  int components = 0;
  int holes = 0;
  int next_id = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (label[k] >= 0) continue;
    const bool set = mask[k] != 0;
    const bool border = flood(k, mask[k], next_id++);
    if (set) {
      ++components;
    } else if (!border) {
      ++holes;
    }
  }
  return {components, holes};
}

BistabilityMap bistability_map(const SystemParams& sys, QubitState eta,
                               std::span<const double> omega_grid,
                               std::span<const double> amplitude_grid,
                               const BistabilityMapSettings& settings) {
  if (omega_grid.empty() || amplitude_grid.empty())
    throw ParameterError("bistability_map: empty grid");

  BistabilityMap map;
  map.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  map.amplitude_grid.assign(amplitude_grid.begin(), amplitude_grid.end());
  const std::size_t n_w = omega_grid.size();
  const std::size_t n_a = amplitude_grid.size();
  if (settings.column_scale.empty()) {
    map.column_scale.assign(n_w, 1.0);
  } else if (settings.column_scale.size() == n_w) {
    map.column_scale = settings.column_scale;
  } else {
    throw ParameterError("bistability_map: column_scale must match the frequency grid");
  }
  map.D_ud.assign(n_w * n_a, 0.0);
  map.c_out_scale.assign(n_w * n_a, 0.0);
  map.bistable.assign(n_w * n_a, 0);

  const double top = *std::max_element(amplitude_grid.begin(), amplitude_grid.end()) *
                     *std::max_element(map.column_scale.begin(), map.column_scale.end());
  const double peak = settings.peak_amplitude > 0.0 ? settings.peak_amplitude : 2.0 * top;

  parallel_for(n_w * n_a, settings.threads, [&](std::size_t k) {
    const std::size_t iw = k / n_a;
    const std::size_t ia = k % n_a;
    const double a = map.amplitude(iw, ia);
    HysteresisResult h;
    try {
      h = ramp_hysteresis(sys, eta, omega_grid[iw], a, std::max(peak, a), settings.hysteresis);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at omega_d/2pi = " +
                        std::to_string(units::ordinary(omega_grid[iw])) + " Hz, Omega/2pi = " +
                        std::to_string(units::ordinary(a)) + " Hz");
    }
    map.D_ud[k] = h.D_ud;
    map.c_out_scale[k] = std::max(std::abs(h.c_out_up), std::abs(h.c_out_down));
    map.bistable[k] = h.D_ud > settings.relative_threshold * map.c_out_scale[k] ? 1 : 0;
  });

  map.columns.resize(n_w);
  for (std::size_t iw = 0; iw < n_w; ++iw) {
    BistabilityColumn& col = map.columns[iw];
    for (std::size_t ia = 0; ia < n_a; ++ia) {
      if (!map.bistable[map.index(iw, ia)]) continue;
      if (!col.lowest || amplitude_grid[ia] < amplitude_grid[*col.lowest]) col.lowest = ia;
      if (!col.highest || amplitude_grid[ia] > amplitude_grid[*col.highest]) col.highest = ia;
    }
    if (col.lowest) {
      col.B_down = map.amplitude(iw, *col.lowest);
      col.B_up = map.amplitude(iw, *col.highest);
    }
  }
  std::tie(map.components, map.holes) = mask_topology(map.bistable, n_w, n_a);
  return map;
}

std::vector<unsigned char> steady_bistable_mask(const SystemParams& sys, QubitState eta,
                                                std::span<const double> omega_grid,
                                                std::span<const double> amplitude_grid,
                                                std::span<const double> column_scale) {
  if (!column_scale.empty() && column_scale.size() != omega_grid.size())
    throw ParameterError("steady_bistable_mask: column_scale must match the frequency grid");
  std::vector<unsigned char> mask(omega_grid.size() * amplitude_grid.size(), 0);
  for (std::size_t iw = 0; iw < omega_grid.size(); ++iw) {
    const auto folds = fold_amplitudes(sys, eta, omega_grid[iw]);
    if (!folds) continue;
    const double scale = column_scale.empty() ? 1.0 : column_scale[iw];
    for (std::size_t ia = 0; ia < amplitude_grid.size(); ++ia) {
      const double a = amplitude_grid[ia] * scale;
      mask[iw * amplitude_grid.size() + ia] = (a > folds->B_down && a < folds->B_up) ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace polariton
