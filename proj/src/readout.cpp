#include "polariton/readout.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "polariton/errors.hpp"
#include "polariton/parallel.hpp"
#include "polariton/units.hpp"

namespace polariton {

namespace {

constexpr std::size_t kLatchDebounce = 3;

std::mt19937_64 shot_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::size_t slot(QubitState s) { return s == QubitState::g ? 0 : 1; }

}  // namespace

void NoiseModel::validate() const {
  if (!(sigma_det >= 0.0) || !std::isfinite(sigma_det))
    throw ParameterError("sigma_det must be finite and non-negative");
  if (!(Gamma_down >= 0.0) || !(Gamma_up >= 0.0))
    throw ParameterError("transition rates must be non-negative");
  if (!(preparation_error >= 0.0 && preparation_error <= 1.0))
    throw ParameterError("preparation_error must lie in [0, 1]");
}

NoiseModel NoiseModel::from_system(const SystemParams& sys, double sigma_det,
                                   std::uint64_t seed) {
  NoiseModel n;
  n.sigma_det = sigma_det;
  n.Gamma_down = sys.T1 > 0.0 ? 1.0 / sys.T1 : 0.0;
  n.rng_seed = seed;
  return n;
}

void ReadoutPulse::validate() const {
  if (!(omega_d > 0.0)) throw ParameterError("readout frequency must be positive");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw ParameterError("readout amplitude must be finite and non-negative");
  if (!(rise_time > 0.0 && rise_time < duration))
    throw ParameterError("rise_time must lie in (0, duration)");
  if (!(window_start >= 0.0 && window_start < duration))
    throw ParameterError("integration window must start inside the pulse");
  if (!(sample_interval > 0.0)) throw ParameterError("sample_interval must be positive");
}

DriveProtocol ReadoutPulse::protocol() const {
  return DriveProtocol::square_pulse(omega_d, amplitude, rise_time, duration);
}

ReadoutSimulator::ReadoutSimulator(const SystemParams& sys, const ReadoutPulse& pulse,
                                   const IntegratorSettings& integrator)
    : sys_(sys), pulse_(pulse), integrator_(integrator) {
  sys_.validate();
  pulse_.validate();
  protocol_ = pulse_.protocol();
  integrator_.sample_interval = pulse_.sample_interval;
  integrator_.extra_samples.push_back(pulse_.window_start);

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (auto eta : {QubitState::g, QubitState::e}) {
    for (const auto& b : coupled_steady_states(sys_, eta, {pulse_.omega_d, pulse_.amplitude})) {
      if (!b.stable) continue;
      lo = std::min(lo, std::abs(b.c_out));
      hi = std::max(hi, std::abs(b.c_out));
    }
  }
  latch_level_ = std::isfinite(lo) ? 0.5 * (lo + hi) : std::numeric_limits<double>::infinity();

  reference_g_ = integrate(sys_, QubitState::g, protocol_, {}, integrator_);
  reference_e_ = integrate(sys_, QubitState::e, protocol_, {}, integrator_);
}

cplx ReadoutSimulator::reference_iq(QubitState s) const {
  return std::sqrt(sys_.kappa_c) * reference(s).mean_gamma(pulse_.window_start, pulse_.duration);
}

ShotRecord ReadoutSimulator::finish(const Trajectory& traj, ShotRecord rec,
                                    const NoiseModel& noise, std::uint64_t index) const {
  rec.noiseless_iq =
      std::sqrt(sys_.kappa_c) * traj.mean_gamma(pulse_.window_start, pulse_.duration);

  const std::vector<double> mag = traj.output_magnitude(sys_.kappa_c);
  if (const auto i = debounced_crossing(mag, latch_level_, kLatchDebounce))
    rec.bifurcation_time = traj.times[*i];
  const std::size_t n = mag.size();
  rec.latched = n >= kLatchDebounce &&
                std::all_of(mag.end() - kLatchDebounce, mag.end(),
                            [&](double m) { return m > latch_level_; });

  QubitState final_state = rec.initial;
  if (rec.jump_times.size() % 2 == 1) final_state = flipped(final_state);
  SteadyStateBranch end;
  end.alpha = traj.alpha.back();
  end.gamma = traj.gamma.back();
  rec.final_photons = std::norm(upper_polariton_amplitude(sys_, final_state, end));

  rec.integrated_iq = rec.noiseless_iq;
  if (noise.sigma_det > 0.0) {
    // the noise draw uses its own stream so forced and sampled shots share it
    auto rng = shot_stream(noise.rng_seed ^ 0x9e3779b97f4a7c15ULL, index);
    std::normal_distribution<double> gauss(0.0, noise.sigma_det);
    const double re = gauss(rng);
    const double im = gauss(rng);
    rec.integrated_iq += cplx(re, im);
  }
  return rec;
}

ShotRecord ReadoutSimulator::simulate(const NoiseModel& noise, QubitState prepared,
                                      std::uint64_t index) const {
  noise.validate();
  auto rng = shot_stream(noise.rng_seed, index);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  ShotRecord rec;
  rec.index = index;
  rec.prepared = prepared;
  const bool wrong = uniform(rng) < noise.preparation_error;
  rec.initial = wrong ? flipped(prepared) : prepared;
  if (wrong && noise.heralding) {
    rec.discarded = true;
    return rec;
  }

  QubitState s = rec.initial;
  double t = 0.0;
  for (;;) {
    const double rate = s == QubitState::e ? noise.Gamma_down : noise.Gamma_up;
    if (!(rate > 0.0)) break;
    t += std::exponential_distribution<double>(rate)(rng);
    if (t >= pulse_.duration) break;
    rec.jump_times.push_back(t);
    s = flipped(s);
  }

  if (rec.jump_times.empty()) return finish(reference(rec.initial), std::move(rec), noise, index);
  const Trajectory traj =
      integrate_with_jumps(sys_, rec.initial, rec.jump_times, protocol_, {}, integrator_);
  return finish(traj, std::move(rec), noise, index);
}

ShotRecord ReadoutSimulator::simulate_forced(const NoiseModel& noise, QubitState prepared,
                                             std::span<const double> jump_times,
                                             std::uint64_t index) const {
  noise.validate();
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    if (!(jump_times[i] > 0.0 && jump_times[i] < pulse_.duration))
      throw ParameterError("jump times must lie inside the pulse");
    if (i > 0 && !(jump_times[i] > jump_times[i - 1]))
      throw ParameterError("jump times must be strictly increasing");
  }
  ShotRecord rec;
  rec.index = index;
  rec.prepared = prepared;
  rec.initial = prepared;
  rec.jump_times.assign(jump_times.begin(), jump_times.end());
  if (rec.jump_times.empty()) return finish(reference(prepared), std::move(rec), noise, index);
  const Trajectory traj =
      integrate_with_jumps(sys_, prepared, rec.jump_times, protocol_, {}, integrator_);
  return finish(traj, std::move(rec), noise, index);
}

std::vector<ShotRecord> ReadoutSimulator::run(const NoiseModel& noise, std::size_t shots,
                                              unsigned threads) const {
  std::vector<ShotRecord> out(shots);
  parallel_for(shots, threads, [&](std::size_t i) {
    out[i] = simulate(noise, i % 2 == 0 ? QubitState::g : QubitState::e, i);
  });
  return out;
}

ShotRecord simulate_shot(const SystemParams& sys, const NoiseModel& noise,
                         const ReadoutPulse& pulse, QubitState prepared, std::uint64_t index) {
  return ReadoutSimulator(sys, pulse).simulate(noise, prepared, index);
}

double IqProjection::operator()(cplx iq) const {
  return ((iq - origin) * std::conj(direction)).real();
}

IqProjection IqProjection::from_centers(cplx center_g, cplx center_e) {
  IqProjection p;
  p.origin = center_g;
  const cplx d = center_e - center_g;
  p.separation = std::abs(d);
  if (p.separation > 0.0) p.direction = d / p.separation;
  return p;
}

IqProjection cluster_projection(std::span<const ShotRecord> shots) {
  std::array<cplx, 2> clean_sum{}, all_sum{};
  std::array<std::size_t, 2> clean_n{}, all_n{};
  for (const auto& s : shots) {
    if (s.discarded) continue;
    const std::size_t k = slot(s.prepared);
    all_sum[k] += s.noiseless_iq;
    ++all_n[k];
    if (s.initial == s.prepared && s.jump_times.empty()) {
      clean_sum[k] += s.noiseless_iq;
      ++clean_n[k];
    }
  }
  std::array<cplx, 2> center{};
  for (std::size_t k = 0; k < 2; ++k) {
    if (clean_n[k] > 0) {
      center[k] = clean_sum[k] / static_cast<double>(clean_n[k]);
    } else if (all_n[k] > 0) {
      center[k] = all_sum[k] / static_cast<double>(all_n[k]);
    }
  }
  return IqProjection::from_centers(center[0], center[1]);
}

namespace {

struct Labeled {
  double x;
  std::size_t prep;
};

std::pair<std::vector<Labeled>, std::array<std::size_t, 2>> project(
    std::span<const ShotRecord> shots, const IqProjection& projection) {
  std::vector<Labeled> v;
  std::array<std::size_t, 2> n{};
  for (const auto& s : shots) {
    if (s.discarded) continue;
    v.push_back({projection(s.integrated_iq), slot(s.prepared)});
    ++n[slot(s.prepared)];
  }
  if (n[0] == 0 || n[1] == 0)
    throw ParameterError("fidelity needs shots from both preparations");
  return {std::move(v), n};
}

}  // namespace

double threshold_optimize(std::span<const ShotRecord> shots, const IqProjection& projection) {
  auto [v, n] = project(shots, projection);
  std::sort(v.begin(), v.end(), [](const Labeled& a, const Labeled& b) { return a.x < b.x; });

  // Threshold t assigns e to x > t. Below every sample all shots read e.
  std::size_t g_below = 0, e_below = 0;
  auto fidelity = [&] {
    const double p_eg = static_cast<double>(n[0] - g_below) / static_cast<double>(n[0]);
    const double p_ge = static_cast<double>(e_below) / static_cast<double>(n[1]);
    return 1.0 - 0.5 * (p_eg + p_ge);
  };
  const double mid = 0.5 * projection.separation;
  double best_t = v.front().x - 1.0;
  double best_f = fidelity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    (v[i].prep == 0 ? g_below : e_below) += 1;
    if (i + 1 < v.size() && v[i + 1].x == v[i].x) continue;
    const double t = i + 1 < v.size() ? 0.5 * (v[i].x + v[i + 1].x) : v[i].x + 1.0;
    const double f = fidelity();
    if (f > best_f || (f == best_f && std::abs(t - mid) < std::abs(best_t - mid))) {
      best_f = f;
      best_t = t;
    }
  }
  return best_t;
}

double threshold_optimize(std::span<const ShotRecord> shots) {
  return threshold_optimize(shots, cluster_projection(shots));
}

FidelityReport fidelity_report(std::span<const ShotRecord> shots, std::optional<double> threshold,
                               double sigma_det) {
  FidelityReport r;
  r.projection = cluster_projection(shots);
  const auto [v, n] = project(shots, r.projection);
  r.threshold = threshold ? *threshold : threshold_optimize(shots, r.projection);
  for (const auto& s : v) ++r.counts[s.prep][s.x > r.threshold ? 1 : 0];

  r.P_e_given_g = static_cast<double>(r.counts[0][1]) / static_cast<double>(n[0]);
  r.P_g_given_e = static_cast<double>(r.counts[1][0]) / static_cast<double>(n[1]);
  r.F_RO = 1.0 - 0.5 * (r.P_e_given_g + r.P_g_given_e);
  r.contrast = 1.0 - r.P_e_given_g - r.P_g_given_e;
  r.sigma_det = sigma_det;
  if (sigma_det > 0.0) {
    const boost::math::normal unit;
    r.overlap_error = boost::math::cdf(unit, -r.projection.separation / (2.0 * sigma_det));
  }

  std::size_t wrong = 0, kept = 0, early = 0, kept_e = 0;
  for (const auto& s : shots) {
    if (s.discarded) {
      ++r.discarded;
      continue;
    }
    ++kept;
    if (s.initial != s.prepared) ++wrong;
    if (s.prepared == QubitState::e) {
      ++kept_e;
      if (s.initial == QubitState::e && !s.jump_times.empty() &&
          (!s.bifurcation_time || s.jump_times.front() < *s.bifurcation_time))
        ++early;
    }
  }
  r.preparation_error = static_cast<double>(wrong) / static_cast<double>(kept);
  r.pre_bifurcation_error = static_cast<double>(early) / static_cast<double>(kept_e);
  return r;
}

void assign_shots(std::span<ShotRecord> shots, const FidelityReport& report) {
  for (auto& s : shots) {
    if (s.discarded) {
      s.assigned.reset();
      continue;
    }
    s.assigned = report.projection(s.integrated_iq) > report.threshold ? QubitState::e
                                                                       : QubitState::g;
  }
}

std::pair<double, double> error_budget(const SystemParams& sys, double t_int, double t_b) {
  if (!(sys.T1 > 0.0)) throw ParameterError("T1 must be positive");
  if (!(t_int >= 0.0 && t_b >= 0.0 && t_b <= t_int))
    throw ParameterError("error_budget requires 0 <= t_b <= t_int");
  return {-std::expm1(-t_int / (2.0 * sys.T1)), -std::expm1(-t_b / (2.0 * sys.T1))};
}

double calibrate_sigma_det(double separation, double overlap_error) {
  if (!(overlap_error > 0.0 && overlap_error < 0.5))
    throw ParameterError("overlap_error must lie in (0, 0.5)");
  if (!(separation > 0.0)) throw ParameterError("cluster separation must be positive");
  const boost::math::normal unit;
  return separation / (2.0 * boost::math::quantile(unit, 1.0 - overlap_error));
}

std::size_t FidelityMap::argmax() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < reports.size(); ++k)
    if (reports[k].F_RO > reports[best].F_RO) best = k;
  return best;
}

FidelityMap fidelity_map(const SystemParams& sys, const NoiseModel& noise,
                         std::span<const double> omega_grid,
                         std::span<const double> amplitude_grid, std::size_t shots_per_point,
                         const FidelityMapSettings& settings) {
  if (omega_grid.empty() || amplitude_grid.empty())
    throw ParameterError("fidelity_map: empty grid");
  if (shots_per_point < 100) throw ParameterError("fidelity_map needs at least 100 shots per point");
  noise.validate();

  FidelityMap map;
  map.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  map.amplitude_grid.assign(amplitude_grid.begin(), amplitude_grid.end());
  if (settings.column_scale.empty()) {
    map.column_scale.assign(omega_grid.size(), 1.0);
  } else if (settings.column_scale.size() == omega_grid.size()) {
    map.column_scale = settings.column_scale;
  } else {
    throw ParameterError("fidelity_map: column_scale must match the frequency grid");
  }
  map.reports.resize(omega_grid.size() * amplitude_grid.size());

  for (std::size_t iw = 0; iw < omega_grid.size(); ++iw) {
    for (std::size_t ia = 0; ia < amplitude_grid.size(); ++ia) {
      ReadoutPulse pulse = settings.pulse;
      pulse.omega_d = omega_grid[iw];
      pulse.amplitude = map.amplitude(iw, ia);
      try {
        const ReadoutSimulator sim(sys, pulse, settings.integrator);
        const auto shots = sim.run(noise, shots_per_point, settings.threads);
        map.reports[map.index(iw, ia)] = fidelity_report(shots, std::nullopt, noise.sigma_det);
      } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " at omega_d/2pi = " +
                          std::to_string(units::ordinary(pulse.omega_d)) + " Hz, Omega/2pi = " +
                          std::to_string(units::ordinary(pulse.amplitude)) + " Hz");
      }
    }
  }
  return map;
}

}  // namespace polariton
