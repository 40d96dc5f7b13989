#include "bvx/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bvx/error.hpp"
#include "bvx/snapshot.hpp"
#include "strings.hpp"

namespace bvx {

namespace {

using detail::fmt17;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

const char* kOseenTrack = R"(experiment = oseen_track
formulation = background_perturbation
grid.L = 40
grid.N = 256
grid.Nv = 4
physics.Gamma = 5
physics.Omega = 1
init.type = vortex
init.A = 1
init.B1 = 1
time.T = 10
output.cadence = 0.05
)";

const char* kOscillator = R"(experiment = oscillator
formulation = full
grid.L = 40
grid.N = 256
grid.Nv = 4
physics.Gamma = 5
physics.Omega = 1
init.type = vortex
init.A = 0
init.B1 = 1
init.B2 = 0
time.T = 10
output.cadence = 0.05
)";

const char* kPerturbedRates = R"(experiment = perturbed_vortex_rates
formulation = background_perturbation
grid.L = 40
grid.N = 256
grid.Nv = 4
physics.Gamma = 1
physics.Omega = 1
init.type = vortex_plus_perturbation
init.A = 2
init.perturbation = dipole
init.perturbation_amplitude = 0.1
time.T = 20
output.cadence = 0.1
analysis.fits = pert_omega3_L2:algebraic, pert_omega3_L1:algebraic
)";

const char* kBaroclinicDecay = R"(experiment = baroclinic_decay
formulation = full
grid.L = 20
grid.N = 128
grid.Nv = 8
physics.Gamma = 1
physics.Omega = 1
init.type = random_baroclinic
init.seed = 7
init.k_min = 0
init.k_max = 8
init.amplitude = 1
time.T = 4
time.linear_only = true
output.cadence = 0.02
analysis.fits = vt_L2:exponential
)";

const char* kSingleMode = R"(experiment = single_mode_linear
formulation = full
grid.L = 6.2831853071795862
grid.N = 16
grid.Nv = 8
physics.Gamma = 2
physics.Omega = 3
init.type = single_mode
init.mode = 2, 1, 1
init.branch = +
init.amplitude = 1
time.T = 1
time.linear_only = true
output.cadence = 0.01
analysis.fits = vt_L2:exponential
)";

const char* kDispersive = R"(experiment = dispersive_sweep
formulation = full
grid.L = 40
grid.N = 256
grid.Nv = 16
physics.Gamma = 1
physics.Omega = 10
init.type = wave_packet
init.sigma = 0.3
init.vertical_mode = 1
init.R = 8
time.T = 0.2
sweep.Omegas = 10, 30, 100, 300, 1000
sweep.horizons = 0.1, 0.2
sweep.dt = 0.0005
sweep.R = 8
)";

const char* kGlobalQG = R"(experiment = global_small_qg
formulation = background_perturbation
grid.L = 40
grid.N = 128
grid.Nv = 8
physics.Gamma = 1
physics.Omega = 300
init.type = random_baroclinic
init.A = 1
init.seed = 11
init.k_min = 0
init.k_max = 8
init.amplitude = 1
init.remove_geostrophic = true
init.barotropic_amplitude = 0.1
time.T = 20
time.dt = 0.02
output.cadence = 0.1
)";

struct PresetText {
  const char* name;
  const char* summary;
  const char* text;
};

const std::vector<PresetText>& presets() {
  static const std::vector<PresetText> p = {
      {"oseen_track", "background-mode Oseen vortex with (B1, B2) = (1, 0), Gamma = 5: tracking error", kOseenTrack},
      {"oscillator", "full-field vortex family A = 0, B1 = 1, Gamma = 5: frequency, envelope, phase offset",
       kOscillator},
      {"perturbed_vortex_rates", "Oseen vortex A = 2 plus a 10% dipole: algebraic decay of the perturbation",
       kPerturbedRates},
      {"baroclinic_decay", "linear random baroclinic band data: exponential decay rate", kBaroclinicDecay},
      {"single_mode_linear", "one a_+ eigenmode under the exact propagator", kSingleMode},
      {"dispersive_sweep", "wave packet, I(Omega) = int |lambda|_inf dt over Omega = 10..1000", kDispersive},
      {"global_small_qg", "O(1) ageostrophic data plus barotropic perturbation at Omega = 300", kGlobalQG},
  };
  return p;
}

Check make_check(const std::string& name, double value, double lo, double hi) {
  return {name, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi};
}

double max_of(const std::vector<double>& v, std::size_t from = 0) {
  double m = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) m = std::max(m, v[i]);
  return m;
}

FitRow decay_row(const std::string& series, const DecayFit& f) {
  return {series,
          f.model == DecayModel::algebraic ? "algebraic" : "exponential",
          f.exponent,
          f.amplitude,
          f.rms_residual,
          f.t0,
          f.t1,
          std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN()};
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

SpectralField plane_vorticity(const SpectralField& v) {
  const SpectralField bar = extract_plane(v);
  SpectralField uh(v.grid_ptr(), 2, Layout::plane);
  std::copy(bar.component(0).begin(), bar.component(0).end(), uh.component(0).begin());
  std::copy(bar.component(1).begin(), bar.component(1).end(), uh.component(1).begin());
  return curl2(uh);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + p.string());
}

std::string fits_csv(const std::vector<FitRow>& fits) {
  std::ostringstream o;
  o << "series,model,exponent,amplitude,residual,window_t0,window_t1,omega,phase\n";
  for (const auto& f : fits) {
    o << f.series << "," << f.model << "," << fmt17(f.exponent) << "," << fmt17(f.amplitude) << ","
      << fmt17(f.residual) << "," << fmt17(f.t0) << "," << fmt17(f.t1) << ",";
    if (std::isfinite(f.omega)) o << fmt17(f.omega);
    o << ",";
    if (std::isfinite(f.phase)) o << fmt17(f.phase);
    o << "\n";
  }
  return o.str();
}

std::string checks_csv(const std::vector<Check>& checks) {
  std::ostringstream o;
  o << "check,value,lo,hi,pass\n";
  for (const auto& c : checks)
    o << c.name << "," << fmt17(c.value) << "," << fmt17(c.lo) << "," << fmt17(c.hi) << ","
      << (c.pass ? "true" : "false") << "\n";
  return o.str();
}

std::string sweep_csv(const SweepResult& s, const SweepResult* keep) {
  std::ostringstream o;
  o << "Omega,eta";
  for (double T : s.horizons) o << ",I_T" << fmt17(T);
  if (keep)
    for (double T : keep->horizons) o << ",I_keepS_T" << fmt17(T);
  o << "\n";
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    o << fmt17(s.rows[i].Omega) << "," << fmt17(s.rows[i].eta);
    for (double I : s.rows[i].I) o << "," << fmt17(I);
    if (keep)
      for (double I : keep->rows[i].I) o << "," << fmt17(I);
    o << "\n";
  }
  return o.str();
}

void say(const RunOptions& opt, const std::string& msg) {
  if (opt.progress) *opt.progress << msg << std::endl;
}

// -- preset analyses ---------------------------------------------------------

void analyze_sweep(ExperimentResult& r) {
  const SweepResult& s = *r.sweep;
  const SweepResult& k = *r.sweep_keep_geostrophic;
  double worst = 0.0;
  for (std::size_t i = 1; i < s.rows.size(); ++i)
    worst = std::max(worst, s.rows[i].I.back() / s.rows[i - 1].I.back());
  r.checks.push_back(make_check("I_step_ratio_max", worst, 0.0, 1.02));
  r.checks.push_back(make_check("loglog_slope", s.slope, -0.40, -0.10));
  double floor = kInf;
  for (const auto& row : k.rows) floor = std::min(floor, row.I.back() / k.rows.front().I.back());
  r.checks.push_back(make_check("keepS_floor_ratio_min", floor, 0.8, kInf));
  r.fits.push_back({"I", "loglog", s.slope, 0.0, 0.0, s.eta_lo, s.eta_hi, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()});
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = [] {
    std::vector<CatalogEntry> out;
    for (const auto& p : presets()) out.push_back({p.name, p.summary});
    return out;
  }();
  return c;
}

Scenario preset(const std::string& name) {
  for (const auto& p : presets())
    if (name == p.name) return parse_scenario(p.text);
  std::string all;
  for (const auto& p : presets()) all += std::string(all.empty() ? "" : ", ") + p.name;
  throw Error(ErrorKind::unknown_experiment, "unknown experiment '" + name + "'; catalog: " + all);
}

bool ExperimentResult::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* ExperimentResult::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double slowest_decay_rate(const SpectralField& v, const PhysParams& params) {
  const SpectralField vt = baroclinic_part(v);
  const double tol = 1e-12 * vt.max_abs();
  double best = kInf;
  for_each_mode(vt.grid(), vt.nz(), [&](std::size_t idx, int, int, int, const Wavevector& k) {
    for (int c = 0; c < vt.ncomp(); ++c)
      if (std::abs(vt.component(c)[idx]) > tol) {
        best = std::min(best, params.nu * k.norm2());
        break;
      }
  });
  return best;
}

std::pair<double, double> qg_distance(const SimState& s) {
  const SpectralField w = plane_vorticity(s.v);
  const ScaledSnapshot sc = to_scaled(w, s.t, Amplitude::vorticity);
  // The perturbation fills the box, so the tail guard is disabled and the
  // tail fraction is reported alongside.
  const HermiteProjection hp = hermite_projection(sc.values, 0, 1.0);
  return {weighted_norm(hp.Qn, 0.0, 1.0), hp.tail_fraction};
}

std::string series_csv(const Trajectory& traj, const std::vector<std::string>& names) {
  std::ostringstream o;
  o << "t,tau";
  for (const auto& n : names) o << "," << n;
  o << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    o << fmt17(traj.times[i]) << "," << fmt17(std::log1p(traj.times[i]));
    for (const auto& n : names) {
      const auto it = traj.series.find(n);
      if (it == traj.series.end())
        throw Error(ErrorKind::validation_error, "unknown series '" + n + "' in output.series");
      o << "," << fmt17(it->second.at(i));
    }
    o << "\n";
  }
  return o.str();
}

ExperimentResult run_experiment(const std::string& name, const RunOptions& opt) {
  return run_experiment(preset(name), opt);
}

ExperimentResult run_experiment(Scenario sc, const RunOptions& opt) {
  if (opt.seed) sc.init.seed = *opt.seed;
  if (!opt.out_dir.empty()) sc.output.directory = opt.out_dir;
  validate_scenario(sc);
  const auto wall0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.scenario = sc;
  const std::string& ex = sc.experiment;
  const std::filesystem::path dir = sc.output.directory;
  if (!dir.empty()) std::filesystem::create_directories(dir);
  for (const auto& w : sc.warnings) say(opt, "warning: " + w);

  const GridPtr grid = make_grid(sc.grid);
  SimState st = initial_state(sc, grid);

  if (ex == "dispersive_sweep") {
    say(opt, "dispersive sweep over " + std::to_string(sc.sweep.Omegas.size()) + " rotation rates");
    res.sweep = dispersive_sweep(st.v, sc.physics, sc.sweep.Omegas, sc.sweep.R, sc.sweep.horizons, sc.sweep.dt,
                                 !sc.sweep.keep_geostrophic, opt.threads);
    res.sweep_keep_geostrophic =
        dispersive_sweep(st.v, sc.physics, sc.sweep.Omegas, sc.sweep.R, sc.sweep.horizons, sc.sweep.dt, false,
                         opt.threads);
    analyze_sweep(res);
  } else {
    // Experiment-specific series evaluated at every sample.
    std::map<std::string, std::vector<double>> extra;
    const SpectralField v0 = st.v;
    const double v0_norm = l2_norm(v0);
    Wavevector k_mode{};
    double p_mode = 0.0;
    if (ex == "single_mode_linear") {
      const auto& m = sc.init.mode;
      k_mode = {grid->dk() * m[0], grid->dk() * m[1], grid->dkz() * m[2]};
      p_mode = mode_frame(k_mode, sc.physics, grid->bc()).p_eta;
    }
    int snap = 0;
    RunControl ctl;
    ctl.T = sc.time.T;
    ctl.output_interval = sc.cadence();
    ctl.lambda_R = sc.split_R;
    ctl.observer = [&](const SimState& s) {
      if (ex == "oseen_track") {
        const SpectralField ref = sample_vortex(s.v.grid_ptr(), s.background, s.t, false);
        extra["track_err"].push_back(l2_norm(s.v) / l2_norm(ref));
      } else if (ex == "oscillator") {
        const VortexParams vp{sc.init.A, sc.init.B1, sc.init.B2, sc.physics.Gamma};
        const SpectralField ref = sample_vortex(s.v.grid_ptr(), vp, s.t, true);
        extra["track_err"].push_back(l2_norm(s.v - ref) / l2_norm(ref));
      } else if (ex == "single_mode_linear") {
        const cplx f = std::exp(cplx(-sc.physics.nu * k_mode.norm2(), sc.physics.Gamma * p_mode) * s.t);
        SpectralField ref = v0;
        for (auto& c : ref.data()) c *= f;
        extra["mode_err"].push_back(l2_norm(s.v - ref) / (std::abs(f) * v0_norm));
      } else if (ex == "global_small_qg") {
        const auto [d, tail] = qg_distance(s);
        extra["qg_distance"].push_back(d);
        extra["qg_tail_fraction"].push_back(tail);
      }
      if (sc.output.snapshots && !dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%05d.bvxl", snap++);
        save_snapshot(s, (dir / name).string());
      }
    };
    StepperConfig cfg;
    cfg.dt = sc.time.dt;
    cfg.cfl_target = sc.time.cfl;
    cfg.linear_only = sc.time.linear_only;
    say(opt, "integrating " + ex + " to T = " + fmt17(sc.time.T));
    res.traj = integrate(st, cfg, ctl);
    for (auto& [k, v] : extra) res.traj.series[k] = std::move(v);
    const Trajectory& tr = res.traj;
    for (const auto& n : sc.output.series)
      if (!tr.series.count(n)) throw Error(ErrorKind::validation_error, "unknown series '" + n + "' in output.series");
    for (const auto& f : sc.fits)
      if (!tr.series.count(f.series))
        throw Error(ErrorKind::validation_error, "unknown series '" + f.series + "' in analysis.fits");

    for (const auto& f : sc.fits) {
      const TimeSeries ts = series(tr, f.series);
      std::optional<Window> w;
      if (f.t0 >= 0.0) w = Window{f.t0, f.t1};
      res.fits.push_back(decay_row(f.series, fit_decay(ts, f.model, w)));
    }

    if (ex == "oseen_track" || ex == "oscillator") {
      res.checks.push_back(make_check("track_err_max", max_of(tr.series.at("track_err")), 0.0, 1e-5));
    }
    if (ex == "oscillator") {
      const OscillationFit fu = fit_oscillation(series(tr, "u3_origin"));
      const OscillationFit ft = fit_oscillation(series(tr, "theta_origin"));
      res.fits.push_back({"u3_origin", "oscillation", fu.envelope_exponent, fu.amplitude, fu.rms_residual,
                          tr.times.front(), tr.times.back(), fu.omega, fu.phase});
      res.fits.push_back({"theta_origin", "oscillation", ft.envelope_exponent, ft.amplitude, ft.rms_residual,
                          tr.times.front(), tr.times.back(), ft.omega, ft.phase});
      const double G = sc.physics.Gamma;
      res.checks.push_back(make_check("u3_frequency_rel_err", std::abs(fu.omega / G - 1.0), 0.0, 1e-3));
      res.checks.push_back(make_check("u3_envelope_exponent", fu.envelope_exponent, -1.05, -0.95));
      res.checks.push_back(make_check("u3_theta_phase_offset", wrap_angle(fu.phase - ft.phase), kPi / 2 - 0.01,
                                      kPi / 2 + 0.01));
    }
    if (ex == "perturbed_vortex_rates")
      res.checks.push_back(make_check("pert_omega3_L2_exponent", res.fits.front().exponent, -kInf, -0.95));
    if (ex == "baroclinic_decay") {
      const double target = slowest_decay_rate(v0, sc.physics);
      const double mu = res.fits.front().exponent;
      if (sc.time.linear_only)
        res.checks.push_back(make_check("mu_rel_err", std::abs(mu / target - 1.0), 0.0, 0.02));
      else
        res.checks.push_back(make_check("mu_over_4pi2", mu / (4.0 * kPi * kPi), 0.5, kInf));
    }
    if (ex == "single_mode_linear")
      res.checks.push_back(make_check("mode_err_max", max_of(tr.series.at("mode_err")), 0.0, 1e-10));
    if (ex == "global_small_qg") {
      const auto& S = tr.series.at("S_L2");
      const auto& vt = tr.series.at("vt_L2");
      res.checks.push_back(make_check("S_fraction_t0", S.front() / vt.front(), 0.0, 1e-3));
      double worst_rise = 0.0;
      const auto& h1 = tr.series.at("vt_H1");
      std::size_t i1 = 0;
      while (i1 < tr.times.size() && tr.times[i1] < 1.0 - 1e-9) ++i1;
      for (std::size_t i = i1 + 1; i < h1.size(); ++i)
        if (h1[i - 1] > 0.0) worst_rise = std::max(worst_rise, h1[i] / h1[i - 1] - 1.0);
      res.checks.push_back(make_check("vt_H1_max_rise_after_t1", worst_rise, -kInf, 0.0));
      const auto& d = tr.series.at("qg_distance");
      res.checks.push_back(make_check("qg_distance_ratio_t1_to_T", d.back() / d.at(i1), 0.0, 0.5));
      res.checks.push_back(make_check("qg_tail_fraction_max", max_of(tr.series.at("qg_tail_fraction")), 0.0, 1.0));
    }
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  if (!dir.empty()) {
    if (res.sweep) {
      write_file(dir / "sweep.csv", sweep_csv(*res.sweep, &*res.sweep_keep_geostrophic));
    } else {
      std::vector<std::string> names = sc.output.series;
      if (names.empty())
        for (const auto& [k, v] : res.traj.series) names.push_back(k);
      write_file(dir / "series.csv", series_csv(res.traj, names));
    }
    write_file(dir / "fits.csv", fits_csv(res.fits));
    write_file(dir / "checks.csv", checks_csv(res.checks));
    std::ostringstream log;
    log << "# scenario\n" << to_text(sc) << "\n";
    for (const auto& w : sc.warnings) log << "warning: " << w << "\n";
    if (!res.sweep) log << "dt = " << fmt17(res.traj.dt) << "\nsteps = " << res.traj.steps << "\n";
    for (const auto& c : res.checks)
      log << "check " << c.name << " = " << fmt17(c.value) << " [" << fmt17(c.lo) << ", " << fmt17(c.hi) << "] "
          << (c.pass ? "pass" : "FAIL") << "\n";
    log << "wall_seconds = " << res.wall_seconds << "\n";
    write_file(dir / "run.log", log.str());
  }
  return res;
}

}  // namespace bvx
