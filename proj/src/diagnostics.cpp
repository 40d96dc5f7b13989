#include "bvx/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "bvx/error.hpp"

namespace bvx {

void TimeSeries::validate() const {
  if (t.size() != v.size()) throw Error(ErrorKind::invalid_spec, "time series '" + name + "': length mismatch");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(v[i]))
      throw Error(ErrorKind::invalid_spec, "time series '" + name + "': non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw Error(ErrorKind::invalid_spec, "time series '" + name + "': times not strictly increasing");
  }
}

Window default_window(const TimeSeries& ts) {
  if (ts.t.empty()) throw Error(ErrorKind::insufficient_samples, "empty time series");
  const double tau0 = std::log1p(ts.t.front());
  const double tau1 = std::log1p(ts.t.back());
  return {std::expm1(0.5 * (tau0 + tau1)), ts.t.back()};
}

DecayFit fit_decay(const TimeSeries& ts, DecayModel model, std::optional<Window> window) {
  ts.validate();
  const Window w = window ? *window : default_window(ts);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts.t[i] < w.t0 - 1e-12 || ts.t[i] > w.t1 + 1e-12) continue;
    if (!(ts.v[i] > 0.0))
      throw Error(ErrorKind::nonpositive_values, "series '" + ts.name + "' has nonpositive values in the fit window");
    x.push_back(model == DecayModel::algebraic ? std::log1p(ts.t[i]) : ts.t[i]);
    y.push_back(std::log(ts.v[i]));
  }
  if (x.size() < 4) throw Error(ErrorKind::insufficient_samples, "fewer than 4 samples in the fit window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::insufficient_samples, "degenerate fit window");
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (icpt + slope * x[i]);
    rss += r * r;
  }
  DecayFit f;
  f.model = model;
  f.exponent = model == DecayModel::algebraic ? slope : -slope;
  f.amplitude = std::exp(icpt);
  f.t0 = w.t0;
  f.t1 = w.t1;
  f.rms_residual = std::sqrt(rss / n);
  f.samples = x.size();
  return f;
}

namespace {

struct OscModel {
  const std::vector<double>& t;
  const std::vector<double>& v;
  std::vector<double> logt;

  // Residual and amplitudes for fixed (omega, p).
  double residual(double omega, double p, double* a_out = nullptr, double* b_out = nullptr) const {
    double cc = 0.0, cs = 0.0, ss = 0.0, vc = 0.0, vs = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double env = std::exp(p * logt[i]);
      const double c = env * std::cos(omega * t[i]);
      const double s = env * std::sin(omega * t[i]);
      cc += c * c;
      cs += c * s;
      ss += s * s;
      vc += v[i] * c;
      vs += v[i] * s;
      vv += v[i] * v[i];
    }
    const double det = cc * ss - cs * cs;
    double a = 0.0, b = 0.0;
    if (std::abs(det) > 1e-300) {
      a = (vc * ss - vs * cs) / det;
      b = (vs * cc - vc * cs) / det;
    } else if (cc > 0.0) {
      a = vc / cc;
    }
    if (a_out) *a_out = a;
    if (b_out) *b_out = b;
    // |v - a c - b s|^2 expanded
    return std::max(0.0, vv - 2.0 * (a * vc + b * vs) + a * a * cc + 2.0 * a * b * cs + b * b * ss);
  }

  template <class F>
  static double golden(F&& f, double lo, double hi, int iters, double* fmin) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int k = 0; k < iters; ++k) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = f(x2);
      }
    }
    const double x = f1 < f2 ? x1 : x2;
    if (fmin) *fmin = std::min(f1, f2);
    return x;
  }

  double best_p(double omega, double* res) const {
    return golden([&](double p) { return residual(omega, p); }, -6.0, 6.0, 70, res);
  }
};

}  // namespace

OscillationFit fit_oscillation(const TimeSeries& ts) {
  ts.validate();
  const std::size_t n = ts.size();
  if (n < 8) throw Error(ErrorKind::undersampled, "fewer than 8 samples");
  OscModel m{ts.t, ts.v, {}};
  m.logt.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.logt[i] = std::log1p(ts.t[i]);

  const double span = ts.t.back() - ts.t.front();
  const double dt = span / static_cast<double>(n - 1);
  const double two_pi = 2.0 * std::numbers::pi;
  const double w_lo = 0.5 * two_pi / span;
  const double w_hi = two_pi / (8.0 * dt);
  const int scan = std::max(200, static_cast<int>(std::ceil(8.0 * (w_hi - w_lo) * span / two_pi)) + 50);
  std::vector<double> res(scan + 1);
  int best = 0;
  for (int q = 0; q <= scan; ++q) {
    const double w = w_lo + (w_hi - w_lo) * q / scan;
    m.best_p(w, &res[q]);
    if (res[q] < res[best]) best = q;
  }
  const double step = (w_hi - w_lo) / scan;
  const double lo = w_lo + step * std::max(0, best - 1);
  const double hi = w_lo + step * std::min(scan, best + 1);
  double rmin = 0.0;
  const double omega = OscModel::golden(
      [&](double w) {
        double r;
        m.best_p(w, &r);
        return r;
      },
      lo, hi, 80, &rmin);
  double r = 0.0;
  const double p = m.best_p(omega, &r);
  double a = 0.0, b = 0.0;
  m.residual(omega, p, &a, &b);

  OscillationFit f;
  f.omega = omega;
  f.envelope_exponent = p;
  f.phase = std::atan2(b, a);
  f.amplitude = std::hypot(a, b);
  f.rms_residual = std::sqrt(r / static_cast<double>(n));
  if (best == scan) throw Error(ErrorKind::undersampled, "oscillation faster than 8 samples per period");
  double vmax = 0.0;
  for (double x : ts.v) vmax = std::max(vmax, std::abs(x));
  f.degenerate = best == 0 || omega * span < two_pi || f.amplitude <= 1e-14 * vmax;
  return f;
}

Functionals functionals(const SimState& s, const SpectralField* r) {
  const Grid& g = s.v.grid();
  const SpectralField bar = extract_plane(s.v);
  SpectralField uh(s.v.grid_ptr(), 2, Layout::plane);
  std::copy(bar.component(0).begin(), bar.component(0).end(), uh.component(0).begin());
  std::copy(bar.component(1).begin(), bar.component(1).end(), uh.component(1).begin());
  PhysicalField wp = to_physical(curl2(uh));
  if (s.formulation == Formulation::background_perturbation) {
    for (int j2 = 0; j2 < g.n(); ++j2)
      for (int j1 = 0; j1 < g.n(); ++j1)
        wp.at(0, 0, j2, j1) += vortex_solution(s.background, s.t, g.x(j1), g.x(j2)).omega3;
  }
  Functionals f;
  f.omega3_L1 = weighted_norm(wp, 0.0, 1.0);
  const double l2 = weighted_norm(wp, 0.0, 2.0);
  f.omega3_L2sq = l2 * l2;
  f.vt_H1 = h1_norm(baroclinic_part(s.v));
  if (r) {
    f.grad_r_L2sq = gradient_norm2(*r);
    f.Psi = f.omega3_L1 + f.omega3_L2sq + f.grad_r_L2sq;
  } else {
    f.grad_r_L2sq = f.Psi = std::numeric_limits<double>::quiet_NaN();
  }
  return f;
}

std::vector<TimeSeries> energy_functionals(const Trajectory& traj) {
  if (traj.remainders.size() != traj.snapshots.size() || traj.snapshots.empty())
    throw Error(ErrorKind::missing_split, "trajectory carries no lambda/r split");
  std::vector<TimeSeries> out(5);
  const char* names[5] = {"omega3_L1", "omega3_L2sq", "grad_r_L2sq", "Psi", "vt_H1"};
  for (int i = 0; i < 5; ++i) out[i].name = names[i];
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Functionals f = functionals(traj.snapshots[k], &traj.remainders[k]);
    const double vals[5] = {f.omega3_L1, f.omega3_L2sq, f.grad_r_L2sq, f.Psi, f.vt_H1};
    for (int i = 0; i < 5; ++i) {
      out[i].t.push_back(traj.snapshots[k].t);
      out[i].v.push_back(vals[i]);
    }
  }
  return out;
}

std::pair<TimeSeries, TimeSeries> geostrophic_norms(const Trajectory& traj, const PhysParams& params) {
  TimeSeries s{"S_L2", {}, {}}, a{"ageo_L2", {}, {}};
  if (traj.snapshots.empty()) {
    if (!traj.series.count("S_L2")) throw Error(ErrorKind::missing_split, "no snapshots or geostrophic series");
    s.t = a.t = traj.times;
    s.v = traj.series.at("S_L2");
    a.v = traj.series.at("ageo_L2");
    return {s, a};
  }
  for (const SimState& st : traj.snapshots) {
    const SpectralField vt = baroclinic_part(st.v);
    const SpectralField sv = geostrophic_project(vt, params);
    s.t.push_back(st.t);
    a.t.push_back(st.t);
    s.v.push_back(l2_norm(sv));
    a.v.push_back(l2_norm(vt - sv));
  }
  return {s, a};
}

TimeSeries series(const Trajectory& traj, const std::string& name) {
  auto it = traj.series.find(name);
  if (it == traj.series.end()) throw Error(ErrorKind::invalid_spec, "trajectory has no series '" + name + "'");
  return {name, traj.times, it->second};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::insufficient_samples, "slope needs at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::nonpositive_values, "log-log slope of nonpositive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]) - mx;
    sxx += a * a;
    sxy += a * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

SweepResult dispersive_sweep(const SpectralField& v0, const PhysParams& base, const std::vector<double>& Omegas,
                             double R, const std::vector<double>& horizons, double dt, bool remove_geostrophic,
                             int threads) {
  if (Omegas.empty() || horizons.empty()) throw Error(ErrorKind::invalid_spec, "sweep needs Omegas and horizons");
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_spec, "sweep dt must be positive");
  if (!std::is_sorted(horizons.begin(), horizons.end()))
    throw Error(ErrorKind::invalid_spec, "sweep horizons must be increasing");
  const SpectralField bar = extract_plane(v0);
  if (bar.max_abs() > 1e-12 * std::max(1.0, v0.max_abs()))
    throw Error(ErrorKind::nonzero_barotropic, "sweep data must be purely baroclinic");
  std::vector<long> marks;
  for (double T : horizons) {
    const long n = std::lround(T / dt);
    if (n < 1 || std::abs(n * dt - T) > 1e-9 * T)
      throw Error(ErrorKind::invalid_spec, "horizons must be positive multiples of dt");
    marks.push_back(n);
  }
  SweepResult out;
  out.horizons = horizons;
  out.rows.resize(Omegas.size());

  auto run_row = [&](std::size_t i, const GridPtr& grid) {
    PhysParams p = base;
    p.Omega = Omegas[i];
    SpectralField lam(grid, v0.ncomp());
    std::copy(v0.data().begin(), v0.data().end(), lam.data().begin());
    lam = band_project(lam, R);
    if (remove_geostrophic) lam = ageostrophic_part(lam, p);
    const Propagator E(grid, p, dt);
    SweepRow row;
    row.Omega = p.Omega;
    row.eta = p.eta();
    double acc = 0.0;
    std::size_t h = 0;
    for (long n = 0; n < marks.back(); ++n) {
      acc += weighted_norm(lam, 0.0, std::numeric_limits<double>::infinity()) * dt;
      E.apply(lam);
      while (h < marks.size() && marks[h] == n + 1) {
        row.I.push_back(acc);
        ++h;
      }
    }
    out.rows[i] = std::move(row);
  };

  const int nw = std::clamp(threads, 1, static_cast<int>(Omegas.size()));
  if (nw == 1) {
    for (std::size_t i = 0; i < Omegas.size(); ++i) run_row(i, v0.grid_ptr());
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nw);
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&, w] {
        try {
          const GridPtr grid = make_grid(v0.grid().spec());
          for (std::size_t i = w; i < Omegas.size(); i += nw) run_row(i, grid);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  // Largest decade: eta in [eta_max/10, eta_max].
  double emax = 0.0;
  for (const auto& r : out.rows) emax = std::max(emax, std::abs(r.eta));
  std::vector<double> xs, ys;
  out.eta_lo = emax;
  for (const auto& r : out.rows)
    if (std::abs(r.eta) >= emax / 10.0 * (1.0 - 1e-12)) {
      xs.push_back(std::abs(r.eta));
      ys.push_back(r.I.back());
      out.eta_lo = std::min(out.eta_lo, std::abs(r.eta));
    }
  out.eta_hi = emax;
  out.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
  return out;
}

}  // namespace bvx
