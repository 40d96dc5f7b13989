#include "bvx/dynamics.hpp"

#include <cmath>
#include <limits>

#if defined(__SSE__) || defined(__x86_64__)
#include <xmmintrin.h>
#define BVX_HAVE_MXCSR 1
#endif

#include "bvx/error.hpp"

namespace bvx {

namespace {

constexpr cplx I{0.0, 1.0};

bool all_zero(std::span<const cplx> a) {
  for (const cplx& c : a)
    if (c != cplx{}) return false;
  return true;
}

// True when the n != 0 layers are exactly zero.
bool baroclinic_is_zero(const SpectralField& v) {
  const std::size_t plane = v.grid().spectral_size(1);
  for (int c = 0; c < v.ncomp(); ++c) {
    auto comp = v.component(c);
    if (!all_zero(comp.subspan(plane))) return false;
  }
  return true;
}

// out_i += i k_j F[prod] for one product, over a plane or volume.
void add_divergence(const SpectralField& prod_hat, int j, SpectralField& out, int i) {
  auto src = prod_hat.component(0);
  auto dst = out.component(i);
  for_each_mode(out.grid(), out.nz(), [&](std::size_t idx, int, int, int, const Wavevector& k) {
    const double kj = j == 0 ? k.k1 : (j == 1 ? k.k2 : k.k3);
    dst[idx] += I * kj * src[idx];
  });
}

}  // namespace

void enable_flush_to_zero() {
#ifdef BVX_HAVE_MXCSR
  _mm_setcsr(_mm_getcsr() | 0x8040);
#endif
}

NonlinearTerm::NonlinearTerm(GridPtr grid) : grid_(std::move(grid)) {}

const BackgroundFields& NonlinearTerm::background(const SimState& s) {
  if (bg_.t == s.t && bg_.v.ncomp() == 4) return bg_;
  bg_.t = s.t;
  bg_.v = PhysicalField(grid_, 4, Layout::plane);
  const Grid& g = *grid_;
  for (int j2 = 0; j2 < g.n(); ++j2)
    for (int j1 = 0; j1 < g.n(); ++j1) {
      const VortexValue b = vortex_solution(s.background, s.t, g.x(j1), g.x(j2));
      bg_.v.at(0, 0, j2, j1) = b.u1;
      bg_.v.at(1, 0, j2, j1) = b.u2;
      bg_.v.at(2, 0, j2, j1) = b.u3;
      bg_.v.at(3, 0, j2, j1) = b.theta;
    }
  return bg_;
}

void NonlinearTerm::evaluate(const SimState& s, SpectralField& rhs) {
  const Grid& g = *grid_;
  const SpectralField& v = s.v;
  if (v.ncomp() != 4 || v.nz() != g.nv()) throw Error(ErrorKind::shape_mismatch, "state must be a 4-component volume");
  if (!rhs.same_shape(v)) rhs = SpectralField(grid_, 4, Layout::volume);
  rhs.set_zero();
  const bool bgmode = s.formulation == Formulation::background_perturbation;

  // Barotropic products on the plane.
  const PhysicalField pb = to_physical(extract_plane(v));
  const PhysicalField* bg = bgmode ? &background(s).v : nullptr;
  const std::size_t np = g.physical_size(1);
  SpectralField Nbar(grid_, 4, Layout::plane);
  {
    PhysicalField prod(grid_, 1, Layout::plane);
    auto pp = prod.component(0);
    // (j, i) pairs with j in {1,2}; velocity pairs are symmetric.
    static constexpr int pairs[7][2] = {{0, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}};
    for (const auto& pr : pairs) {
      const int j = pr[0], i = pr[1];
      auto uj = pb.component(j), vi = pb.component(i);
      if (bg) {
        auto bj = bg->component(j), bi = bg->component(i);
        for (std::size_t q = 0; q < np; ++q) pp[q] = uj[q] * (vi[q] + bi[q]) + bj[q] * vi[q];
      } else {
        for (std::size_t q = 0; q < np; ++q) pp[q] = uj[q] * vi[q];
      }
      const SpectralField ph = to_spectral(prod);
      add_divergence(ph, j, Nbar, i);
      if (i < 2 && i != j) add_divergence(ph, i, Nbar, j);
    }
  }
  embed_plane(Nbar, rhs);

  // x3-dependent remainder ubar (x) vt + ut (x) (vbar + vt).
  if (!baroclinic_is_zero(v)) {
    const PhysicalField pt = to_physical(baroclinic_part(v));
    const std::size_t nv = g.physical_size(g.nv());
    PhysicalField bar_tot(grid_, 4, Layout::plane);
    for (int c = 0; c < 4; ++c) {
      auto dst = bar_tot.component(c);
      auto src = pb.component(c);
      for (std::size_t q = 0; q < np; ++q) dst[q] = src[q] + (bg ? bg->component(c)[q] : 0.0);
    }
    PhysicalField prod(grid_, 1, Layout::volume);
    auto pp = prod.component(0);
    static constexpr int pairs[9][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}, {0, 3}, {1, 3}, {2, 3}};
    SpectralField Nt(grid_, 4, Layout::volume);
    for (const auto& pr : pairs) {
      const int j = pr[0], i = pr[1];
      auto bj = bar_tot.component(j), bi = bar_tot.component(i);
      auto tj = pt.component(j), ti = pt.component(i);
      for (std::size_t q = 0; q < nv; ++q) {
        const std::size_t h = q % np;
        pp[q] = bj[h] * ti[q] + tj[q] * (bi[h] + ti[q]);
      }
      const SpectralField ph = to_spectral(prod);
      add_divergence(ph, j, Nt, i);
      if (i < 3 && i != j) add_divergence(ph, i, Nt, j);
    }
    rhs += Nt;
  }

  apply_dealias(rhs);
  rhs = helmholtz_project(rhs);
  enforce_parity(rhs, kStateParity);
  rhs *= -1.0;
}

SpectralField nonlinear_rhs(const SimState& state) {
  NonlinearTerm term(state.v.grid_ptr());
  SpectralField rhs;
  term.evaluate(state, rhs);
  return rhs;
}

Stepper::Stepper(GridPtr grid, const PhysParams& params, const StepperConfig& cfg)
    : grid_(grid), params_(params), cfg_(cfg), dt_(cfg.dt), nonlinear_(grid) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorKind::invalid_spec, "dt must be positive");
  params.validate();
  full_ = Propagator(grid, params, dt_);
  half_ = Propagator(grid, params, 0.5 * dt_);
}

void Stepper::step(SimState& s) {
  const double h = dt_;
  const double t0 = s.t;
  if (cfg_.linear_only) {
    full_.apply(s.v);
    s.t = t0 + h;
    return;
  }
  SpectralField& v = s.v;
  SimState& stage = stage_;
  stage.formulation = s.formulation;
  stage.background = s.background;
  stage.params = s.params;

  nonlinear_.evaluate(s, k1_);

  tmp_ = v;
  tmp_.axpy(0.5 * h, k1_);
  half_.apply(tmp_, stage.v);
  stage.t = t0 + 0.5 * h;
  nonlinear_.evaluate(stage, k2_);

  half_.apply(v, ev_);  // E(h/2) v
  stage.v = ev_;
  stage.v.axpy(0.5 * h, k2_);
  nonlinear_.evaluate(stage, k3_);

  full_.apply(v, tmp_);  // E(h) v
  half_.apply(k3_, stage.v);
  stage.v *= h;
  stage.v += tmp_;
  stage.t = t0 + h;
  nonlinear_.evaluate(stage, k4_);

  // v+ = E(h) v + h/6 (E(h) k1 + 2 E(h/2)(k2 + k3) + k4)
  full_.apply(k1_, acc_);
  k2_ += k3_;
  half_.apply(k2_, ev_);
  acc_.axpy(2.0, ev_);
  acc_ += k4_;
  tmp_.axpy(h / 6.0, acc_);
  std::swap(v, tmp_);
  s.t = t0 + h;
}

SimState step(const SimState& state, const StepperConfig& cfg) {
  Stepper st(state.v.grid_ptr(), state.params, cfg);
  SimState out = state;
  st.step(out);
  return out;
}

double max_velocity(const SimState& s) {
  const Grid& g = s.v.grid();
  SpectralField u(s.v.grid_ptr(), 3, Layout::volume);
  for (int c = 0; c < 3; ++c) std::copy(s.v.component(c).begin(), s.v.component(c).end(), u.component(c).begin());
  const PhysicalField p = to_physical(u);
  const std::size_t np = g.physical_size(1);
  std::vector<double> b1(np, 0.0), b2(np, 0.0), b3(np, 0.0);
  if (s.formulation == Formulation::background_perturbation) {
    for (int j2 = 0; j2 < g.n(); ++j2)
      for (int j1 = 0; j1 < g.n(); ++j1) {
        const VortexValue b = vortex_solution(s.background, s.t, g.x(j1), g.x(j2));
        const std::size_t q = static_cast<std::size_t>(j2) * g.n() + j1;
        b1[q] = b.u1;
        b2[q] = b.u2;
        b3[q] = b.u3;
      }
  }
  double m = 0.0;
  for (std::size_t q = 0; q < p.points(); ++q) {
    const std::size_t h = q % np;
    const double a = p.component(0)[q] + b1[h], b = p.component(1)[q] + b2[h], c = p.component(2)[q] + b3[h];
    m = std::max(m, std::sqrt(a * a + b * b + c * c));
  }
  return m;
}

double choose_dt(const SimState& s, double cfl, double interval) {
  if (!(interval > 0.0)) throw Error(ErrorKind::invalid_spec, "output interval must be positive");
  if (!(cfl > 0.0 && cfl <= 0.5)) throw Error(ErrorKind::invalid_spec, "cfl_target must lie in (0, 0.5]");
  const double umax = max_velocity(s);
  const double dx = s.v.grid().L() / s.v.grid().n();
  double dt = umax > 0.0 ? cfl * dx / umax : interval;
  const double n = std::ceil(interval / dt - 1e-9);
  return interval / std::max(1.0, n);
}

namespace {

double point_value_at_origin(const SpectralField& v, int c) {
  const Grid& g = v.grid();
  double s = 0.0;
  for (int j2 = 0; j2 < g.n(); ++j2)
    for (int j1 = 0; j1 < g.nh(); ++j1) s += g.hermitian_weight(j1) * v.at(c, 0, j2, j1).real();
  return s;
}

struct Recorder {
  const RunControl& ctl;
  Trajectory& traj;
  const Propagator* lambda_step = nullptr;
  SpectralField lambda;

  void push(const std::string& name, double value) { traj.series[name].push_back(value); }

  void record(const SimState& s) {
    const Grid& g = s.v.grid();
    traj.times.push_back(s.t);
    const bool bgmode = s.formulation == Formulation::background_perturbation;
    Moments bgm;
    VortexValue bg0;
    if (bgmode) {
      const auto ph = vortex_phase(s.background, s.t);
      bgm = {s.background.A, ph[0], ph[1]};
      bg0 = vortex_solution(s.background, s.t, 0.0, 0.0);
    }
    const Moments m = moments(s.v, bgm);
    push("A", m.A);
    push("B1", m.B1);
    push("B2", m.B2);
    const auto rot = rotate_frame(std::array<double, 2>{m.B1, m.B2}, -s.params.Gamma * s.t);
    push("B1_rot", rot[0]);
    push("B2_rot", rot[1]);

    const SpectralField bar = extract_plane(s.v);
    SpectralField uh(s.v.grid_ptr(), 2, Layout::plane);
    std::copy(bar.component(0).begin(), bar.component(0).end(), uh.component(0).begin());
    std::copy(bar.component(1).begin(), bar.component(1).end(), uh.component(1).begin());
    const SpectralField w = curl2(uh);
    PhysicalField wp = to_physical(w);
    push("pert_omega3_L1", weighted_norm(wp, 0.0, 1.0));
    push("pert_omega3_L2", l2_norm(w));
    if (bgmode) {
      for (int j2 = 0; j2 < g.n(); ++j2)
        for (int j1 = 0; j1 < g.n(); ++j1)
          wp.at(0, 0, j2, j1) += vortex_solution(s.background, s.t, g.x(j1), g.x(j2)).omega3;
    }
    const double w1 = weighted_norm(wp, 0.0, 1.0);
    const double w2 = weighted_norm(wp, 0.0, 2.0);
    push("omega3_L1", w1);
    push("omega3_L2sq", w2 * w2);
    push("u3_origin", point_value_at_origin(s.v, 2) + bg0.u3);
    push("theta_origin", point_value_at_origin(s.v, 3) + bg0.theta);

    const SpectralField vt = baroclinic_part(s.v);
    const double vt_l2 = l2_norm(vt);
    push("energy", l2_norm(s.v));
    push("vbar_L2", l2_norm(bar));
    push("vt_L2", vt_l2);
    push("vt_H1", h1_norm(vt));
    if (s.params.Gamma != 0.0) {
      const SpectralField sv = geostrophic_project(vt, s.params);
      push("S_L2", l2_norm(sv));
      push("ageo_L2", l2_norm(vt - sv));
    }
    if (lambda_step) {
      const SpectralField r = vt - lambda;
      const double gr = gradient_norm2(r);
      push("grad_r_L2sq", gr);
      push("Psi", w1 + w2 * w2 + gr);
      push("lambda_Linf", weighted_norm(lambda, 0.0, std::numeric_limits<double>::infinity()));
      push("lambda_H1", h1_norm(lambda));
      if (ctl.keep_remainders) traj.remainders.push_back(r);
    }
    if (ctl.keep_snapshots) traj.snapshots.push_back(s);
    if (ctl.observer) ctl.observer(s);
  }

  void advance_lambda() {
    if (lambda_step) lambda_step->apply(lambda);
  }
};

}  // namespace

Trajectory integrate(SimState s, const StepperConfig& cfg, const RunControl& ctl) {
  if (ctl.T < 0.0) throw Error(ErrorKind::invalid_spec, "T must be nonnegative");
  s.params.validate();
  enable_flush_to_zero();
  Trajectory traj;
  const double interval = ctl.T == 0.0 ? 1.0 : ctl.output_interval;
  if (!(interval > 0.0)) throw Error(ErrorKind::invalid_spec, "output interval must be positive");
  const long nout = ctl.T == 0.0 ? 0 : std::lround(ctl.T / interval);
  if (ctl.T > 0.0 && std::abs(nout * interval - ctl.T) > 1e-9 * ctl.T)
    throw Error(ErrorKind::invalid_spec, "T must be a multiple of the output interval");

  double dt = cfg.dt;
  if (dt > 0.0) {
    dt = interval / std::max(1.0, std::ceil(interval / dt - 1e-9));
  } else {
    dt = choose_dt(s, cfg.cfl_target, interval);
  }
  traj.dt = dt;
  const long nsub = std::lround(interval / dt);

  Recorder rec{ctl, traj, nullptr, SpectralField{}};
  std::unique_ptr<Propagator> lam;
  if (ctl.lambda_R > 0.0) {
    lam = std::make_unique<Propagator>(s.v.grid_ptr(), s.params, interval);
    rec.lambda_step = lam.get();
    rec.lambda = band_project(baroclinic_part(s.v), ctl.lambda_R);
  }
  rec.record(s);
  if (nout == 0) return traj;

  StepperConfig scfg = cfg;
  scfg.dt = dt;
  Stepper stepper(s.v.grid_ptr(), s.params, scfg);
  const double n0 = l2_norm(s.v);
  const double t0 = s.t;
  for (long k = 1; k <= nout; ++k) {
    for (long m = 1; m <= nsub; ++m) {
      stepper.step(s);
      s.t = t0 + ((k - 1) * nsub + m) * dt;
      ++traj.steps;
      const double nrm = l2_norm(s.v);
      if (!std::isfinite(nrm))
        throw Error(ErrorKind::nan_detected, "non-finite state at t = " + std::to_string(s.t));
      if (n0 > 0.0 && nrm > ctl.blowup_factor * n0)
        throw Error(ErrorKind::nan_detected, "blow-up guard: norm grew by more than the guard factor at t = " +
                                                 std::to_string(s.t));
    }
    s.t = t0 + k * interval;
    rec.advance_lambda();
    rec.record(s);
  }
  return traj;
}

LambdaRSplit lambda_r_split(const SpectralField& v0, double R, const PhysParams& params, double T, double dt,
                            bool linear_only) {
  SimState s;
  s.v = v0;
  s.params = params;
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.linear_only = linear_only;
  RunControl ctl;
  ctl.T = T;
  ctl.output_interval = T > 0.0 ? dt : 1.0;
  ctl.lambda_R = R;
  ctl.keep_snapshots = true;
  ctl.keep_remainders = true;
  const Trajectory tr = integrate(s, cfg, ctl);
  LambdaRSplit out;
  out.times = tr.times;
  out.r = tr.remainders;
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i)
    out.lambda.push_back(baroclinic_part(tr.snapshots[i].v) - tr.remainders[i]);
  return out;
}

}  // namespace bvx
