#include "bvx/acceptance.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <chrono>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "bvx/diagnostics.hpp"
#include "bvx/error.hpp"
#include "bvx/experiments.hpp"
#include "bvx/scenario.hpp"
#include "bvx/snapshot.hpp"

namespace bvx {

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string checks_text(const ExperimentResult& r) {
  std::string s;
  for (const auto& c : r.checks) s += (s.empty() ? "" : ", ") + c.name + "=" + sci(c.value) + (c.pass ? "" : "(!)");
  return s;
}

cplx dot(const Vec4& a, const Vec4& b) {
  cplx s = 0.0;
  for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Vec4 apply(const Mat4& m, const Vec4& v) {
  Vec4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] += m[i][j] * v[j];
  return r;
}

double diff(const Vec4& a, const Vec4& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Vec4 scale(cplx s, const Vec4& v) {
  Vec4 r{};
  for (int i = 0; i < 4; ++i) r[i] = s * v[i];
  return r;
}

// ----------------------------------------------------------------------------

Outcome eigenstructure() {
  std::mt19937_64 rng(1401);
  std::normal_distribution<double> nd(0.0, 3.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> nn(-6, 6);
  double worst = 0.0;
  int kh0 = 0, n0 = 0, samples = 0;
  while (samples < 10000) {
    const Boundary bc = ud(rng) < 0.5 ? Boundary::periodic : Boundary::stress_free;
    Wavevector k{nd(rng), nd(rng), 0.0};
    const int n = ud(rng) < 0.1 ? 0 : nn(rng);
    if (ud(rng) < 0.1) k.k1 = k.k2 = 0.0;
    k.k3 = (bc == Boundary::periodic ? 2.0 : 1.0) * kPi * n;
    if (k.norm2() == 0.0) continue;
    const double eta = (ud(rng) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, -2.0 + 4.0 * ud(rng));
    const PhysParams p{eta, 1.0, 1.0};
    ++samples;
    kh0 += k.kh2() == 0.0;
    n0 += n == 0;
    const ModeFrame f = mode_frame(k, p, bc);
    const Mat4 M = pjp_matrix(k, p, bc);
    auto basis = [&](const Vec4& a) { return bc == Boundary::periodic ? a : to_sine_cosine(a); };
    const Vec4 v[4] = {basis(f.a_g), basis(f.a_0), basis(f.a_plus), basis(f.a_minus)};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(dot(v[i], v[j]) - (i == j ? 1.0 : 0.0)));
    Vec4 conj_plus{};
    for (int i = 0; i < 4; ++i) conj_plus[i] = std::conj(f.a_plus[i]);
    worst = std::max(worst, diff(f.a_minus, conj_plus));
    const double pe = std::sqrt(k.kh2() + eta * eta * k.k3 * k.k3) / std::sqrt(k.norm2());
    worst = std::max(worst, std::abs(f.p_eta - pe));
    const Vec4 zero{};
    worst = std::max(worst, diff(apply(M, v[0]), zero));
    worst = std::max(worst, diff(apply(M, v[1]), zero));
    worst = std::max(worst, diff(apply(M, v[2]), scale(cplx(0.0, pe), v[2])));
    worst = std::max(worst, diff(apply(M, v[3]), scale(cplx(0.0, -pe), v[3])));
  }
  return {worst <= 1e-12, "max residual " + sci(worst) + " over " + std::to_string(samples) + " samples (" +
                              std::to_string(kh0) + " with k_h = 0, " + std::to_string(n0) + " with n = 0)"};
}

Eigen::Matrix4d dense_expm(const Wavevector& k, const PhysParams& p, double h) {
  const Mat4 M = skew_matrix(k, p.Gamma == 0.0 ? 0.0 : p.Omega / p.Gamma);
  Eigen::Matrix4d G;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) G(i, j) = p.Gamma * M[i][j].real() - (i == j ? p.nu * k.norm2() : 0.0);
  if (k.norm2() == 0.0) {
    // exp(-J t) acts on the means: u1' = Omega u2, u2' = -Omega u1, u3' = Gamma theta, theta' = -Gamma u3.
    G.setZero();
    G(0, 1) = p.Omega;
    G(1, 0) = -p.Omega;
    G(2, 3) = p.Gamma;
    G(3, 2) = -p.Gamma;
  }
  return (G * h).exp();
}

Outcome propagator_oracle() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::uniform_int_distribution<int> mi(-8, 8);
  double err_oracle = 0.0, err_frame = 0.0, err_group = 0.0, err_norm = 0.0;
  for (int s = 0; s < 4000; ++s) {
    const Boundary bc = s % 2 ? Boundary::periodic : Boundary::stress_free;
    const double dk = 2.0 * kPi / (2.0 + 30.0 * ud(rng));
    Wavevector k{dk * mi(rng), dk * mi(rng), (bc == Boundary::periodic ? 2.0 : 1.0) * kPi * mi(rng)};
    if (s % 50 == 0) k = {};
    const PhysParams p{-50.0 + 100.0 * ud(rng), 0.2 + 5.0 * ud(rng), 2.0 * ud(rng)};
    const double h = std::pow(10.0, -3.0 + 3.0 * ud(rng));
    const Eigen::Matrix4d ex = dense_expm(k, p, h);
    const auto E = propagator_entries(k, p, h);
    const Mat4 F = linear_propagator(k, p, h, bc);
    for (int i = 0; i < 16; ++i) {
      err_oracle = std::max(err_oracle, std::abs(E[i] - ex(i / 4, i % 4)));
      err_frame = std::max(err_frame, std::abs(F[i / 4][i % 4] - ex(i / 4, i % 4)));
    }
    const double h2 = h * ud(rng);
    const auto E1 = propagator_entries(k, p, h2);
    const auto E2 = propagator_entries(k, p, h - h2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double c = 0.0;
        for (int q = 0; q < 4; ++q) c += E1[4 * i + q] * E2[4 * q + j];
        err_group = std::max(err_group, std::abs(c - E[4 * i + j]));
      }
    PhysParams p0 = p;
    p0.nu = 0.0;
    const auto E0 = propagator_entries(k, p0, 10.0 * h);
    std::array<double, 4> v{ud(rng) - 0.5, ud(rng) - 0.5, ud(rng) - 0.5, ud(rng) - 0.5};
    double n_in = 0.0, n_out = 0.0;
    for (int i = 0; i < 4; ++i) {
      double w = 0.0;
      for (int j = 0; j < 4; ++j) w += E0[4 * i + j] * v[j];
      n_in += v[i] * v[i];
      n_out += w * w;
    }
    err_norm = std::max(err_norm, std::abs(std::sqrt(n_out / n_in) - 1.0));
  }
  // Field-level norm conservation under the tabulated propagator.
  const GridPtr g = make_grid({10.0, 32, 8, Boundary::periodic, 2.0 / 3.0});
  SpectralField f = random_baroclinic(g, {4.0, 2.0, 1.0}, 5, 0.0, 12.0, 1.0, false);
  const double n0 = l2_norm(f);
  const Propagator P(g, {4.0, 2.0, 0.0}, 0.37);
  for (int i = 0; i < 50; ++i) P.apply(f);
  err_norm = std::max(err_norm, std::abs(l2_norm(f) / n0 - 1.0));
  const double worst = std::max({err_oracle, err_frame, err_group, err_norm});
  return {worst <= 1e-10, "vs dense expm " + sci(err_oracle) + ", frame form " + sci(err_frame) + ", group " +
                              sci(err_group) + ", nu=0 norm " + sci(err_norm)};
}

Outcome vortex_tracking(const RunOptions& ro) {
  const ExperimentResult a = run_experiment("oseen_track", ro);
  const ExperimentResult b = run_experiment("oscillator", ro);
  return {a.passed() && b.passed(), "background: " + checks_text(a) + "; full field: " + checks_text(b)};
}

Outcome oseen_rate(const RunOptions& ro) {
  const ExperimentResult r = run_experiment("perturbed_vortex_rates", ro);
  return {r.passed(), checks_text(r)};
}

Outcome baroclinic_decay(const RunOptions& ro) {
  Scenario lin = preset("baroclinic_decay");
  const ExperimentResult a = run_experiment(lin, ro);
  Scenario sf = lin;
  sf.grid.bc = Boundary::stress_free;
  // Slowest vertical rate is four times smaller: same number of e-foldings.
  sf.time.T = 16.0;
  sf.output.cadence = 0.08;
  const ExperimentResult b = run_experiment(sf, ro);
  Scenario nl = lin;
  nl.time.linear_only = false;
  nl.init.amplitude = 0.05;
  const ExperimentResult c = run_experiment(nl, ro);
  auto mu = [](const ExperimentResult& r) { return sci(r.fits.front().exponent); };
  return {a.passed() && b.passed() && c.passed(),
          "periodic mu=" + mu(a) + " target " + sci(4 * kPi * kPi) + " (" + checks_text(a) + "); stress-free mu=" +
              mu(b) + " target " + sci(kPi * kPi) + " (" + checks_text(b) + "); nonlinear mu=" + mu(c) + " (" +
              checks_text(c) + ")"};
}

Outcome moments_conservation() {
  double worst = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    Scenario sc;
    sc.grid = {12.0, 48, 8, Boundary::periodic, 2.0 / 3.0};
    sc.physics = {3.0, 2.0, 0.5};
    sc.init.type = InitType::vortex_plus_perturbation;
    sc.init.perturbation = Perturbation::random;
    sc.init.perturbation_amplitude = 1.0;
    sc.init.amplitude = 0.5;
    sc.init.k_min = 0.0;
    sc.init.k_max = 9.0;
    sc.init.seed = 3 + variant;
    sc.init.B1 = 1.0;
    sc.init.B2 = 0.5;
    if (variant == 1) {
      sc.formulation = Formulation::background_perturbation;
      sc.init.A = 1.0;
    }
    sc.time.T = 2.0;
    sc.output.cadence = 0.05;
    validate_scenario(sc);
    const ExperimentResult r = run_experiment(sc, {});
    const auto& tr = r.traj;
    const double T = tr.times.back() - tr.times.front();
    for (const char* name : {"A", "B1_rot", "B2_rot"}) {
      const auto& v = tr.series.at(name);
      for (double x : v) worst = std::max(worst, std::abs(x - v.front()) / std::max(1.0, std::abs(v.front())) / T);
    }
  }
  return {worst <= 1e-8, "max drift per unit time " + sci(worst) + " (full field and background runs)"};
}

Outcome dispersive(const RunOptions& ro) {
  const ExperimentResult r = run_experiment("dispersive_sweep", ro);
  std::string I;
  for (const auto& row : r.sweep->rows) I += (I.empty() ? "" : "/") + sci(row.I.back());
  std::string Ik;
  for (const auto& row : r.sweep_keep_geostrophic->rows) Ik += (Ik.empty() ? "" : "/") + sci(row.I.back());
  const auto& rows = r.sweep->rows;
  double sat = 0.0;
  for (const auto& row : rows) sat = std::max(sat, std::abs(row.I[1] / row.I[0] - 1.0));
  return {r.passed(), checks_text(r) + "; I = " + I + "; I with S = " + Ik + "; I(0.2)/I(0.1)-1 <= " + sci(sat)};
}

Outcome global_qg(const RunOptions& ro) {
  const ExperimentResult r = run_experiment("global_small_qg", ro);
  return {r.passed(), checks_text(r)};
}

Outcome hermite_suite() {
  // Fixed xi-grid for projections and biorthogonality.
  const GridPtr xg = make_grid({30.0, 128, 4, Boundary::periodic, 1.0});
  PhysicalField phi(xg, 1, Layout::plane);
  phi.fill([](int, double x1, double x2, double) { return oseen(x1, x2).phi0; });
  const HermiteProjection p0 = hermite_projection(phi, 0);
  double e_p0 = 0.0;
  for (std::size_t i = 0; i < phi.points(); ++i)
    e_p0 = std::max(e_p0, std::abs(p0.Pn.values()[i] - phi.values()[i]) / (1.0 / (4 * kPi)));

  double e_bi = 0.0;
  const double dA = (xg->L() / xg->n()) * (xg->L() / xg->n());
  for (int b1 = 0; b1 <= 4; ++b1)
    for (int b2 = 0; b1 + b2 <= 4; ++b2) {
      PhysicalField f(xg, 1, Layout::plane);
      f.fill([&](int, double x1, double x2, double) { return hermite_function(b1, b2, x1, x2); });
      const HermiteProjection hp = hermite_projection(f, 4, 1e-6);
      for (std::size_t q = 0; q < hp.indices.size(); ++q) {
        const bool same = hp.indices[q][0] == b1 && hp.indices[q][1] == b2;
        e_bi = std::max(e_bi, std::abs(hp.coefficients[q] - (same ? 1.0 : 0.0)));
        // direct quadrature of int H_alpha phi_beta
        double s = 0.0;
        for (int j2 = 0; j2 < xg->n(); ++j2)
          for (int j1 = 0; j1 < xg->n(); ++j1)
            s += hermite_poly(hp.indices[q][0], hp.indices[q][1], xg->x(j1), xg->x(j2)) * f.at(0, 0, j2, j1);
        e_bi = std::max(e_bi, std::abs(s * dA - (same ? 1.0 : 0.0)));
      }
    }

  // Heat flow of d^alpha phi0 in x; scaled coefficients decay as e^{-|alpha| tau/2}.
  const GridPtr g = make_grid({80.0, 256, 4, Boundary::periodic, 1.0});
  double e_heat = 0.0;
  const PhysParams heat{0.0, 0.0, 1.0};
  for (int a1 = 0; a1 <= 2; ++a1)
    for (int a2 = 0; a1 + a2 <= 2; ++a2) {
      PhysicalField f(g, 4, Layout::plane);
      f.fill([&](int c, double x1, double x2, double) { return c == 2 ? hermite_function(a1, a2, x1, x2) : 0.0; });
      const SpectralField s0 = to_spectral(f);
      double c0 = 0.0;
      for (double tau : {0.0, 0.5, 1.0, 1.5, 2.0, 2.4}) {
        const double t = std::expm1(tau);
        const SpectralField st = apply_propagator(s0, heat, t);
        SpectralField sc1(g, 1, Layout::plane);
        std::copy(st.component(2).begin(), st.component(2).end(), sc1.component(0).begin());
        const ScaledSnapshot sn = to_scaled(sc1, t, Amplitude::vorticity);
        const HermiteProjection hp = hermite_projection(sn.values, 2, 1e-6);
        double c = 0.0;
        for (std::size_t q = 0; q < hp.indices.size(); ++q)
          if (hp.indices[q][0] == a1 && hp.indices[q][1] == a2) c = hp.coefficients[q];
        if (tau == 0.0) c0 = c;
        const double expect = std::exp(-0.5 * (a1 + a2) * tau);
        e_heat = std::max(e_heat, std::abs(c / c0 / expect - 1.0));
      }
    }
  return {e_p0 <= 1e-8 && e_bi <= 1e-8 && e_heat <= 1e-2,
          "P0 phi0 error " + sci(e_p0) + ", biorthogonality " + sci(e_bi) + ", heat-flow decay rel err " +
              sci(e_heat)};
}

Outcome infrastructure(const std::string& work_dir) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  double rt = 0.0;
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = make_grid({7.0, 32, 8, bc, 2.0 / 3.0});
    PhysicalField p(g, 4);
    for (double& x : p.values()) x = nd(rng);
    const PhysicalField q = to_physical(to_spectral(p));
    for (std::size_t i = 0; i < p.values().size(); ++i) rt = std::max(rt, std::abs(q.values()[i] - p.values()[i]));
  }

  bool io_ok = true;
  {
    const GridPtr g = make_grid({9.0, 16, 8, Boundary::stress_free, 2.0 / 3.0});
    SimState s;
    s.v = random_baroclinic(g, {2.0, 1.5, 0.7}, 4, 0.0, 10.0, 1.0, false);
    s.v.set_frame(FrameTag::rotating);
    s.t = 1.25;
    s.params = {2.0, 1.5, 0.7};
    s.formulation = Formulation::background_perturbation;
    s.background = {1.0, 0.5, -0.25, 1.5};
    const std::string path = (std::filesystem::path(work_dir) / "acceptance_io.bvxl").string();
    save_snapshot(s, path);
    const SimState r = load_snapshot(path);
    io_ok = r.v.data().size() == s.v.data().size() &&
            std::memcmp(r.v.data().data(), s.v.data().data(), s.v.data().size() * sizeof(cplx)) == 0 &&
            r.t == s.t && r.params.Omega == s.params.Omega && r.params.Gamma == s.params.Gamma &&
            r.params.nu == s.params.nu && r.formulation == s.formulation && r.v.frame() == s.v.frame() &&
            r.background.B2 == s.background.B2 && r.v.grid().spec().L == 9.0;
    std::filesystem::remove(path);
  }

  bool det_ok = false;
  {
    Scenario sc = parse_scenario(
        "grid.L = 8\ngrid.N = 32\ngrid.Nv = 4\nphysics.Gamma = 1.5\nphysics.Omega = 2\ntime.T = 0.5\n"
        "init.type = random_baroclinic\ninit.k_max = 10\ninit.amplitude = 2\ninit.seed = 5\n"
        "init.barotropic_amplitude = 0.5\noutput.cadence = 0.05\n");
    std::vector<std::string> names;
    const ExperimentResult a = run_experiment(sc, {});
    for (const auto& [k, v] : a.traj.series) names.push_back(k);
    const ExperimentResult b = run_experiment(sc, {});
    det_ok = series_csv(a.traj, names) == series_csv(b.traj, names);
  }

  // Temporal order on a smooth nonlinear run.
  const GridPtr g = make_grid({2.0 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SimState s0;
  s0.v = random_baroclinic(g, {2.0, 1.0, 0.1}, 8, 0.0, 3.0 * std::sqrt(2.0) * kPi, 3.0, false);
  s0.params = {2.0, 1.0, 0.1};
  auto run = [&](double dt) {
    SimState s = s0;
    Stepper st(g, s.params, {dt, 0.5, false});
    const long n = std::lround(1.0 / dt);
    for (long i = 0; i < n; ++i) st.step(s);
    return s.v;
  };
  const SpectralField ref = run(1.0 / 1280.0);
  std::vector<double> errs;
  for (double dt : {0.05, 0.025, 0.0125}) errs.push_back(l2_norm(run(dt) - ref));
  const double o1 = std::log2(errs[0] / errs[1]), o2 = std::log2(errs[1] / errs[2]);
  const bool order_ok = std::abs(o1 - 4.0) <= 0.2 && std::abs(o2 - 4.0) <= 0.2;
  return {rt <= 1e-12 && io_ok && det_ok && order_ok,
          "round trip " + sci(rt) + ", snapshot bit-exact " + (io_ok ? "yes" : "no") + ", deterministic " +
              (det_ok ? "yes" : "no") + ", order " + sci(o1) + "/" + sci(o2)};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.pass ? "PASS" : "FAIL");
  char tail[32];
  std::snprintf(tail, sizeof tail, " [%.1f s]", r.seconds);
  return head + r.title + ": " + r.detail + tail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  RunOptions ro;
  ro.threads = opt.threads;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> suite = {
      {"eigenstructure", eigenstructure},
      {"propagator vs dense expm", propagator_oracle},
      {"exact vortex tracking", [&] { return vortex_tracking(ro); }},
      {"Oseen convergence rate", [&] { return oseen_rate(ro); }},
      {"baroclinic decay", [&] { return baroclinic_decay(ro); }},
      {"moment conservation", moments_conservation},
      {"dispersive sweep", [&] { return dispersive(ro); }},
      {"global small-QG regime", [&] { return global_qg(ro); }},
      {"Hermite and scaling suite", hermite_suite},
      {"infrastructure", [&] { return infrastructure(opt.work_dir); }},
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= static_cast<int>(suite.size()); ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    CriterionResult r;
    r.id = id;
    r.title = suite[id - 1].first;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = suite[id - 1].second();
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.out) *opt.out << format_result(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bvx
