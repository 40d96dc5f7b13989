#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "bvx/biotsavart.hpp"
#include "bvx/dynamics.hpp"
#include "bvx/error.hpp"
#include "bvx/experiments.hpp"
#include "bvx/scenario.hpp"
#include "test_util.hpp"

using namespace bvx;

namespace {

constexpr double kPi = std::numbers::pi;

/// Mean of v . w over the layer, by quadrature of the physical fields.
double inner(const SpectralField& a, const SpectralField& b) {
  const PhysicalField pa = to_physical(a), pb = to_physical(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < pa.values().size(); ++i) acc += pa.values()[i] * pb.values()[i];
  return acc / static_cast<double>(pa.points());
}

/// Baroclinic random data plus a barotropic swirl, so that both the plane and
/// the volume parts of the nonlinearity are exercised.
SimState mixed_state(const GridPtr& g, const PhysParams& p, double amp, std::uint64_t seed) {
  SimState s;
  s.params = p;
  s.v = random_baroclinic(g, p, seed, 0.0, 3.0 * g->dk() + 2 * kPi, amp, false);
  SpectralField w = test::random_field(g, 1, seed + 100, Layout::plane);
  w.at(0, 0, 0, 0) = 0.0;
  for_each_mode(*g, 1, [&](std::size_t i, int, int, int, const Wavevector& k) {
    if (k.kh2() > 9.0 * g->dk() * g->dk()) w.component(0)[i] = 0.0;
  });
  const SpectralField uh = velocity2d_from_vorticity(w);
  SpectralField bar(g, 4, Layout::plane);
  for (std::size_t i = 0; i < bar.modes(); ++i) {
    bar.component(0)[i] = amp * uh.component(0)[i];
    bar.component(1)[i] = amp * uh.component(1)[i];
  }
  embed_plane(bar, s.v);
  return s;
}

SimState run_to(SimState s, double T, double dt) {
  StepperConfig cfg;
  cfg.dt = dt;
  Stepper st(s.v.grid_ptr(), s.params, cfg);
  const long n = std::lround(T / dt);
  for (long k = 0; k < n; ++k) st.step(s);
  return s;
}

}  // namespace

TEST(Nonlinear, ZeroFieldGivesZero) {
  const GridPtr g = make_grid({6.0, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SimState s;
  s.v = SpectralField(g, 4);
  EXPECT_EQ(nonlinear_rhs(s).max_abs(), 0.0);
}

TEST(Nonlinear, RadialVortexHasNoAdvection) {
  const GridPtr g = make_grid({30.0, 128, 4, Boundary::periodic, 2.0 / 3.0});
  PhysicalField w(g, 1, Layout::plane);
  // Radial, zero total circulation: phi0(x) - phi0(x / sqrt 2) / 2.
  w.fill([](int, double x1, double x2, double) {
    return oseen(x1, x2).phi0 - 0.5 * oseen(x1 / std::sqrt(2.0), x2 / std::sqrt(2.0)).phi0;
  });
  SpectralField ws = to_spectral(w);
  ws.at(0, 0, 0, 0) = 0.0;
  const SpectralField uh = velocity2d_from_vorticity(ws);
  SpectralField bar(g, 4, Layout::plane);
  for (std::size_t i = 0; i < bar.modes(); ++i) {
    bar.component(0)[i] = uh.component(0)[i];
    bar.component(1)[i] = uh.component(1)[i];
  }
  SimState s;
  s.v = SpectralField(g, 4);
  embed_plane(bar, s.v);
  EXPECT_LT(nonlinear_rhs(s).max_abs(), 1e-8 * uh.max_abs());
}

TEST(Nonlinear, AdvectionIsSkew) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = make_grid({2 * kPi, 16, 8, bc, 2.0 / 3.0});
    const SimState s = mixed_state(g, {1.0, 2.0, 1.0}, 1.0, 3);
    const SpectralField n = nonlinear_rhs(s);
    ASSERT_GT(n.max_abs(), 1e-3);
    EXPECT_LT(std::abs(inner(s.v, n)), 1e-9 * std::sqrt(inner(s.v, s.v) * inner(n, n)));
  }
}

TEST(Step, LinearOnlyIsThePropagator) {
  const GridPtr g = make_grid({2 * kPi, 16, 8, Boundary::periodic, 2.0 / 3.0});
  const PhysParams p{3.0, 2.0, 1.0};
  const SimState s = mixed_state(g, p, 1.0, 4);
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.linear_only = true;
  const SimState a = step(s, cfg);
  const SpectralField b = apply_propagator(s.v, p, 0.01);
  EXPECT_EQ(test::max_diff(a.v, b), 0.0);
  EXPECT_DOUBLE_EQ(a.t, 0.01);
}

TEST(Step, RejectsNonpositiveDt) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  EXPECT_THROW(Stepper(g, {}, StepperConfig{0.0}), Error);
  EXPECT_THROW(Stepper(g, {}, StepperConfig{-0.1}), Error);
}

TEST(Step, SinglePlusModeFollowsItsEigenvalue) {
  Scenario sc = preset("single_mode_linear");
  sc.time.linear_only = false;
  sc.init.amplitude = 1e-6;
  const GridPtr g = make_grid(sc.grid);
  const SimState s0 = initial_state(sc, g);
  const Wavevector k = g->wavevector(1, 1, 2, g->nv());
  const double p = mode_frame(k, sc.physics, g->bc()).p_eta;
  const cplx factor = std::exp(cplx(-sc.physics.nu * k.norm2(), sc.physics.Gamma * p) * 0.1);
  const SimState s1 = run_to(s0, 0.1, 0.01);
  // The mode is stored once (j1 > 0), so only that entry evolves.
  SpectralField expect = s0.v;
  for (int c = 0; c < 4; ++c) expect.at(c, 1, 1, 2) *= factor;
  EXPECT_GT(s0.v.max_abs(), 0.0);
  EXPECT_LT(test::max_diff(s1.v, expect), 1e-12 * s0.v.max_abs());
}

TEST(Step, FourthOrderInTime) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  const SimState s0 = mixed_state(g, {1.0, 2.0, 0.05}, 1.0, 7);
  const double T = 0.4;
  const SimState ref = run_to(s0, T, T / 640);
  std::vector<double> err;
  for (double dt : {0.04, 0.02, 0.01}) err.push_back(l2_norm(run_to(s0, T, dt).v - ref.v));
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    EXPECT_NEAR(order, 4.0, 0.2) << i << " errors " << err[i] << " " << err[i + 1];
  }
}

TEST(Step, PreservesDivergenceAndParity) {
  const GridPtr g = make_grid({2 * kPi, 16, 8, Boundary::stress_free, 2.0 / 3.0});
  const SimState s1 = run_to(mixed_state(g, {1.0, 2.0, 0.1}, 1.0, 8), 0.2, 0.02);
  SpectralField u(g, 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < u.modes(); ++i) u.component(c)[i] = s1.v.component(c)[i];
  EXPECT_LT(divergence(u).max_abs(), 1e-11 * s1.v.max_abs());
  SpectralField p = s1.v;
  enforce_parity(p, kStateParity);
  EXPECT_LT(test::max_diff(p, s1.v), 1e-15 * s1.v.max_abs());
}

TEST(Step, HeatKernel) {
  const GridPtr g = make_grid({30.0, 128, 4, Boundary::periodic, 2.0 / 3.0});
  PhysicalField th(g, 4);
  th.fill([](int c, double x1, double x2, double) { return c == 3 ? oseen(x1, x2).phi0 : 0.0; });
  SimState s;
  s.v = to_spectral(th);
  s.params = {0.0, 0.0, 1.0};
  StepperConfig cfg;
  cfg.dt = 0.1;
  cfg.linear_only = true;
  Stepper st(g, s.params, cfg);
  for (int k = 0; k < 10; ++k) st.step(s);
  const PhysicalField out = to_physical(s.v);
  double worst = 0.0;
  for (int j2 = 0; j2 < g->n(); ++j2)
    for (int j1 = 0; j1 < g->n(); ++j1) {
      const double x1 = g->x(j1), x2 = g->x(j2);
      const double exact = std::exp(-(x1 * x1 + x2 * x2) / 8.0) / (8 * kPi);
      worst = std::max(worst, std::abs(out.at(3, 1, j2, j1) - exact));
    }
  EXPECT_LT(worst, 1e-8);
}

TEST(Step, InviscidEnergyDrift) {
  const GridPtr g = make_grid({2 * kPi, 16, 8, Boundary::periodic, 2.0 / 3.0});
  const SimState s0 = mixed_state(g, {1.0, 2.0, 0.0}, 0.5, 9);
  const double T = 0.5;
  const SimState s1 = run_to(s0, T, 0.005);
  const double e0 = l2_norm(s0.v), e1 = l2_norm(s1.v);
  EXPECT_LT(std::abs(e1 - e0) / e0 / T, 1e-6);
}

TEST(Integrate, ZeroHorizonRecordsInitialData) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SimState s = mixed_state(g, {1.0, 2.0, 1.0}, 1.0, 10);
  RunControl ctl;
  ctl.T = 0.0;
  ctl.keep_snapshots = true;
  const Trajectory tr = integrate(s, StepperConfig{0.01}, ctl);
  ASSERT_EQ(tr.times.size(), 1u);
  EXPECT_EQ(tr.times[0], 0.0);
  ASSERT_EQ(tr.snapshots.size(), 1u);
  EXPECT_EQ(test::max_diff(tr.snapshots[0].v, s.v), 0.0);
  EXPECT_EQ(tr.steps, 0u);
}

TEST(Integrate, SamplesAndDtDividesInterval) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SimState s = mixed_state(g, {1.0, 2.0, 1.0}, 1.0, 11);
  RunControl ctl;
  ctl.T = 0.3;
  ctl.output_interval = 0.1;
  const Trajectory tr = integrate(s, StepperConfig{0.03}, ctl);
  ASSERT_EQ(tr.times.size(), 4u);
  EXPECT_NEAR(tr.times[3], 0.3, 1e-15);
  EXPECT_NEAR(0.1 / tr.dt, std::round(0.1 / tr.dt), 1e-9);
  EXPECT_LE(tr.dt, 0.03);
  EXPECT_EQ(tr.series.at("vt_L2").size(), 4u);
  ctl.output_interval = 0.07;
  EXPECT_THROW(integrate(s, StepperConfig{0.01}, ctl), Error);
}

TEST(Integrate, BlowUpGuard) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SimState s = mixed_state(g, {1.0, 2.0, 0.0}, 1.0, 12);
  s.v.at(0, 1, 1, 1) = std::numeric_limits<double>::quiet_NaN();
  RunControl ctl;
  ctl.T = 0.1;
  ctl.output_interval = 0.1;
  try {
    integrate(s, StepperConfig{0.05}, ctl);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::nan_detected);
  }
}

TEST(Integrate, MomentsConservedInFullField) {
  const GridPtr g = make_grid({12.0, 32, 4, Boundary::periodic, 2.0 / 3.0});
  const PhysParams p{1.0, 3.0, 1.0};
  SimState s = mixed_state(g, p, 0.3, 13);
  s.v += sample_vortex(g, {0.0, 1.0, 0.5, p.Gamma}, 0.0, true);
  RunControl ctl;
  ctl.T = 1.0;
  ctl.output_interval = 0.25;
  const Trajectory tr = integrate(s, StepperConfig{0.01}, ctl);
  for (const char* name : {"A", "B1_rot", "B2_rot"}) {
    const auto& v = tr.series.at(name);
    for (double x : v) EXPECT_NEAR(x, v.front(), 1e-8) << name;
  }
  EXPECT_GT(std::abs(tr.series.at("B1").back() - tr.series.at("B1").front()), 1e-3);
}

TEST(Integrate, BackgroundModeStaysOnFamily) {
  const GridPtr g = make_grid({20.0, 64, 4, Boundary::periodic, 2.0 / 3.0});
  SimState s;
  s.v = SpectralField(g, 4);
  s.formulation = Formulation::background_perturbation;
  s.background = {1.0, 1.0, 0.0, 2.0};
  s.params = {1.0, 2.0, 1.0};
  RunControl ctl;
  ctl.T = 0.5;
  ctl.output_interval = 0.5;
  ctl.keep_snapshots = true;
  const Trajectory tr = integrate(s, StepperConfig{0.05}, ctl);
  EXPECT_LT(tr.snapshots.back().v.max_abs(), 1e-12);
}

TEST(Integrate, DtFromCfl) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SimState rest;
  rest.v = SpectralField(g, 4);
  EXPECT_EQ(choose_dt(rest, 0.5, 0.2), 0.2);
  const SimState s = mixed_state(g, {1.0, 2.0, 1.0}, 1.0, 14);
  const double dt = choose_dt(s, 0.5, 0.2);
  EXPECT_LE(dt, 0.5 * (2 * kPi / 16) / max_velocity(s) * (1 + 1e-12));
  EXPECT_NEAR(0.2 / dt, std::round(0.2 / dt), 1e-9);
}

TEST(LambdaR, BandLimitedDataHasNoRemainder) {
  const GridPtr g = make_grid({2 * kPi, 16, 4, Boundary::periodic, 2.0 / 3.0});
  const PhysParams p{1.0, 2.0, 1.0};
  const SpectralField v0 = baroclinic_part(mixed_state(g, p, 1.0, 15).v);
  const LambdaRSplit lin = lambda_r_split(v0, 12.0, p, 0.2, 0.02, true);
  ASSERT_EQ(lin.times.size(), 11u);
  EXPECT_EQ(lin.r.front().max_abs(), 0.0);
  const double h0 = h1_norm(lin.lambda.front()), l0 = l2_norm(lin.lambda.front());
  const double lambda_min = 4 * kPi * kPi;
  double prev = h0;
  for (std::size_t i = 0; i < lin.times.size(); ++i) {
    EXPECT_LT(lin.r[i].max_abs(), 1e-12 * v0.max_abs());
    const double h = h1_norm(lin.lambda[i]);
    EXPECT_LE(h, prev * (1 + 1e-12));
    prev = h;
    EXPECT_LE(l2_norm(lin.lambda[i]), std::exp(-lambda_min * lin.times[i]) * l0 * (1 + 1e-12));
  }
  const LambdaRSplit nl = lambda_r_split(v0, 12.0, p, 0.2, 0.02, false);
  EXPECT_EQ(nl.r.front().max_abs(), 0.0);
  EXPECT_GT(nl.r.back().max_abs(), 0.0);
}
