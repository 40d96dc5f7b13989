#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "bvx/biotsavart.hpp"
#include "bvx/error.hpp"
#include "bvx/linops.hpp"
#include "bvx/reference.hpp"
#include "bvx/spectral_ops.hpp"
#include "test_util.hpp"

using namespace bvx;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField solenoidal_baroclinic_vorticity(const GridPtr& g, std::uint64_t seed) {
  SpectralField w = curl(test::random_field(g, 4, seed));
  return baroclinic_part(w);
}

SpectralField mean_free(SpectralField f) {
  f.at(0, 0, 0, 0) = 0.0;
  return f;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::io_error;
}

}  // namespace

TEST(BiotSavart3d, InvertsCurl) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = make_grid({5.0, 16, 8, bc, 2.0 / 3.0});
    const SpectralField w = solenoidal_baroclinic_vorticity(g, 1);
    const SpectralField u = velocity_from_vorticity_3d(w);
    EXPECT_LT(test::max_diff(curl(u), w), 1e-12 * w.max_abs());
    EXPECT_LT(divergence(u).max_abs(), 1e-12 * w.max_abs());
  }
}

TEST(BiotSavart3d, SingleModeByHand) {
  const GridPtr g = make_grid({2 * kPi, 8, 4, Boundary::periodic, 2.0 / 3.0});
  SpectralField w(g, 3);
  w.at(1, 1, 0, 1) = 1.0;  // omega = (0, 1, 0) at k = (1, 0, 2 pi)
  const SpectralField u = velocity_from_vorticity_3d(w);
  // u = i k x omega / |k|^2 = i (-2 pi, 0, 1) / (1 + 4 pi^2)
  const double d = 1.0 + 4 * kPi * kPi;
  EXPECT_NEAR(std::abs(u.at(0, 1, 0, 1) - cplx(0.0, -2 * kPi / d)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u.at(1, 1, 0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u.at(2, 1, 0, 1) - cplx(0.0, 1.0 / d)), 0.0, 1e-15);
}

TEST(BiotSavart3d, PoincareBound) {
  const GridPtr g = make_grid({2.0, 16, 8, Boundary::periodic, 2.0 / 3.0});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SpectralField w = solenoidal_baroclinic_vorticity(g, seed);
    EXPECT_LE(l2_norm(velocity_from_vorticity_3d(w)), l2_norm(w) / (2 * kPi) * (1 + 1e-12));
  }
}

TEST(BiotSavart3d, RejectsBarotropicContent) {
  const GridPtr g = make_grid({5.0, 16, 8, Boundary::periodic, 2.0 / 3.0});
  const SpectralField w = curl(test::random_field(g, 4, 3));
  EXPECT_EQ(kind_of([&] { velocity_from_vorticity_3d(w); }), ErrorKind::nonzero_barotropic);
}

TEST(BiotSavart2d, InvertsCurl2) {
  const GridPtr g = make_grid({7.0, 32, 4, Boundary::periodic, 2.0 / 3.0});
  const SpectralField f = mean_free(test::random_field(g, 1, 4, Layout::plane));
  const SpectralField u = velocity2d_from_vorticity(f);
  EXPECT_LT(test::max_diff(curl2(u), f), 1e-12 * f.max_abs());
  EXPECT_LT(divergence(u).max_abs(), 1e-12 * f.max_abs());
  EXPECT_EQ(std::abs(u.at(0, 0, 0, 0)), 0.0);
  EXPECT_EQ(std::abs(u.at(1, 0, 0, 0)), 0.0);
}

TEST(BiotSavart2d, OseenPair) {
  const double L = 40.0;
  const GridPtr g = make_grid({L, 256, 4, Boundary::periodic, 2.0 / 3.0});
  PhysicalField p(g, 1, Layout::plane);
  p.fill([](int, double x1, double x2, double) { return oseen(x1, x2).phi0; });
  const SpectralField w = mean_free(to_spectral(p));
  const PhysicalField u = to_physical(velocity2d_from_vorticity(w));
  // On the torus the mean-free vorticity carries a uniform background -1/L^2,
  // whose solid-body velocity is (x2, -x1) / (2 L^2).
  double worst = 0.0;
  for (int j2 = 0; j2 < g->n(); ++j2)
    for (int j1 = 0; j1 < g->n(); ++j1) {
      const double x1 = g->x(j1), x2 = g->x(j2);
      if (x1 * x1 + x2 * x2 > 9.0) continue;
      const OseenValue o = oseen(x1, x2);
      const double r1 = o.u0[0] + x2 / (2 * L * L), r2 = o.u0[1] - x1 / (2 * L * L);
      worst = std::max({worst, std::abs(u.at(0, 0, j2, j1) - r1), std::abs(u.at(1, 0, j2, j1) - r2)});
    }
  EXPECT_LT(worst, 1e-5);
}

TEST(BiotSavart2d, LebesgueRatioStableAcrossResolutions) {
  // |u_h|_L4 <= C |omega|_L4/3: the measured constant is bounded and does not
  // grow with resolution.
  std::vector<double> worst;
  for (int N : {32, 64}) {
    const GridPtr g = make_grid({10.0, N, 4, Boundary::periodic, 2.0 / 3.0});
    double w = 0.0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const SpectralField f = mean_free(test::random_field(g, 1, seed, Layout::plane));
      const double ratio = weighted_norm(velocity2d_from_vorticity(f), 0.0, 4.0) / weighted_norm(f, 0.0, 4.0 / 3.0);
      ASSERT_TRUE(std::isfinite(ratio));
      w = std::max(w, ratio);
    }
    worst.push_back(w);
  }
  EXPECT_LT(worst[1], 2.0 * worst[0]);
  EXPECT_LT(worst[0], 10.0);
}

TEST(BiotSavart2d, RejectsNonzeroMean) {
  const GridPtr g = make_grid({7.0, 16, 4, Boundary::periodic, 2.0 / 3.0});
  SpectralField f(g, 1, Layout::plane);
  f.at(0, 0, 0, 0) = 1.0;
  EXPECT_EQ(kind_of([&] { velocity2d_from_vorticity(f); }), ErrorKind::nonzero_mean);
}

TEST(Potential, RoundTripWithMean) {
  const GridPtr g = make_grid({7.0, 32, 4, Boundary::periodic, 2.0 / 3.0});
  const SpectralField f = test::random_field(g, 1, 9, Layout::plane);
  const SpectralField back = potential_from_skew_gradient(skew_gradient(f), f.at(0, 0, 0, 0).real());
  EXPECT_LT(test::max_diff(back, f), 1e-12 * f.max_abs());
  const SpectralField three = potential_from_skew_gradient(skew_gradient(f), 3.0);
  EXPECT_EQ(three.at(0, 0, 0, 0), cplx(3.0, 0.0));
}

TEST(Potential, RecoversGaussian) {
  const GridPtr g = make_grid({30.0, 128, 4, Boundary::periodic, 2.0 / 3.0});
  PhysicalField p(g, 1, Layout::plane);
  p.fill([](int, double x1, double x2, double) { return oseen(x1, x2).phi0; });
  const SpectralField phi = to_spectral(p);
  const SpectralField back = potential_from_skew_gradient(skew_gradient(phi), phi.at(0, 0, 0, 0).real() + 0.5);
  SpectralField shifted = phi;
  shifted.at(0, 0, 0, 0) += 0.5;
  EXPECT_LT(test::max_diff(back, shifted), 1e-12);
}

TEST(Potential, RejectsGradientInput) {
  const GridPtr g = make_grid({7.0, 16, 4, Boundary::periodic, 2.0 / 3.0});
  const SpectralField f = test::random_field(g, 1, 2, Layout::plane);
  const SpectralField grad = gradient(f);
  SpectralField g2(g, 2, Layout::plane);
  for (std::size_t i = 0; i < g2.modes(); ++i) {
    g2.component(0)[i] = grad.component(0)[i];
    g2.component(1)[i] = grad.component(1)[i];
  }
  EXPECT_EQ(kind_of([&] { potential_from_skew_gradient(g2, 0.0); }), ErrorKind::nonsolenoidal);
}

TEST(VorticityForm, RoundTrip) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = make_grid({6.0, 16, 8, bc, 2.0 / 3.0});
    SpectralField v = helmholtz_project(test::random_field(g, 4, 13));
    // Mean-free barotropic vorticity is automatic on the torus.
    const VorticityState w = to_vorticity(v);
    EXPECT_LT(divergence(w.omega_h_bar).max_abs(), 1e-12);
    EXPECT_LT(divergence(w.Theta_bar).max_abs(), 1e-12);
    EXPECT_LT(std::abs(w.omega3_bar.at(0, 0, 0, 0)), 1e-15);
    EXPECT_LT(divergence(w.omega_tilde).max_abs(), 1e-12);
    // The barotropic horizontal velocity has no zero mode in this gauge.
    v.at(0, 0, 0, 0) = 0.0;
    v.at(1, 0, 0, 0) = 0.0;
    EXPECT_LT(test::max_diff(from_vorticity(w), v), 1e-12 * v.max_abs());
  }
}
