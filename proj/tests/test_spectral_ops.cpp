#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "bvx/error.hpp"
#include "bvx/reference.hpp"
#include "bvx/spectral_ops.hpp"
#include "test_util.hpp"

using namespace bvx;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr grid(Boundary bc = Boundary::periodic, double L = 5.0, int N = 16, int Nv = 8) {
  return make_grid({L, N, Nv, bc, 2.0 / 3.0});
}

SpectralField gaussian_plane(const GridPtr& g) {
  PhysicalField p(g, 1, Layout::plane);
  p.fill([](int, double x1, double x2, double) { return oseen(x1, x2).phi0; });
  return to_spectral(p);
}

}  // namespace

TEST(VerticalMean, ProjectionProperties) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const SpectralField s = test::random_field(grid(bc), 4, 11);
    const SpectralField q = vertical_mean(s);
    const SpectralField r = baroclinic_part(s);
    EXPECT_LT(test::max_diff(q + r, s), 1e-15);
    EXPECT_LT(test::max_diff(vertical_mean(q), q), 1e-15);
    EXPECT_LT(vertical_mean(r).max_abs(), 1e-15);
    EXPECT_LT(baroclinic_part(q).max_abs(), 1e-15);
  }
}

TEST(VerticalMean, IndependentFieldHasNoBaroclinicPart) {
  const GridPtr g = grid();
  PhysicalField p(g, 4);
  p.fill([](int c, double x1, double x2, double) { return std::sin(x1 * (c + 1) * 2 * kPi / 5.0) + x2 * 0.0; });
  EXPECT_LT(baroclinic_part(to_spectral(p)).max_abs(), 1e-14);
}

TEST(VerticalMean, VerticalSineHasNoMean) {
  const GridPtr g = grid();
  PhysicalField p(g, 4);
  p.fill([](int c, double, double, double x3) { return c == 2 ? std::sin(2 * kPi * x3) : 0.0; });
  EXPECT_LT(vertical_mean(to_spectral(p)).max_abs(), 1e-15);
}

TEST(VerticalMean, StressFreeDropsOddComponents) {
  const SpectralField s = test::random_field(grid(Boundary::stress_free), 4, 5);
  const SpectralField q = vertical_mean(s);
  for (int c : {2, 3})
    for (const cplx& z : q.component(c)) EXPECT_EQ(std::abs(z), 0.0);
}

TEST(Planes, ExtractEmbedRoundTrip) {
  const SpectralField s = test::random_field(grid(), 4, 12);
  const SpectralField plane = extract_plane(s);
  EXPECT_EQ(plane.layout(), Layout::plane);
  SpectralField v(s.grid_ptr(), 4);
  embed_plane(plane, v);
  EXPECT_LT(test::max_diff(v, vertical_mean(s)), 1e-15);
}

TEST(Derivatives, CurlOfGradientAndDivOfCurlVanish) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = grid(bc);
    const SpectralField f = test::random_field(g, 1, 2);
    EXPECT_LT(curl(gradient(f)).max_abs(), 1e-12);
    const SpectralField u = test::random_field(g, 4, 3);
    EXPECT_LT(divergence(curl(u)).max_abs(), 1e-12);
  }
}

TEST(Derivatives, SkewGradientIsSolenoidal) {
  const GridPtr g = grid();
  const SpectralField f = test::random_field(g, 1, 4, Layout::plane);
  const SpectralField sg = skew_gradient(f);
  EXPECT_LT(divergence(sg).max_abs(), 1e-13);
  // curl2 of the skew gradient is -laplacian f.
  const SpectralField w = curl2(sg);
  for_each_mode(*g, 1, [&](std::size_t i, int, int, int, const Wavevector& k) {
    EXPECT_NEAR(std::abs(w.component(0)[i] - k.kh2() * f.component(0)[i]), 0.0, 1e-12);
  });
}

TEST(Derivatives, CurlOfSingleModeByHand) {
  const GridPtr g = grid(Boundary::periodic, 2 * kPi, 8, 4);
  SpectralField u(g, 3);
  u.at(1, 0, 0, 1) = 1.0;  // u = (0, 1, 0) e^{i x1}
  const SpectralField w = curl(u);
  EXPECT_NEAR(std::abs(w.at(2, 0, 0, 1) - cplx(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_EQ(std::abs(w.at(0, 0, 0, 1)), 0.0);
  EXPECT_EQ(std::abs(w.at(1, 0, 0, 1)), 0.0);
}

TEST(Norms, ParsevalMatchesQuadrature) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const SpectralField s = test::random_field(grid(bc), 4, 21);
    const double l2 = l2_norm(s);
    EXPECT_NEAR(weighted_norm(s, 0.0, 2.0), l2, 1e-10 * l2);
  }
}

TEST(Norms, H1CombinesGradient) {
  const SpectralField s = test::random_field(grid(), 4, 22);
  EXPECT_NEAR(h1_norm(s), std::sqrt(l2_norm(s) * l2_norm(s) + gradient_norm2(s)), 1e-12 * h1_norm(s));
  EXPECT_GT(gradient_norm2(s), 0.0);
}

TEST(Norms, GaussianHasUnitMass) {
  const GridPtr g = grid(Boundary::periodic, 24.0, 128, 4);
  EXPECT_NEAR(weighted_norm(gaussian_plane(g), 0.0, 1.0), 1.0, 1e-6);
}

TEST(Norms, WeightedGaussianMatchesRadialIntegral) {
  // |phi0|^2_{L2(2)} = int (1+r^2)^2 e^{-r^2/2} 2 pi r dr / (16 pi^2) = 26 / (16 pi).
  const GridPtr g = grid(Boundary::periodic, 40.0, 256, 4);
  const double oracle = std::sqrt(26.0 / (16.0 * kPi));
  EXPECT_NEAR(weighted_norm(gaussian_plane(g), 2.0, 2.0), oracle, 1e-6);
  const double sup = weighted_norm(gaussian_plane(g), 0.0, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(sup, 1.0 / (4 * kPi), 1e-3);
}

TEST(Norms, InvalidExponents) {
  const SpectralField s = test::random_field(grid(), 1, 1);
  EXPECT_THROW(weighted_norm(s, 0.0, 0.5), Error);
  EXPECT_THROW(weighted_norm(s, -1.0, 2.0), Error);
}

TEST(Moments, VortexFamily) {
  const GridPtr g = grid(Boundary::periodic, 40.0, 128, 4);
  const SpectralField v = sample_vortex(g, {0.0, 1.0, 0.0, 1.0}, 0.0, false);
  const Moments m = moments(v, {2.0, 0.0, 0.0});
  EXPECT_NEAR(m.A, 2.0, 1e-6);
  EXPECT_NEAR(m.B1, 1.0, 1e-6);
  EXPECT_NEAR(m.B2, 0.0, 1e-6);
}

TEST(Moments, ZeroAndBaroclinicFields) {
  const GridPtr g = grid();
  const Moments z = moments(SpectralField(g, 4));
  EXPECT_EQ(z.A, 0.0);
  EXPECT_EQ(z.B1, 0.0);
  EXPECT_EQ(z.B2, 0.0);
  const Moments b = moments(baroclinic_part(test::random_field(g, 4, 8)));
  EXPECT_EQ(b.B1, 0.0);
  EXPECT_EQ(b.B2, 0.0);
}

TEST(Parity, PreservedByOperators) {
  const GridPtr g = grid(Boundary::stress_free);
  const SpectralField s = test::random_field(g, 4, 31);
  for (const SpectralField& t : {vertical_mean(s), baroclinic_part(s), 2.0 * s + s}) {
    SpectralField p = t;
    enforce_parity(p, kStateParity);
    EXPECT_LT(test::max_diff(p, t), 1e-15);
  }
}
