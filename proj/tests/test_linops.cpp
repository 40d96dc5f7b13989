#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "bvx/error.hpp"
#include "bvx/linops.hpp"
#include "bvx/spectral_ops.hpp"
#include "test_util.hpp"

using namespace bvx;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix4cd to_eigen(const Mat4& m) {
  Eigen::Matrix4cd e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e(i, j) = m[i][j];
  return e;
}

Eigen::Vector4cd to_eigen(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

/// Dense exponential of the generator -nu|k|^2 + Gamma M, M in the exponential basis.
Eigen::Matrix4cd dense_expm(const Wavevector& k, const PhysParams& p, double dt) {
  const Eigen::Matrix4cd gen =
      -p.nu * k.norm2() * Eigen::Matrix4cd::Identity() + p.Gamma * to_eigen(skew_matrix(k, p.eta()));
  return (gen * dt).exp();
}

Wavevector random_k(std::mt19937_64& rng, Boundary bc) {
  std::uniform_int_distribution<int> m(-6, 6);
  const double kz = bc == Boundary::periodic ? 2 * kPi : kPi;
  Wavevector k{0.7 * m(rng), 0.7 * m(rng), kz * m(rng)};
  if (k.norm2() == 0.0) k.k1 = 0.7;
  return k;
}

/// Single-mode field v0 placed at (iz, j2, j1) with Hermitian partner.
SpectralField single_mode(const GridPtr& g, int iz, int j2, int j1, const Vec4& a) {
  SpectralField s(g, 4);
  for (int c = 0; c < 4; ++c) s.at(c, iz, j2, j1) = a[c];
  enforce_hermitian(s);
  return s;
}

}  // namespace

TEST(Params, EtaAndValidation) {
  EXPECT_DOUBLE_EQ((PhysParams{3.0, 2.0, 1.0}.eta()), 1.5);
  EXPECT_THROW((PhysParams{1.0, 0.0, 1.0}.eta()), Error);
}

TEST(Helmholtz, KillsGradientAndKeepsTransverse) {
  const GridPtr g = make_grid({2 * kPi, 8, 4, Boundary::periodic, 2.0 / 3.0});
  // k = (1, 2, 2 pi)
  const Wavevector k = g->wavevector(1, 2, 1, 4);
  SpectralField grad(g, 4);
  grad.at(0, 1, 2, 1) = k.k1;
  grad.at(1, 1, 2, 1) = k.k2;
  grad.at(2, 1, 2, 1) = k.k3;
  EXPECT_LT(helmholtz_project(grad).max_abs(), 1e-14);

  SpectralField perp(g, 4);
  perp.at(0, 1, 2, 1) = k.k2;
  perp.at(1, 1, 2, 1) = -k.k1;
  perp.at(3, 1, 2, 1) = 0.3;
  EXPECT_LT(test::max_diff(helmholtz_project(perp), perp), 1e-14);
}

TEST(Helmholtz, IdempotentAndSolenoidal) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = make_grid({5.0, 16, 8, bc, 2.0 / 3.0});
    const SpectralField s = test::random_field(g, 4, 17);
    const SpectralField p = helmholtz_project(s);
    EXPECT_LT(test::max_diff(helmholtz_project(p), p), 1e-12);
    EXPECT_LT(divergence(p).max_abs(), 1e-12);
    // Temperature untouched.
    for (std::size_t i = 0; i < s.modes(); ++i) EXPECT_EQ(p.component(3)[i], s.component(3)[i]);
  }
}

TEST(PjpMatrix, PrintedExamples) {
  const PhysParams p{2.0, 1.0, 1.0};  // eta = 2
  const Mat4 m = pjp_matrix({0.0, 0.0, 2 * kPi}, p, Boundary::periodic);
  const double expected[4][4] = {{0, 2, 0, 0}, {-2, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(m[i][j] - expected[i][j]), 0.0, 1e-14) << i << j;

  const Mat4 n0 = pjp_matrix({1.3, -0.4, 0.0}, p, Boundary::periodic);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double want = (i == 2 && j == 3) ? 1.0 : (i == 3 && j == 2) ? -1.0 : 0.0;
      EXPECT_NEAR(std::abs(n0[i][j] - want), 0.0, 1e-14) << i << j;
    }
  EXPECT_THROW(pjp_matrix({0, 0, 0}, p, Boundary::periodic), Error);
}

TEST(PjpMatrix, SkewHermitian) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> eta(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Boundary bc = trial % 2 ? Boundary::periodic : Boundary::stress_free;
    const PhysParams p{eta(rng), 1.0, 1.0};
    const Eigen::Matrix4cd m = to_eigen(pjp_matrix(random_k(rng, bc), p, bc));
    EXPECT_LT((m + m.adjoint()).norm(), 1e-13);
  }
}

TEST(ModeFrame, PEtaExamples) {
  const PhysParams unit{1.0, 1.0, 1.0};
  EXPECT_NEAR(mode_frame({0.3, 1.1, 2 * kPi}, unit, Boundary::periodic).p_eta, 1.0, 1e-14);
  const PhysParams zero{0.0, 1.0, 1.0};
  EXPECT_NEAR(mode_frame({1.0, 0.0, 2 * kPi}, zero, Boundary::periodic).p_eta, 1.0 / std::sqrt(1 + 4 * kPi * kPi),
              1e-15);
  EXPECT_THROW(mode_frame({0, 0, 0}, unit, Boundary::periodic), Error);
}

TEST(ModeFrame, EigenIdentitiesRandomized) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> eta(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Boundary bc = trial % 2 ? Boundary::periodic : Boundary::stress_free;
    Wavevector k = random_k(rng, bc);
    if (trial % 7 == 0) k.k1 = k.k2 = 0.0;
    if (k.norm2() == 0.0) k.k3 = 2 * kPi;
    if (trial % 11 == 0) k.k3 = 0.0;
    if (k.norm2() == 0.0) k.k1 = 1.0;
    const PhysParams p{eta(rng), 1.0, 1.0};
    const ModeFrame f = mode_frame(k, p, bc);
    const Eigen::Matrix4cd M = to_eigen(skew_matrix(k, p.eta()));
    const Eigen::Vector4cd ag = to_eigen(f.a_g), a0 = to_eigen(f.a_0), ap = to_eigen(f.a_plus),
                           am = to_eigen(f.a_minus);
    Eigen::Matrix4cd basis;
    basis << ag, a0, ap, am;
    EXPECT_LT((basis.adjoint() * basis - Eigen::Matrix4cd::Identity()).norm(), 1e-12);
    EXPECT_LT((am - ap.conjugate()).norm(), 1e-12);
    EXPECT_LT((M * ag).norm(), 1e-12);
    EXPECT_LT((M * a0).norm(), 1e-12);
    const cplx ip(0.0, f.p_eta);
    EXPECT_LT((M * ap - ip * ap).norm(), 1e-12);
    EXPECT_LT((M * am + ip * am).norm(), 1e-12);
  }
}

TEST(ModeFrame, StressFreePrintedBasis) {
  // In the sine/cosine basis the printed matrix has D a_+ as its +ip eigenvector.
  const PhysParams p{0.7, 1.0, 1.0};
  const Wavevector k{1.4, -0.7, 2 * kPi};
  const Eigen::Matrix4cd printed = to_eigen(pjp_matrix(k, p, Boundary::stress_free));
  const ModeFrame f = mode_frame(k, p, Boundary::stress_free);
  const Eigen::Vector4cd v = to_eigen(to_sine_cosine(f.a_plus));
  EXPECT_LT((printed * v - cplx(0.0, f.p_eta) * v).norm(), 1e-12);
}

TEST(Geostrophic, ProjectorProperties) {
  const GridPtr g = make_grid({6.0, 16, 8, Boundary::periodic, 2.0 / 3.0});
  const PhysParams p{1.5, 1.0, 1.0};
  const SpectralField f = helmholtz_project(test::random_field(g, 4, 41));
  const SpectralField sf = geostrophic_project(f, p);
  EXPECT_LT(test::max_diff(geostrophic_project(sf, p), sf), 1e-12);
  const SpectralField rest = ageostrophic_part(f, p);
  EXPECT_LT(test::max_diff(sf + rest, f), 1e-14);
  const double a = l2_norm(sf), b = l2_norm(rest), c = l2_norm(f);
  EXPECT_NEAR(a * a + b * b, c * c, 1e-12 * c * c);
}

TEST(Geostrophic, SingleModeEigenvectors) {
  const GridPtr g = make_grid({6.0, 16, 8, Boundary::periodic, 2.0 / 3.0});
  const PhysParams p{1.5, 1.0, 1.0};
  const Wavevector k = g->wavevector(1, 2, 3, 8);
  const ModeFrame fr = mode_frame(k, p, Boundary::periodic);
  const SpectralField ag = single_mode(g, 1, 2, 3, fr.a_g);
  EXPECT_LT(test::max_diff(geostrophic_project(ag, p), ag), 1e-14);
  const SpectralField ap = single_mode(g, 1, 2, 3, fr.a_plus);
  EXPECT_LT(geostrophic_project(ap, p).max_abs(), 1e-14);
}

TEST(Band, ProfileAndProjection) {
  EXPECT_EQ(band_profile(0.0), 1.0);
  EXPECT_EQ(band_profile(1.0), 1.0);
  EXPECT_EQ(band_profile(2.0), 0.0);
  EXPECT_EQ(band_profile(3.0), 0.0);
  EXPECT_NEAR(band_profile(1.5), 0.5, 1e-15);
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    const double v = band_profile(r);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
  }

  const GridPtr g = make_grid({2 * kPi, 32, 8, Boundary::periodic, 2.0 / 3.0});
  const SpectralField s = test::random_field(g, 4, 2);
  const double R = 3.0;
  const SpectralField pr = band_project(s, R);
  EXPECT_LE(l2_norm(pr), l2_norm(s));
  for_each_mode(*g, 8, [&](std::size_t i, int, int, int, const Wavevector& k) {
    const double kn = std::sqrt(k.norm2());
    for (int c = 0; c < 4; ++c) {
      if (kn <= R) EXPECT_EQ(pr.component(c)[i], s.component(c)[i]);
      if (kn >= 2 * R) EXPECT_EQ(std::abs(pr.component(c)[i]), 0.0);
    }
  });
}

TEST(Propagator, MatchesDenseExponential) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Boundary bc = trial % 2 ? Boundary::periodic : Boundary::stress_free;
    const PhysParams p{u(rng), 3.0 + u(rng), 0.5 + 0.2 * (trial % 3)};
    const Wavevector k = random_k(rng, bc);
    const double dt = 0.05 + 0.01 * (trial % 10);
    const Eigen::Matrix4cd oracle = dense_expm(k, p, dt);
    EXPECT_LT((to_eigen(linear_propagator(k, p, dt, bc)) - oracle).norm(), 1e-10);
    const auto e = propagator_entries(k, p, dt);
    Eigen::Matrix4cd er;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) er(i, j) = e[4 * i + j];
    EXPECT_LT((er - oracle).norm(), 1e-10);
  }
}

TEST(Propagator, PlusBranchPhaseAndAmplitude) {
  const PhysParams p{0.0, 10.0, 1.0};
  const Wavevector k{1.0, 0.0, 2 * kPi};
  const ModeFrame f = mode_frame(k, p, Boundary::periodic);
  const Eigen::Vector4cd a = to_eigen(f.a_plus);
  const Eigen::Vector4cd out = to_eigen(linear_propagator(k, p, 0.1, Boundary::periodic)) * a;
  const cplx factor = a.dot(out);  // <a, E a>
  EXPECT_NEAR(std::abs(factor), std::exp(-0.1 * (1 + 4 * kPi * kPi)), 1e-12);
  EXPECT_NEAR(std::arg(factor), 10.0 * f.p_eta * 0.1, 1e-12);
  EXPECT_NEAR(f.p_eta, 1.0 / std::sqrt(1 + 4 * kPi * kPi), 1e-15);

  const Eigen::Vector4cd g = to_eigen(f.a_g);
  const cplx gf = g.dot(to_eigen(linear_propagator(k, p, 0.1, Boundary::periodic)) * g);
  EXPECT_NEAR(gf.real(), std::exp(-0.1 * (1 + 4 * kPi * kPi)), 1e-12);
  EXPECT_NEAR(gf.imag(), 0.0, 1e-14);
}

TEST(Propagator, IdentityAtZeroStepAndMeanRotation) {
  const PhysParams p{0.8, 2.0, 1.0};
  const Eigen::Matrix4cd id = to_eigen(linear_propagator({1.0, 2.0, 2 * kPi}, p, 0.0, Boundary::periodic));
  EXPECT_LT((id - Eigen::Matrix4cd::Identity()).norm(), 1e-14);
  // k = 0: exp(-J t) rotates (u3, theta) at rate Gamma.
  const Mat4 m0 = linear_propagator({0, 0, 0}, p, 0.3, Boundary::periodic);
  EXPECT_NEAR(m0[2][2].real(), std::cos(0.6), 1e-14);
  EXPECT_NEAR(std::abs(m0[2][3]), std::sin(0.6), 1e-14);
}

TEST(Propagator, GroupPropertyAndCommutesWithS) {
  const GridPtr g = make_grid({6.0, 16, 8, Boundary::periodic, 2.0 / 3.0});
  const PhysParams p{1.2, 3.0, 0.7};
  const SpectralField f = helmholtz_project(test::random_field(g, 4, 50));
  const Propagator a(g, p, 0.03), b(g, p, 0.05), ab(g, p, 0.08);
  SpectralField x = f;
  a.apply(x);
  b.apply(x);
  SpectralField y;
  ab.apply(f, y);
  EXPECT_LT(test::max_diff(x, y), 1e-12 * f.max_abs());

  SpectralField es;
  ab.apply(geostrophic_project(f, p), es);
  EXPECT_LT(test::max_diff(geostrophic_project(y, p), es), 1e-10 * f.max_abs());
}

TEST(Propagator, InviscidFlowConservesNorm) {
  for (Boundary bc : {Boundary::periodic, Boundary::stress_free}) {
    const GridPtr g = make_grid({6.0, 16, 8, bc, 2.0 / 3.0});
    const PhysParams p{0.4, 5.0, 0.0};
    const SpectralField f = helmholtz_project(test::random_field(g, 4, 60));
    for (double dt : {0.1, 1.0, 17.3}) {
      const SpectralField out = apply_propagator(f, p, dt);
      EXPECT_NEAR(l2_norm(out), l2_norm(f), 1e-10 * l2_norm(f));
    }
  }
}

TEST(RotateFrame, Examples) {
  const std::array<double, 2> x{0.3, -1.2};
  const auto r0 = rotate_frame(x, 0.0);
  EXPECT_EQ(r0[0], x[0]);
  EXPECT_EQ(r0[1], x[1]);
  const auto r90 = rotate_frame(x, kPi / 2);
  EXPECT_NEAR(r90[0], x[1], 1e-15);
  EXPECT_NEAR(r90[1], -x[0], 1e-15);

  const GridPtr g = make_grid({6.0, 16, 4, Boundary::periodic, 2.0 / 3.0});
  const SpectralField pair = test::random_field(g, 4, 70, Layout::plane);
  const SpectralField back = rotate_frame(rotate_frame(pair, 0.77), -0.77);
  EXPECT_LT(test::max_diff(back, pair), 1e-12);
  EXPECT_NEAR(l2_norm(rotate_frame(pair, 1.3)), l2_norm(pair), 1e-12 * l2_norm(pair));
  const SpectralField q = rotate_frame(pair, kPi / 2);
  for (std::size_t i = 0; i < pair.modes(); ++i) {
    EXPECT_NEAR(std::abs(q.component(0)[i] - pair.component(2)[i]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(q.component(2)[i] + pair.component(0)[i]), 0.0, 1e-15);
  }
}
