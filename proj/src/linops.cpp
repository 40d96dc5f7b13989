#include "bvx/linops.hpp"

#include <cmath>
#include <numbers>

#include "bvx/error.hpp"

namespace bvx {

namespace {

constexpr cplx I{0.0, 1.0};

double sign_or_one(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Real generator Gamma*M for k != 0, written in Omega and Gamma so that
// Gamma = 0 is allowed.
std::array<double, 16> generator(const Wavevector& k, double Omega, double Gamma) {
  const double k2n = k.norm2();
  const double kh2 = k.kh2();
  const double a = k.k1, b = k.k2, c = k.k3;
  const double s = 1.0 / k2n;
  return {0.0,
          s * c * c * Omega,
          -s * c * b * Omega,
          -s * c * a * Gamma,
          -s * c * c * Omega,
          0.0,
          s * c * a * Omega,
          -s * c * b * Gamma,
          s * c * b * Omega,
          -s * c * a * Omega,
          0.0,
          s * kh2 * Gamma,
          s * c * a * Gamma,
          s * c * b * Gamma,
          -s * kh2 * Gamma,
          0.0};
}

Mat4 from_real(const std::array<double, 16>& e) {
  Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = e[4 * i + j];
  return m;
}

void add_outer(Mat4& m, const Vec4& a, cplx w) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] += w * a[i] * std::conj(a[j]);
}

cplx inner(const Vec4& f, const Vec4& a) {
  cplx s{};
  for (int i = 0; i < 4; ++i) s += f[i] * std::conj(a[i]);
  return s;
}

}  // namespace

double PhysParams::eta() const {
  if (Gamma == 0.0) throw Error(ErrorKind::invalid_spec, "Gamma must be nonzero to define eta");
  return Omega / Gamma;
}

void PhysParams::validate() const {
  if (!std::isfinite(Omega) || !std::isfinite(Gamma) || !std::isfinite(nu))
    throw Error(ErrorKind::invalid_spec, "physical parameters must be finite");
  if (nu < 0.0) throw Error(ErrorKind::invalid_spec, "nu must be nonnegative");
}

Mat4 pjp_matrix(const Wavevector& k, const PhysParams& params, Boundary bc) {
  const double k2n = k.norm2();
  if (k2n == 0.0) throw Error(ErrorKind::zero_wavevector, "pjp_matrix at k = 0");
  const double eta = params.eta();
  const double a = k.k1, b = k.k2, c = k.k3, kh2 = k.kh2();
  Mat4 m{};
  if (bc == Boundary::periodic) {
    m = {{{0.0, c * c * eta, -c * b * eta, -c * a},
          {-c * c * eta, 0.0, c * a * eta, -c * b},
          {c * b * eta, -c * a * eta, 0.0, kh2},
          {c * a, c * b, -kh2, 0.0}}};
  } else {
    m = {{{0.0, c * c * eta, I * b * c * eta, I * a * c},
          {-c * c * eta, 0.0, -I * a * c * eta, I * b * c},
          {I * b * c * eta, -I * a * c * eta, 0.0, kh2},
          {I * a * c, I * b * c, -kh2, 0.0}}};
  }
  for (auto& row : m)
    for (auto& e : row) e /= k2n;
  return m;
}

Mat4 skew_matrix(const Wavevector& k, double eta) {
  if (k.norm2() == 0.0) return Mat4{};
  return from_real(generator(k, eta, 1.0));
}

ModeFrame mode_frame(const Wavevector& k, const PhysParams& params, Boundary) {
  if (k.norm2() == 0.0) throw Error(ErrorKind::zero_wavevector, "mode_frame at k = 0");
  const double eta = params.eta();
  ModeFrame f;
  f.k = k;
  const double kh2 = k.kh2();
  const double kh = std::sqrt(kh2);
  const double kn = std::sqrt(k.norm2());
  if (kh2 == 0.0) {
    const double s = sign_or_one(k.k3);
    const double sg = sign_or_one(eta);
    f.a_g = {0.0, 0.0, 0.0, -I * s * sg};
    f.a_0 = {0.0, 0.0, I * s, 0.0};
    f.a_plus = {I * s / std::numbers::sqrt2, -s * sg / std::numbers::sqrt2, 0.0, 0.0};
    f.p_eta = std::abs(eta);
  } else {
    const double ke = std::sqrt(kh2 + eta * eta * k.k3 * k.k3);
    f.a_g = {I * k.k2 / ke, -I * k.k1 / ke, 0.0, -I * eta * k.k3 / ke};
    f.a_0 = {I * k.k1 / kn, I * k.k2 / kn, I * k.k3 / kn, 0.0};
    const double d = std::numbers::sqrt2 * kh * kn * ke;
    f.a_plus = {k.k3 * (k.k2 * eta * kn + I * k.k1 * ke) / d,
                k.k3 * (-k.k1 * eta * kn + I * k.k2 * ke) / d,
                -I * kh2 * ke / d,
                kh2 * kn / d};
    f.p_eta = ke / kn;
  }
  for (int i = 0; i < 4; ++i) f.a_minus[i] = std::conj(f.a_plus[i]);
  return f;
}

Vec4 to_sine_cosine(const Vec4& v) { return {v[0], v[1], I * v[2], I * v[3]}; }

SpectralField helmholtz_project(const SpectralField& s) {
  if (s.ncomp() < 3) throw Error(ErrorKind::shape_mismatch, "helmholtz_project needs a velocity");
  SpectralField out = s;
  auto u1 = out.component(0), u2 = out.component(1), u3 = out.component(2);
  for_each_mode(s.grid(), s.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    const double k2n = k.norm2();
    if (k2n == 0.0) return;
    const cplx d = (k.k1 * u1[i] + k.k2 * u2[i] + k.k3 * u3[i]) / k2n;
    u1[i] -= k.k1 * d;
    u2[i] -= k.k2 * d;
    u3[i] -= k.k3 * d;
  });
  return out;
}

SpectralField geostrophic_project(const SpectralField& s, const PhysParams& params) {
  if (s.ncomp() != 4) throw Error(ErrorKind::shape_mismatch, "geostrophic_project needs 4 components");
  SpectralField out(s.grid_ptr(), 4, s.layout());
  out.set_frame(s.frame());
  const Boundary bc = s.grid().bc();
  for_each_mode(s.grid(), s.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    if (k.norm2() == 0.0) return;
    const ModeFrame f = mode_frame(k, params, bc);
    Vec4 v;
    for (int c = 0; c < 4; ++c) v[c] = s.component(c)[i];
    const cplx a = inner(v, f.a_g);
    for (int c = 0; c < 4; ++c) out.component(c)[i] = a * f.a_g[c];
  });
  return out;
}

SpectralField ageostrophic_part(const SpectralField& s, const PhysParams& params) {
  return s - geostrophic_project(s, params);
}

double band_profile(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto g = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = g(2.0 - r);
  const double b = g(r - 1.0);
  return a / (a + b);
}

SpectralField band_project(const SpectralField& s, double R) {
  if (!(R > 0.0)) throw Error(ErrorKind::invalid_spec, "band cutoff R must be positive");
  SpectralField out = s;
  for (int c = 0; c < s.ncomp(); ++c) {
    auto comp = out.component(c);
    for_each_mode(s.grid(), s.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
      comp[i] *= band_profile(std::sqrt(k.norm2()) / R);
    });
  }
  return out;
}

std::array<double, 16> propagator_entries(const Wavevector& k, const PhysParams& params, double h) {
  const double k2n = k.norm2();
  const double damp = std::exp(-params.nu * k2n * h);
  std::array<double, 16> e{};
  if (k2n == 0.0) {
    const double co = std::cos(params.Omega * h), so = std::sin(params.Omega * h);
    const double cg = std::cos(params.Gamma * h), sg = std::sin(params.Gamma * h);
    e = {co, so, 0.0, 0.0, -so, co, 0.0, 0.0, 0.0, 0.0, cg, sg, 0.0, 0.0, -sg, cg};
    return e;
  }
  // M^3 = -p^2 M, so exp(hA) = I + sin(wh)/w A + (1 - cos wh)/w^2 A^2 with
  // A = Gamma M and w = Gamma p.
  const std::array<double, 16> A = generator(k, params.Omega, params.Gamma);
  const double w2 = (params.Gamma * params.Gamma * k.kh2() + params.Omega * params.Omega * k.k3 * k.k3) / k2n;
  const double x = std::sqrt(w2) * h;
  const double c1 = x == 0.0 ? h : h * std::sin(x) / x;
  const double half = 0.5 * x;
  const double sh = half == 0.0 ? 1.0 : std::sin(half) / half;
  const double c2 = 0.5 * h * h * sh * sh;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double a2 = 0.0;
      for (int l = 0; l < 4; ++l) a2 += A[4 * i + l] * A[4 * l + j];
      e[4 * i + j] = damp * ((i == j ? 1.0 : 0.0) + c1 * A[4 * i + j] + c2 * a2);
    }
  return e;
}

Mat4 linear_propagator(const Wavevector& k, const PhysParams& params, double dt, Boundary bc) {
  if (dt < 0.0) throw Error(ErrorKind::invalid_spec, "dt must be nonnegative");
  if (k.norm2() == 0.0 || params.Gamma == 0.0) return from_real(propagator_entries(k, params, dt));
  const ModeFrame f = mode_frame(k, params, bc);
  const double damp = std::exp(-params.nu * k.norm2() * dt);
  const double phase = params.Gamma * f.p_eta * dt;
  Mat4 m{};
  add_outer(m, f.a_g, damp);
  add_outer(m, f.a_0, damp);
  add_outer(m, f.a_plus, damp * std::polar(1.0, phase));
  add_outer(m, f.a_minus, damp * std::polar(1.0, -phase));
  return m;
}

Propagator::Propagator(GridPtr grid, const PhysParams& params, double h)
    : grid_(std::move(grid)), h_(h) {
  if (h < 0.0) throw Error(ErrorKind::invalid_spec, "dt must be nonnegative");
  const int nz = grid_->nv();
  table_.resize(grid_->spectral_size(nz));
  for_each_mode(*grid_, nz, [&](std::size_t i, int, int, int, const Wavevector& k) {
    table_[i] = propagator_entries(k, params, h);
  });
}

void Propagator::apply(SpectralField& s) const { apply(s, s); }

void Propagator::apply(const SpectralField& in, SpectralField& out) const {
  if (in.ncomp() != 4 || in.nz() != grid_->nv() || &in.grid() != grid_.get())
    throw Error(ErrorKind::shape_mismatch, "propagator expects a 4-component volume field");
  if (!out.same_shape(in)) out = SpectralField(in.grid_ptr(), 4, Layout::volume);
  out.set_frame(in.frame());
  const std::size_t n = table_.size();
  const cplx* a = in.data().data();
  cplx* b = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = table_[i];
    const cplx v0 = a[i], v1 = a[n + i], v2 = a[2 * n + i], v3 = a[3 * n + i];
    b[i] = e[0] * v0 + e[1] * v1 + e[2] * v2 + e[3] * v3;
    b[n + i] = e[4] * v0 + e[5] * v1 + e[6] * v2 + e[7] * v3;
    b[2 * n + i] = e[8] * v0 + e[9] * v1 + e[10] * v2 + e[11] * v3;
    b[3 * n + i] = e[12] * v0 + e[13] * v1 + e[14] * v2 + e[15] * v3;
  }
}

SpectralField apply_propagator(const SpectralField& s, const PhysParams& params, double dt) {
  if (s.ncomp() != 4) throw Error(ErrorKind::shape_mismatch, "apply_propagator needs 4 components");
  if (dt < 0.0) throw Error(ErrorKind::invalid_spec, "dt must be nonnegative");
  SpectralField out(s.grid_ptr(), 4, s.layout());
  out.set_frame(s.frame());
  for_each_mode(s.grid(), s.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    const auto e = propagator_entries(k, params, dt);
    cplx v[4];
    for (int c = 0; c < 4; ++c) v[c] = s.component(c)[i];
    for (int r = 0; r < 4; ++r)
      out.component(r)[i] = e[4 * r] * v[0] + e[4 * r + 1] * v[1] + e[4 * r + 2] * v[2] + e[4 * r + 3] * v[3];
  });
  return out;
}

SpectralField rotate_frame(const SpectralField& pair, double angle) {
  if (pair.ncomp() != 4) throw Error(ErrorKind::shape_mismatch, "rotate_frame expects (w1, w2, T1, T2)");
  SpectralField out = pair;
  const double c = std::cos(angle), s = std::sin(angle);
  for (int d = 0; d < 2; ++d) {
    auto w = out.component(d);
    auto t = out.component(d + 2);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const cplx wi = w[i], ti = t[i];
      w[i] = c * wi + s * ti;
      t[i] = -s * wi + c * ti;
    }
  }
  return out;
}

std::array<double, 2> rotate_frame(const std::array<double, 2>& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p[0] + s * p[1], -s * p[0] + c * p[1]};
}

}  // namespace bvx
