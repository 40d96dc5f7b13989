#include "bvx/reference.hpp"

#include <cmath>
#include <numbers>

#include "bvx/error.hpp"

namespace bvx {

namespace {

constexpr double kPi = std::numbers::pi;

// -expm1(-q)/q, the Oseen swirl factor, finite at q = 0.
double swirl_factor(double q) { return q < 1e-12 ? 1.0 - 0.5 * q : -std::expm1(-q) / q; }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// d^n/dx^n e^{-x^2/4} divided by e^{-x^2/4}.
double gauss_derivative_factor(int n, double x) {
  const double sign = (n % 2) ? -1.0 : 1.0;
  return sign * std::pow(2.0, -0.5 * n) * hermite_he(n, x / std::numbers::sqrt2);
}

}  // namespace

OseenValue oseen(double xi1, double xi2) {
  const double r2 = xi1 * xi1 + xi2 * xi2;
  OseenValue v;
  v.phi0 = std::exp(-0.25 * r2) / (4.0 * kPi);
  // (1 - e^{-r^2/4}) / (2 pi r^2) = swirl_factor(r^2/4) / (8 pi)
  const double f = swirl_factor(0.25 * r2) / (8.0 * kPi);
  v.u0 = {-f * xi2, f * xi1};
  return v;
}

std::array<double, 2> vortex_phase(const VortexParams& p, double t) {
  const double c = std::cos(p.Gamma * t), s = std::sin(p.Gamma * t);
  return {p.B1 * c + p.B2 * s, -p.B1 * s + p.B2 * c};
}

VortexValue vortex_solution(const VortexParams& p, double t, double x1, double x2) {
  if (t < 0.0) throw Error(ErrorKind::invalid_spec, "t must be nonnegative");
  const double s = std::sqrt(1.0 + t);
  const OseenValue o = oseen(x1 / s, x2 / s);
  const auto ph = vortex_phase(p, t);
  VortexValue v;
  v.omega3 = p.A / (1.0 + t) * o.phi0;
  v.u1 = p.A / s * o.u0[0];
  v.u2 = p.A / s * o.u0[1];
  v.u3 = ph[0] / (1.0 + t) * o.phi0;
  v.theta = ph[1] / (1.0 + t) * o.phi0;
  return v;
}

VortexValue vortex_solution_periodic(const VortexParams& p, double t, double x1, double x2, double L) {
  if (p.A != 0.0) throw Error(ErrorKind::invalid_spec, "a torus cannot carry nonzero total vorticity");
  if (t < 0.0) throw Error(ErrorKind::invalid_spec, "t must be nonnegative");
  const double s = std::sqrt(1.0 + t);
  const int images = static_cast<int>(std::ceil(14.0 * s / L)) + 1;
  double g = 0.0;
  for (int m2 = -images; m2 <= images; ++m2)
    for (int m1 = -images; m1 <= images; ++m1) {
      const double y1 = (x1 + m1 * L) / s, y2 = (x2 + m2 * L) / s;
      g += std::exp(-0.25 * (y1 * y1 + y2 * y2));
    }
  g /= 4.0 * kPi;
  const auto ph = vortex_phase(p, t);
  VortexValue v;
  v.u3 = ph[0] / (1.0 + t) * g;
  v.theta = ph[1] / (1.0 + t) * g;
  return v;
}

SpectralField sample_vortex(const GridPtr& grid, const VortexParams& p, double t, bool periodized) {
  if (grid->bc() == Boundary::stress_free && (p.B1 != 0.0 || p.B2 != 0.0))
    throw Error(ErrorKind::invalid_spec, "stress-free walls force u3_bar = theta_bar = 0");
  PhysicalField plane(grid, 4, Layout::plane);
  const int n = grid->n();
  for (int j2 = 0; j2 < n; ++j2)
    for (int j1 = 0; j1 < n; ++j1) {
      const VortexValue v = periodized ? vortex_solution_periodic(p, t, grid->x(j1), grid->x(j2), grid->L())
                                       : vortex_solution(p, t, grid->x(j1), grid->x(j2));
      plane.at(0, 0, j2, j1) = v.u1;
      plane.at(1, 0, j2, j1) = v.u2;
      plane.at(2, 0, j2, j1) = v.u3;
      plane.at(3, 0, j2, j1) = v.theta;
    }
  SpectralField bar = to_spectral(plane);
  apply_dealias(bar);
  enforce_hermitian(bar);
  SpectralField out(grid, 4, Layout::volume);
  const std::size_t m = grid->spectral_size(1);
  for (int c = 0; c < 4; ++c) std::copy(bar.component(c).begin(), bar.component(c).begin() + m, out.component(c).begin());
  return out;
}

SpectralField sample_vortex_vorticity(const GridPtr& grid, const VortexParams& p, double t) {
  PhysicalField w(grid, 1, Layout::plane);
  w.fill([&](int, double x1, double x2, double) { return vortex_solution(p, t, x1, x2).omega3; });
  return to_spectral(w);
}

double hermite_he(int n, double x) {
  if (n < 0) throw Error(ErrorKind::invalid_spec, "Hermite order must be nonnegative");
  if (n == 0) return 1.0;
  double h0 = 1.0, h1 = x;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double hermite_poly(int a1, int a2, double xi1, double xi2) {
  const double pre = std::pow(2.0, a1 + a2) / (factorial(a1) * factorial(a2));
  return pre * gauss_derivative_factor(a1, xi1) * gauss_derivative_factor(a2, xi2);
}

double hermite_function(int a1, int a2, double xi1, double xi2) {
  return oseen(xi1, xi2).phi0 * gauss_derivative_factor(a1, xi1) * gauss_derivative_factor(a2, xi2);
}

HermiteProjection hermite_projection(const PhysicalField& f, int n, double tail_tol) {
  if (f.nz() != 1 || f.ncomp() != 1) throw Error(ErrorKind::shape_mismatch, "expected a plane scalar");
  if (n < 0) throw Error(ErrorKind::invalid_spec, "projection order must be nonnegative");
  const Grid& g = f.grid();
  const int N = g.n();
  const double dA = (g.L() / N) * (g.L() / N);
  const double edge = 0.4 * g.L();

  double total = 0.0, tail = 0.0;
  for (int j2 = 0; j2 < N; ++j2)
    for (int j1 = 0; j1 < N; ++j1) {
      const double x1 = g.x(j1), x2 = g.x(j2);
      const double w = std::abs(f.at(0, 0, j2, j1)) * std::pow(1.0 + x1 * x1 + x2 * x2, 0.5 * n);
      total += w;
      if (std::max(std::abs(x1), std::abs(x2)) > edge) tail += w;
    }
  HermiteProjection out;
  out.tail_fraction = total > 0.0 ? tail / total : 0.0;
  if (out.tail_fraction > tail_tol)
    throw Error(ErrorKind::tail_mass, "weighted tail fraction " + std::to_string(out.tail_fraction) +
                                          " exceeds tolerance; enlarge the box");

  for (int order = 0; order <= n; ++order)
    for (int a1 = order; a1 >= 0; --a1) out.indices.push_back({a1, order - a1});

  out.coefficients.assign(out.indices.size(), 0.0);
  for (std::size_t q = 0; q < out.indices.size(); ++q) {
    const auto [a1, a2] = out.indices[q];
    double s = 0.0;
    for (int j2 = 0; j2 < N; ++j2)
      for (int j1 = 0; j1 < N; ++j1) s += hermite_poly(a1, a2, g.x(j1), g.x(j2)) * f.at(0, 0, j2, j1);
    out.coefficients[q] = s * dA;
  }

  out.Pn = PhysicalField(f.grid_ptr(), 1, Layout::plane);
  out.Qn = f;
  for (int j2 = 0; j2 < N; ++j2)
    for (int j1 = 0; j1 < N; ++j1) {
      double v = 0.0;
      for (std::size_t q = 0; q < out.indices.size(); ++q)
        v += out.coefficients[q] * hermite_function(out.indices[q][0], out.indices[q][1], g.x(j1), g.x(j2));
      out.Pn.at(0, 0, j2, j1) = v;
      out.Qn.at(0, 0, j2, j1) -= v;
    }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> evaluate_plane(const SpectralField& s, int c, const std::vector<double>& x1,
                                   const std::vector<double>& x2) {
  if (s.nz() != 1) throw Error(ErrorKind::shape_mismatch, "evaluate_plane expects a plane field");
  const Grid& g = s.grid();
  const int N = g.n(), nh = g.nh();
  const std::size_t na = x1.size(), nb = x2.size();
  // Stage 1: sum over k1 for each (k2, x1).
  std::vector<cplx> stage(static_cast<std::size_t>(N) * na);
  for (int j2 = 0; j2 < N; ++j2)
    for (std::size_t a = 0; a < na; ++a) {
      cplx acc{};
      for (int j1 = 0; j1 < nh; ++j1) {
        const cplx coef = s.at(c, 0, j2, j1);
        if (coef == cplx{}) continue;
        acc += g.hermitian_weight(j1) * coef * std::polar(1.0, g.k1(j1) * x1[a]);
      }
      stage[j2 * na + a] = acc;
    }
  std::vector<double> out(na * nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b)
    for (int j2 = 0; j2 < N; ++j2) {
      const cplx e = std::polar(1.0, g.k2(j2) * x2[b]);
      for (std::size_t a = 0; a < na; ++a) out[b * na + a] += (stage[j2 * na + a] * e).real();
    }
  return out;
}

namespace {

double amplitude(Amplitude kind, double t) { return kind == Amplitude::vorticity ? 1.0 + t : std::sqrt(1.0 + t); }

// Physical-space layers of a field, each as a plane spectral field.
std::vector<SpectralField> horizontal_layers(const SpectralField& s, int c) {
  const Grid& g = s.grid();
  std::vector<SpectralField> layers;
  const int nz = s.nz();
  for (int l = 0; l < nz; ++l) {
    SpectralField layer(s.grid_ptr(), 1, Layout::plane);
    auto dst = layer.component(0);
    const double z = g.z(l);
    for (int iz = 0; iz < nz; ++iz) {
      const cplx e = nz == 1 ? cplx{1.0} : std::polar(1.0, g.k3(iz, nz) * z);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s.component(c)[iz * dst.size() + i] * e;
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

ScaledSnapshot to_scaled(const SpectralField& s, double t, Amplitude kind, GridPtr xi_grid) {
  if (t < 0.0) throw Error(ErrorKind::invalid_spec, "t must be nonnegative");
  const Grid& g = s.grid();
  const double root = std::sqrt(1.0 + t);
  if (!xi_grid) {
    GridSpec spec = g.spec();
    spec.L = g.L() / root;
    xi_grid = make_grid(spec);
  }
  if (xi_grid->nv() != g.nv() || xi_grid->bc() != g.bc())
    throw Error(ErrorKind::shape_mismatch, "xi-grid must share the vertical discretization");
  if (0.5 * xi_grid->L() * root > 0.5 * g.L() * (1.0 + 1e-12))
    throw Error(ErrorKind::extrapolation, "xi-box extends beyond the physical box at this time");

  ScaledSnapshot sc;
  sc.xi_grid = xi_grid;
  sc.tau = std::log1p(t);
  sc.values = PhysicalField(xi_grid, s.ncomp(), s.layout());
  const double amp = amplitude(kind, t);
  const int M = xi_grid->n();
  std::vector<double> xs(M);
  for (int j = 0; j < M; ++j) xs[j] = xi_grid->x(j) * root;

  const bool same_points = M == g.n() && std::abs(xi_grid->L() * root - g.L()) <= 1e-12 * g.L();
  if (same_points) {
    const PhysicalField p = to_physical(s);
    for (std::size_t i = 0; i < p.values().size(); ++i) sc.values.values()[i] = amp * p.values()[i];
    return sc;
  }
  for (int c = 0; c < s.ncomp(); ++c) {
    const auto layers = horizontal_layers(s, c);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto vals = evaluate_plane(layers[l], 0, xs, xs);
      for (int j2 = 0; j2 < M; ++j2)
        for (int j1 = 0; j1 < M; ++j1) sc.values.at(c, static_cast<int>(l), j2, j1) = amp * vals[j2 * M + j1];
    }
  }
  return sc;
}

SpectralField from_scaled(const ScaledSnapshot& sc, Amplitude kind, const GridPtr& x_grid) {
  const double t = std::expm1(sc.tau);
  const double root = std::sqrt(1.0 + t);
  const double amp = amplitude(kind, t);
  const Grid& xg = *sc.xi_grid;
  const int N = x_grid->n();
  if (0.5 * x_grid->L() / root > 0.5 * xg.L() * (1.0 + 1e-12))
    throw Error(ErrorKind::extrapolation, "physical box extends beyond the scaled data");
  const bool same_points = N == xg.n() && std::abs(xg.L() * root - x_grid->L()) <= 1e-12 * x_grid->L();
  const Layout layout = sc.values.nz() == 1 ? Layout::plane : Layout::volume;
  if (same_points) {
    PhysicalField p(x_grid, sc.values.ncomp(), layout);
    for (std::size_t i = 0; i < p.values().size(); ++i) p.values()[i] = sc.values.values()[i] / amp;
    return to_spectral(p);
  }
  const SpectralField w = to_spectral(sc.values);
  std::vector<double> xs(N);
  for (int j = 0; j < N; ++j) xs[j] = x_grid->x(j) / root;
  PhysicalField p(x_grid, w.ncomp(), layout);
  for (int c = 0; c < w.ncomp(); ++c) {
    const auto layers = horizontal_layers(w, c);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto vals = evaluate_plane(layers[l], 0, xs, xs);
      for (int j2 = 0; j2 < N; ++j2)
        for (int j1 = 0; j1 < N; ++j1) p.at(c, static_cast<int>(l), j2, j1) = vals[j2 * N + j1] / amp;
    }
  }
  return to_spectral(p);
}

}  // namespace bvx
