#include "bvx/spectral_ops.hpp"

#include <cmath>
#include <limits>

#include "bvx/error.hpp"

namespace bvx {

namespace {

constexpr cplx I{0.0, 1.0};

void require_components(const SpectralField& s, int n, const char* what) {
  if (s.ncomp() < n) throw Error(ErrorKind::shape_mismatch, std::string(what) + ": too few components");
}

}  // namespace

SpectralField vertical_mean(const SpectralField& s) {
  SpectralField out(s.grid_ptr(), s.ncomp(), s.layout());
  out.set_frame(s.frame());
  const std::size_t plane = s.grid().spectral_size(1);
  for (int c = 0; c < s.ncomp(); ++c) {
    auto src = s.component(c);
    auto dst = out.component(c);
    std::copy(src.begin(), src.begin() + plane, dst.begin());
  }
  return out;
}

SpectralField baroclinic_part(const SpectralField& s) {
  SpectralField out = s;
  if (s.nz() == 1) {
    out.set_zero();
    return out;
  }
  const std::size_t plane = s.grid().spectral_size(1);
  for (int c = 0; c < s.ncomp(); ++c) {
    auto dst = out.component(c);
    std::fill(dst.begin(), dst.begin() + plane, cplx{});
  }
  return out;
}

SpectralField extract_plane(const SpectralField& s) {
  SpectralField out(s.grid_ptr(), s.ncomp(), Layout::plane);
  out.set_frame(s.frame());
  const std::size_t plane = s.grid().spectral_size(1);
  for (int c = 0; c < s.ncomp(); ++c) {
    auto src = s.component(c);
    std::copy(src.begin(), src.begin() + plane, out.component(c).begin());
  }
  return out;
}

void embed_plane(const SpectralField& plane, SpectralField& volume) {
  if (plane.nz() != 1 || plane.ncomp() != volume.ncomp() || &plane.grid() != &volume.grid())
    throw Error(ErrorKind::shape_mismatch, "embed_plane");
  const std::size_t n = volume.grid().spectral_size(1);
  for (int c = 0; c < volume.ncomp(); ++c) {
    auto src = plane.component(c);
    std::copy(src.begin(), src.begin() + n, volume.component(c).begin());
  }
}

SpectralField curl(const SpectralField& s) {
  require_components(s, 3, "curl");
  SpectralField w(s.grid_ptr(), 3, s.layout());
  auto u1 = s.component(0), u2 = s.component(1), u3 = s.component(2);
  auto w1 = w.component(0), w2 = w.component(1), w3 = w.component(2);
  for_each_mode(s.grid(), s.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    w1[i] = I * (k.k2 * u3[i] - k.k3 * u2[i]);
    w2[i] = I * (k.k3 * u1[i] - k.k1 * u3[i]);
    w3[i] = I * (k.k1 * u2[i] - k.k2 * u1[i]);
  });
  return w;
}

SpectralField gradient(const SpectralField& f) {
  SpectralField g(f.grid_ptr(), 3, f.layout());
  auto src = f.component(0);
  auto g1 = g.component(0), g2 = g.component(1), g3 = g.component(2);
  for_each_mode(f.grid(), f.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    g1[i] = I * k.k1 * src[i];
    g2[i] = I * k.k2 * src[i];
    g3[i] = I * k.k3 * src[i];
  });
  return g;
}

SpectralField divergence(const SpectralField& s) {
  require_components(s, 2, "divergence");
  SpectralField d(s.grid_ptr(), 1, s.layout());
  auto out = d.component(0);
  auto u1 = s.component(0), u2 = s.component(1);
  const bool has3 = s.ncomp() >= 3;
  for_each_mode(s.grid(), s.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    cplx v = k.k1 * u1[i] + k.k2 * u2[i];
    if (has3) v += k.k3 * s.component(2)[i];
    out[i] = I * v;
  });
  return d;
}

SpectralField skew_gradient(const SpectralField& f) {
  SpectralField g(f.grid_ptr(), 2, f.layout());
  auto src = f.component(0);
  auto g1 = g.component(0), g2 = g.component(1);
  for_each_mode(f.grid(), f.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    g1[i] = I * k.k2 * src[i];
    g2[i] = -I * k.k1 * src[i];
  });
  return g;
}

SpectralField curl2(const SpectralField& u) {
  require_components(u, 2, "curl2");
  SpectralField w(u.grid_ptr(), 1, u.layout());
  auto out = w.component(0);
  auto u1 = u.component(0), u2 = u.component(1);
  for_each_mode(u.grid(), u.nz(), [&](std::size_t i, int, int, int, const Wavevector& k) {
    out[i] = I * (k.k1 * u2[i] - k.k2 * u1[i]);
  });
  return w;
}

double mean_square(const SpectralField& s) {
  const Grid& g = s.grid();
  double sum = 0.0;
  for (int c = 0; c < s.ncomp(); ++c) {
    auto comp = s.component(c);
    for_each_mode(g, s.nz(), [&](std::size_t i, int, int, int j1, const Wavevector&) {
      sum += g.hermitian_weight(j1) * std::norm(comp[i]);
    });
  }
  return sum;
}

double l2_norm(const SpectralField& s) {
  return std::sqrt(mean_square(s)) * s.grid().L();
}

double gradient_norm2(const SpectralField& s) {
  const Grid& g = s.grid();
  double sum = 0.0;
  for (int c = 0; c < s.ncomp(); ++c) {
    auto comp = s.component(c);
    for_each_mode(g, s.nz(), [&](std::size_t i, int, int, int j1, const Wavevector& k) {
      sum += g.hermitian_weight(j1) * k.norm2() * std::norm(comp[i]);
    });
  }
  return sum * g.L() * g.L();
}

double h1_norm(const SpectralField& s) {
  const double l2 = l2_norm(s);
  return std::sqrt(l2 * l2 + gradient_norm2(s));
}

double weighted_norm(const SpectralField& s, double m, double p) {
  return weighted_norm(to_physical(s), m, p);
}

double weighted_norm(const PhysicalField& f, double m, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::invalid_spec, "Lebesgue exponent must be >= 1");
  if (!(m >= 0.0)) throw Error(ErrorKind::invalid_spec, "weight exponent must be >= 0");
  const Grid& g = f.grid();
  const int n = g.n();
  const int nz = f.nz();
  const bool inf = std::isinf(p);
  const double dx = g.L() / n;

  // Vertical quadrature over [0, 1].
  std::vector<double> wz(nz, 0.0);
  if (nz == 1) {
    wz[0] = 1.0;
  } else if (g.bc() == Boundary::periodic) {
    std::fill(wz.begin(), wz.end(), 1.0 / nz);
  } else {
    const double h = 2.0 / nz;
    for (int l = 0; l <= nz / 2; ++l) wz[l] = (l == 0 || l == nz / 2) ? 0.5 * h : h;
  }

  double acc = 0.0;
  for (int iz = 0; iz < nz; ++iz) {
    if (!inf && wz[iz] == 0.0) continue;
    for (int j2 = 0; j2 < n; ++j2) {
      const double x2 = g.x(j2);
      for (int j1 = 0; j1 < n; ++j1) {
        const double x1 = g.x(j1);
        double mag2 = 0.0;
        for (int c = 0; c < f.ncomp(); ++c) {
          const double v = f.at(c, iz, j2, j1);
          mag2 += v * v;
        }
        const double b = m == 0.0 ? 1.0 : std::pow(1.0 + x1 * x1 + x2 * x2, 0.5 * m);
        const double val = b * std::sqrt(mag2);
        if (inf) {
          acc = std::max(acc, val);
        } else {
          acc += wz[iz] * (p == 2.0 ? val * val : std::pow(val, p));
        }
      }
    }
  }
  if (inf) return acc;
  acc *= dx * dx;
  return p == 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / p);
}

Moments moments(const SpectralField& v, const Moments& background) {
  Moments m = background;
  const double area = v.grid().L() * v.grid().L();
  // The zero mode of curl_2(u_h) is identically zero on the torus.
  if (v.ncomp() >= 4) {
    m.B1 += area * v.at(2, 0, 0, 0).real();
    m.B2 += area * v.at(3, 0, 0, 0).real();
  }
  return m;
}

}  // namespace bvx
