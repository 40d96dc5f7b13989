#include "bvx/biotsavart.hpp"

#include <cmath>

#include "bvx/error.hpp"
#include "bvx/spectral_ops.hpp"

namespace bvx {

namespace {

constexpr cplx I{0.0, 1.0};

}  // namespace

SpectralField velocity_from_vorticity_3d(const SpectralField& w) {
  if (w.ncomp() != 3 || w.nz() == 1) throw Error(ErrorKind::shape_mismatch, "expected a 3-vector volume field");
  const double scale = w.max_abs();
  const std::size_t plane = w.grid().spectral_size(1);
  for (int c = 0; c < 3; ++c) {
    auto comp = w.component(c);
    for (std::size_t i = 0; i < plane; ++i)
      if (std::abs(comp[i]) > 1e-12 * scale)
        throw Error(ErrorKind::nonzero_barotropic, "vorticity has n = 0 content");
  }
  SpectralField u(w.grid_ptr(), 3, Layout::volume);
  auto w1 = w.component(0), w2 = w.component(1), w3 = w.component(2);
  auto u1 = u.component(0), u2 = u.component(1), u3 = u.component(2);
  for_each_mode(w.grid(), w.nz(), [&](std::size_t i, int iz, int, int, const Wavevector& k) {
    if (iz == 0) return;
    const double inv = 1.0 / k.norm2();
    u1[i] = I * (k.k2 * w3[i] - k.k3 * w2[i]) * inv;
    u2[i] = I * (k.k3 * w1[i] - k.k1 * w3[i]) * inv;
    u3[i] = I * (k.k1 * w2[i] - k.k2 * w1[i]) * inv;
  });
  return u;
}

SpectralField velocity2d_from_vorticity(const SpectralField& w) {
  if (w.nz() != 1) throw Error(ErrorKind::shape_mismatch, "expected a plane field");
  const cplx mean = w.at(0, 0, 0, 0);
  if (std::abs(mean) > 1e-12 * std::max(1.0, w.max_abs()))
    throw Error(ErrorKind::nonzero_mean, "vorticity must have zero mean on the torus");
  SpectralField u(w.grid_ptr(), 2, Layout::plane);
  auto src = w.component(0);
  auto u1 = u.component(0), u2 = u.component(1);
  for_each_mode(w.grid(), 1, [&](std::size_t i, int, int, int, const Wavevector& k) {
    const double kh2 = k.kh2();
    if (kh2 == 0.0) return;
    u1[i] = I * k.k2 * src[i] / kh2;
    u2[i] = -I * k.k1 * src[i] / kh2;
  });
  return u;
}

SpectralField potential_from_skew_gradient(const SpectralField& g, double mean) {
  if (g.nz() != 1 || g.ncomp() != 2) throw Error(ErrorKind::shape_mismatch, "expected a plane 2-vector");
  auto g1 = g.component(0), g2 = g.component(1);
  double worst = 0.0;
  double scale = 0.0;
  for_each_mode(g.grid(), 1, [&](std::size_t i, int, int, int, const Wavevector& k) {
    const double kn = std::sqrt(k.kh2());
    worst = std::max(worst, std::abs(k.k1 * g1[i] + k.k2 * g2[i]));
    scale = std::max(scale, kn * std::sqrt(std::norm(g1[i]) + std::norm(g2[i])));
  });
  if (worst > 1e-10 * scale) throw Error(ErrorKind::nonsolenoidal, "skew gradient has nonzero divergence");
  SpectralField f(g.grid_ptr(), 1, Layout::plane);
  auto out = f.component(0);
  for_each_mode(g.grid(), 1, [&](std::size_t i, int, int, int, const Wavevector& k) {
    const double kh2 = k.kh2();
    if (kh2 == 0.0) {
      out[i] = mean;
      return;
    }
    out[i] = -I * (k.k2 * g1[i] - k.k1 * g2[i]) / kh2;
  });
  return f;
}

VorticityState to_vorticity(const SpectralField& v) {
  if (v.ncomp() != 4 || v.nz() == 1) throw Error(ErrorKind::shape_mismatch, "expected a 4-component volume state");
  VorticityState w;
  const SpectralField bar = extract_plane(v);
  const auto& gp = v.grid_ptr();
  SpectralField uh(gp, 2, Layout::plane), u3(gp, 1, Layout::plane), th(gp, 1, Layout::plane);
  std::copy(bar.component(0).begin(), bar.component(0).end(), uh.component(0).begin());
  std::copy(bar.component(1).begin(), bar.component(1).end(), uh.component(1).begin());
  std::copy(bar.component(2).begin(), bar.component(2).end(), u3.component(0).begin());
  std::copy(bar.component(3).begin(), bar.component(3).end(), th.component(0).begin());
  w.omega3_bar = curl2(uh);
  w.omega_h_bar = skew_gradient(u3);
  w.Theta_bar = skew_gradient(th);
  w.mean_u3 = bar.at(2, 0, 0, 0).real();
  w.mean_theta = bar.at(3, 0, 0, 0).real();
  const SpectralField tl = baroclinic_part(v);
  w.omega_tilde = curl(tl);
  w.theta_tilde = SpectralField(gp, 1, Layout::volume);
  std::copy(tl.component(3).begin(), tl.component(3).end(), w.theta_tilde.component(0).begin());
  return w;
}

SpectralField from_vorticity(const VorticityState& w) {
  const auto& gp = w.omega3_bar.grid_ptr();
  SpectralField v(gp, 4, Layout::volume);
  const SpectralField uh = velocity2d_from_vorticity(w.omega3_bar);
  const SpectralField u3 = potential_from_skew_gradient(w.omega_h_bar, w.mean_u3);
  const SpectralField th = potential_from_skew_gradient(w.Theta_bar, w.mean_theta);
  SpectralField bar(gp, 4, Layout::plane);
  std::copy(uh.component(0).begin(), uh.component(0).end(), bar.component(0).begin());
  std::copy(uh.component(1).begin(), uh.component(1).end(), bar.component(1).begin());
  std::copy(u3.component(0).begin(), u3.component(0).end(), bar.component(2).begin());
  std::copy(th.component(0).begin(), th.component(0).end(), bar.component(3).begin());
  const SpectralField ut = velocity_from_vorticity_3d(w.omega_tilde);
  for (int c = 0; c < 3; ++c) std::copy(ut.component(c).begin(), ut.component(c).end(), v.component(c).begin());
  std::copy(w.theta_tilde.component(0).begin(), w.theta_tilde.component(0).end(), v.component(3).begin());
  embed_plane(bar, v);
  return v;
}

}  // namespace bvx
