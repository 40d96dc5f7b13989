#pragma once

#include <array>
#include <vector>

#include "bvx/field.hpp"

namespace bvx {

using Vec4 = std::array<cplx, 4>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;

struct PhysParams {
  double Omega = 0.0;
  double Gamma = 1.0;
  double nu = 1.0;

  /// Omega / Gamma; throws invalid-spec when Gamma = 0.
  double eta() const;
  void validate() const;
};

/// Printed form of P J_eta P for one wavevector. Periodic: real entries in
/// k3 = 2 pi n. Stress-free: the sine/cosine-basis matrix in k3 = pi n.
/// Throws zero-wavevector at k = 0.
Mat4 pjp_matrix(const Wavevector& k, const PhysParams& params, Boundary bc);

/// Eigenstructure of P J_eta P. Vectors are in the exponential basis of the
/// (possibly doubled) vertical period; to_sine_cosine maps them to the basis
/// of the stress-free printed matrix.
struct ModeFrame {
  Wavevector k;
  Vec4 a_g{};
  Vec4 a_0{};
  Vec4 a_plus{};
  Vec4 a_minus{};
  double p_eta = 0.0;
};

ModeFrame mode_frame(const Wavevector& k, const PhysParams& params, Boundary bc);

/// D v with D = diag(1, 1, i, i).
Vec4 to_sine_cosine(const Vec4& v);

/// The skew matrix M acting on exponential-basis coefficients; the linear
/// generator is -nu|k|^2 I + Gamma M. Zero rows and columns at k = 0.
Mat4 skew_matrix(const Wavevector& k, double eta);

SpectralField helmholtz_project(const SpectralField& s);

/// Per-mode projection onto a_g; zero at k = 0.
SpectralField geostrophic_project(const SpectralField& s, const PhysParams& params);
/// (1 - S) s.
SpectralField ageostrophic_part(const SpectralField& s, const PhysParams& params);

/// The smooth cutoff profile: 1 on [0,1], 0 on [2, inf).
double band_profile(double r);
/// Multiply each mode by band_profile(|k| / R).
SpectralField band_project(const SpectralField& s, double R);

/// exp((-nu|k|^2 I + Gamma M) dt), assembled from the mode frame. At k = 0
/// this is exp(-J_{Omega,Gamma} dt).
Mat4 linear_propagator(const Wavevector& k, const PhysParams& params, double dt, Boundary bc);

/// Exact linear flow for one fixed step h, tabulated per mode. Each table
/// entry is a real 4x4 matrix.
class Propagator {
 public:
  Propagator() = default;
  Propagator(GridPtr grid, const PhysParams& params, double h);

  double step() const { return h_; }
  /// In place, s <- E(h) s. Volume fields with four components only.
  void apply(SpectralField& s) const;
  /// out <- E(h) in.
  void apply(const SpectralField& in, SpectralField& out) const;

 private:
  GridPtr grid_;
  double h_ = 0.0;
  std::vector<std::array<double, 16>> table_;
};

/// Real 4x4 matrix exp((-nu|k|^2 + Gamma M) h) in the closed form used by
/// the stepper.
std::array<double, 16> propagator_entries(const Wavevector& k, const PhysParams& params, double h);

SpectralField apply_propagator(const SpectralField& s, const PhysParams& params, double dt);

/// Rotates the barotropic pair (w_h, Theta) stored as a 4-component plane
/// field [w1, w2, Theta1, Theta2]: (w, T) -> (c w + s T, -s w + c T).
SpectralField rotate_frame(const SpectralField& pair, double angle);
/// Same rotation on a scalar pair.
std::array<double, 2> rotate_frame(const std::array<double, 2>& pair, double angle);

}  // namespace bvx
