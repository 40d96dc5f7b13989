#pragma once

#include "bvx/field.hpp"

namespace bvx {

/// Baroclinic velocity from baroclinic vorticity: u = i k x w / |k|^2.
/// Throws nonzero-barotropic if the n = 0 layer carries content.
SpectralField velocity_from_vorticity_3d(const SpectralField& omega_tilde);

/// Plane velocity from plane vorticity: u_h = i (k2, -k1) w / |k_h|^2, so
/// that curl2(u_h) = w. Zero mode of u_h is 0. Throws nonzero-mean.
SpectralField velocity2d_from_vorticity(const SpectralField& omega3);

/// f with skew_gradient(f) = g; the zero mode of f is set to `mean`.
/// Throws nonsolenoidal if div g exceeds 1e-10 relative.
SpectralField potential_from_skew_gradient(const SpectralField& g, double mean);

/// Vorticity form of a state (u1, u2, u3, theta).
struct VorticityState {
  SpectralField omega3_bar;   ///< plane scalar
  SpectralField omega_h_bar;  ///< plane 2-vector, skew gradient of u3_bar
  SpectralField Theta_bar;    ///< plane 2-vector, skew gradient of theta_bar
  double mean_u3 = 0.0;
  double mean_theta = 0.0;
  SpectralField omega_tilde;  ///< volume 3-vector, n = 0 layer empty
  SpectralField theta_tilde;  ///< volume scalar
};

VorticityState to_vorticity(const SpectralField& v);
/// Inverse of to_vorticity using the three Biot-Savart inversions.
SpectralField from_vorticity(const VorticityState& w);

}  // namespace bvx
