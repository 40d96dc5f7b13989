#pragma once

#include <array>
#include <vector>

#include "bvx/field.hpp"

namespace bvx {

struct OseenValue {
  double phi0 = 0.0;
  std::array<double, 2> u0{};
};

/// phi0 = exp(-|xi|^2/4) / (4 pi) and its swirl velocity
/// (1 - exp(-|xi|^2/4)) / (2 pi |xi|^2) (-xi2, xi1).
OseenValue oseen(double xi1, double xi2);

struct VortexParams {
  double A = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double Gamma = 0.0;
};

struct VortexValue {
  double omega3 = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;
  double theta = 0.0;
};

/// Free-space vortex family at (t, x):
///   omega3 = A/(1+t) phi0,  u_h = A/sqrt(1+t) u0,
///   (u3, theta) = R(Gamma t)(B1, B2) phi0 / (1+t),
/// with phi0, u0 evaluated at x/sqrt(1+t) and R(a) = [[c, s], [-s, c]].
VortexValue vortex_solution(const VortexParams& p, double t, double x1, double x2);

/// The same family on the torus of side L: the Gaussian profile is summed
/// over periodic images. Only A = 0 is representable (zero mean vorticity).
VortexValue vortex_solution_periodic(const VortexParams& p, double t, double x1, double x2, double L);

/// (u3, theta) amplitudes of the family: R(Gamma t)(B1, B2).
std::array<double, 2> vortex_phase(const VortexParams& p, double t);

/// Sample the family on the grid as a 4-component volume state (x3-independent).
/// Periodic sampling requires A = 0.
SpectralField sample_vortex(const GridPtr& grid, const VortexParams& p, double t, bool periodized);

/// Plane scalar omega3 of the free-space family, sampled on the grid.
SpectralField sample_vortex_vorticity(const GridPtr& grid, const VortexParams& p, double t);

// ---------------------------------------------------------------------------
// Hermite functions of the scaled operator.

/// Probabilists' Hermite polynomial He_n(x).
double hermite_he(int n, double x);

/// H_alpha(xi) = (2^|alpha| / alpha!) e^{|xi|^2/4} d^alpha e^{-|xi|^2/4}.
double hermite_poly(int a1, int a2, double xi1, double xi2);
/// phi_alpha = d^alpha phi0.
double hermite_function(int a1, int a2, double xi1, double xi2);

struct HermiteProjection {
  PhysicalField Pn;
  PhysicalField Qn;
  /// Coefficients int H_alpha f, ordered by |alpha| then alpha1 descending.
  std::vector<double> coefficients;
  std::vector<std::array<int, 2>> indices;
  double tail_fraction = 0.0;
};

/// P_n f = sum_{|alpha| <= n} (int H_alpha f) phi_alpha by box quadrature.
/// f is a 1-component plane field whose grid coordinates are read as xi.
/// Throws tail-mass when the weighted mass of f in the outer 10% of the box
/// exceeds tail_tol times the total.
HermiteProjection hermite_projection(const PhysicalField& f, int n, double tail_tol = 1e-6);

// ---------------------------------------------------------------------------
// Scaling variables xi = x / sqrt(1+t), tau = log(1+t).

enum class Amplitude { vorticity, velocity };

/// A field resampled on a fixed xi-grid and multiplied by its amplitude power.
struct ScaledSnapshot {
  PhysicalField values;  ///< on the xi-grid (coordinates of xi_grid)
  GridPtr xi_grid;
  double tau = 0.0;
};

/// Resample a plane or volume field at x = xi sqrt(1+t) using its Fourier
/// series, then multiply vorticities by (1+t) and velocities by sqrt(1+t).
/// The default xi-grid has side L / sqrt(1+t) and the same N, which makes the
/// map exactly invertible. Throws extrapolation if the xi-box maps outside
/// the physical box.
ScaledSnapshot to_scaled(const SpectralField& s, double t, Amplitude kind, GridPtr xi_grid = nullptr);
/// Inverse map onto the physical grid.
SpectralField from_scaled(const ScaledSnapshot& sc, Amplitude kind, const GridPtr& x_grid);

/// Evaluate the real Fourier series of a plane field (component c) on the
/// tensor grid x1 x x2; entry [b * x1.size() + a] is at (x1[a], x2[b]).
std::vector<double> evaluate_plane(const SpectralField& s, int c, const std::vector<double>& x1,
                                   const std::vector<double>& x2);

}  // namespace bvx
