#pragma once

#include "bvx/field.hpp"

namespace bvx {

/// Barotropic part Q v: keeps the n = 0 modes. Under stress-free walls this
/// is the cosine n = 0 mode, so the odd components u3 and theta drop out.
SpectralField vertical_mean(const SpectralField& s);
/// (1 - Q) v.
SpectralField baroclinic_part(const SpectralField& s);

/// The n = 0 layer of a volume field as a plane field.
SpectralField extract_plane(const SpectralField& s);
/// Overwrite the n = 0 layer of a volume field with a plane field.
void embed_plane(const SpectralField& plane, SpectralField& volume);

/// i k x u of the first three components.
SpectralField curl(const SpectralField& s);
/// i k f of a scalar (component 0).
SpectralField gradient(const SpectralField& f);
/// i k . u of the first three components (two for a 2-component plane field).
SpectralField divergence(const SpectralField& s);
/// (d2 f, -d1 f) of a plane scalar.
SpectralField skew_gradient(const SpectralField& f);
/// d1 u2 - d2 u1 of a plane 2-vector.
SpectralField curl2(const SpectralField& u);

/// Mean of |f|^2 over the box and layer, summed over components (Parseval).
double mean_square(const SpectralField& s);
/// L2 norm over [-L/2, L/2]^2 x [0, 1] via Parseval.
double l2_norm(const SpectralField& s);
/// Squared L2 norm of the gradient, summed over components.
double gradient_norm2(const SpectralField& s);
/// H1 norm: sqrt(|f|^2 + |grad f|^2).
double h1_norm(const SpectralField& s);

/// (int |b^m f|^p)^(1/p) with b = (1 + |x_h|^2)^(1/2), by quadrature on the
/// collocation points: rectangle rule in x_h, trapezoid in x3 over [0, 1].
/// |f| is the Euclidean norm over components; p = infinity gives the max.
double weighted_norm(const SpectralField& s, double m, double p);
double weighted_norm(const PhysicalField& f, double m, double p);

struct Moments {
  double A = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
};

/// Box integrals of omega3_bar, u3_bar and theta_bar read from the zero
/// modes, plus an optional background contribution.
Moments moments(const SpectralField& v, const Moments& background = {});

}  // namespace bvx
