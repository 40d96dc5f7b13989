#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace bvx {

using cplx = std::complex<double>;

enum class Boundary { periodic, stress_free };

/// Discretization of the layer: a periodic box [-L/2, L/2)^2 in x_h and the
/// vertical direction. For stress-free walls the layer [0,1] is reflected onto
/// the doubled period [0,2) and Nv counts points on that doubled period.
struct GridSpec {
  double L = 6.283185307179586;
  int N = 8;
  int Nv = 4;
  Boundary bc = Boundary::periodic;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws Error(invalid_spec) on odd or too-small sizes, L <= 0 or a
  /// dealias fraction outside (0, 1].
  void validate() const;
};

struct Wavevector {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;

  double kh2() const { return k1 * k1 + k2 * k2; }
  double norm2() const { return kh2() + k3 * k3; }
};

class FftEngine;

/// Wavenumber tables, dealias masks and transform plans for one GridSpec.
///
/// Spectral arrays use the r2c half-spectrum layout [iz][j2][j1] with
/// j1 in [0, N/2], j2 in [0, N) and iz in [0, nz). A "volume" field has
/// nz = Nv, a "plane" (barotropic, x3-independent) field has nz = 1.
///
/// The transform engine carries scratch buffers: a Grid must not be used for
/// transforms from two threads at once.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  Boundary bc() const { return spec_.bc; }
  double L() const { return spec_.L; }
  int n() const { return spec_.N; }
  int nv() const { return spec_.Nv; }
  int nh() const { return spec_.N / 2 + 1; }

  /// Length of the vertical transform period: 1 (periodic) or 2 (stress-free).
  double vertical_period() const { return spec_.bc == Boundary::periodic ? 1.0 : 2.0; }

  /// Signed integer mode index for a full-length horizontal FFT index.
  int mode_h(int j) const { return j < spec_.N / 2 ? j : j - spec_.N; }
  int mode_v(int iz) const { return iz < spec_.Nv / 2 ? iz : iz - spec_.Nv; }

  double k1(int j1) const { return dk_ * j1; }
  double k2(int j2) const { return dk_ * mode_h(j2); }
  double k3(int iz, int nz) const { return nz == 1 ? 0.0 : dkz_ * mode_v(iz); }
  Wavevector wavevector(int iz, int j2, int j1, int nz) const { return {k1(j1), k2(j2), k3(iz, nz)}; }

  double dk() const { return dk_; }
  double dkz() const { return dkz_; }

  /// Horizontal wavenumbers in ascending signed order, (2pi/L) * {-N/2 .. N/2-1}.
  std::vector<double> horizontal_wavenumbers() const;

  /// Largest |mode index| kept by the dealias mask.
  int cutoff_h() const { return cutoff_h_; }
  int cutoff_v() const { return cutoff_v_; }
  bool keep(int iz, int j2, int j1, int nz) const;

  double x(int j) const { return -0.5 * spec_.L + spec_.L * j / spec_.N; }
  double z(int l) const { return vertical_period() * l / spec_.Nv; }

  std::size_t spectral_size(int nz) const {
    return static_cast<std::size_t>(nz) * spec_.N * nh();
  }
  std::size_t physical_size(int nz) const {
    return static_cast<std::size_t>(nz) * spec_.N * spec_.N;
  }

  /// Weight of a half-spectrum entry when summing over the full spectrum.
  double hermitian_weight(int j1) const {
    return (j1 == 0 || j1 == spec_.N / 2) ? 1.0 : 2.0;
  }

  FftEngine& fft() const { return *fft_; }

 private:
  GridSpec spec_;
  double dk_;
  double dkz_;
  int cutoff_h_;
  int cutoff_v_;
  std::unique_ptr<FftEngine> fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(const GridSpec& spec);

}  // namespace bvx
