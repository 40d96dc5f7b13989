#pragma once

#include <span>
#include <vector>

#include "bvx/grid.hpp"

namespace bvx {

enum class FrameTag { stationary, rotating };

/// Vertical extent of a field: the full layer or a single x3-independent plane.
enum class Layout { volume, plane };

/// Fourier coefficients of a real multi-component field, half-spectrum layout
/// [component][iz][j2][j1]. Coefficients use mean-value normalization: the
/// (0,0,0) entry equals the spatial mean of the field.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(GridPtr grid, int ncomp, Layout layout = Layout::volume);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int ncomp() const { return ncomp_; }
  int nz() const { return nz_; }
  Layout layout() const { return nz_ == 1 ? Layout::plane : Layout::volume; }
  std::size_t modes() const { return modes_; }

  FrameTag frame() const { return frame_; }
  void set_frame(FrameTag f) { frame_ = f; }

  std::size_t index(int iz, int j2, int j1) const {
    return (static_cast<std::size_t>(iz) * grid_->n() + j2) * grid_->nh() + j1;
  }
  cplx& at(int c, int iz, int j2, int j1) { return data_[c * modes_ + index(iz, j2, j1)]; }
  cplx at(int c, int iz, int j2, int j1) const { return data_[c * modes_ + index(iz, j2, j1)]; }

  std::span<cplx> component(int c) { return {data_.data() + c * modes_, modes_}; }
  std::span<const cplx> component(int c) const { return {data_.data() + c * modes_, modes_}; }
  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  void set_zero();
  bool same_shape(const SpectralField& o) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += a * x
  void axpy(double a, const SpectralField& x);

  /// Largest coefficient magnitude; zero means the field is identically zero.
  double max_abs() const;

 private:
  GridPtr grid_;
  int ncomp_ = 0;
  int nz_ = 0;
  std::size_t modes_ = 0;
  FrameTag frame_ = FrameTag::stationary;
  std::vector<cplx> data_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Point values [component][iz][j2][j1] on the collocation grid.
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(GridPtr grid, int ncomp, Layout layout = Layout::volume);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int ncomp() const { return ncomp_; }
  int nz() const { return nz_; }
  std::size_t points() const { return points_; }

  std::size_t index(int iz, int j2, int j1) const {
    return (static_cast<std::size_t>(iz) * grid_->n() + j2) * grid_->n() + j1;
  }
  double& at(int c, int iz, int j2, int j1) { return values_[c * points_ + index(iz, j2, j1)]; }
  double at(int c, int iz, int j2, int j1) const { return values_[c * points_ + index(iz, j2, j1)]; }

  std::span<double> component(int c) { return {values_.data() + c * points_, points_}; }
  std::span<const double> component(int c) const { return {values_.data() + c * points_, points_}; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Fill every component by evaluating f(c, x1, x2, x3).
  template <class F>
  void fill(F&& f) {
    const Grid& g = *grid_;
    for (int c = 0; c < ncomp_; ++c)
      for (int iz = 0; iz < nz_; ++iz)
        for (int j2 = 0; j2 < g.n(); ++j2)
          for (int j1 = 0; j1 < g.n(); ++j1)
            at(c, iz, j2, j1) = f(c, g.x(j1), g.x(j2), nz_ == 1 ? 0.0 : g.z(iz));
  }

 private:
  GridPtr grid_;
  int ncomp_ = 0;
  int nz_ = 0;
  std::size_t points_ = 0;
  std::vector<double> values_;
};

/// Visit every stored mode as f(index, iz, j2, j1, wavevector).
template <class F>
void for_each_mode(const Grid& g, int nz, F&& f) {
  const int n = g.n();
  const int nh = g.nh();
  std::size_t idx = 0;
  for (int iz = 0; iz < nz; ++iz) {
    const double k3 = g.k3(iz, nz);
    for (int j2 = 0; j2 < n; ++j2) {
      const double k2 = g.k2(j2);
      for (int j1 = 0; j1 < nh; ++j1, ++idx) f(idx, iz, j2, j1, Wavevector{g.k1(j1), k2, k3});
    }
  }
}

PhysicalField to_physical(const SpectralField& s);
SpectralField to_spectral(const PhysicalField& p);

/// Zero every mode outside the dealias box (and the Nyquist planes).
void apply_dealias(SpectralField& s);

/// Make the j1 = 0 and j1 = N/2 planes exactly Hermitian-symmetric.
void enforce_hermitian(SpectralField& s);

/// Stress-free parity on the doubled period: components flagged even keep
/// c(-n) = c(n), odd ones c(-n) = -c(n). No-op for periodic grids or planes.
void enforce_parity(SpectralField& s, std::span<const int> parity);

/// Parity of the state vector (u1, u2, u3, theta): even, even, odd, odd.
inline constexpr int kStateParity[4] = {+1, +1, -1, -1};

}  // namespace bvx
