#include "bvx/field.hpp"

#include <algorithm>
#include <cmath>

#include "bvx/error.hpp"
#include "fft_engine.hpp"

namespace bvx {

SpectralField::SpectralField(GridPtr grid, int ncomp, Layout layout)
    : grid_(std::move(grid)), ncomp_(ncomp) {
  nz_ = layout == Layout::plane ? 1 : grid_->nv();
  modes_ = grid_->spectral_size(nz_);
  data_.assign(modes_ * ncomp_, cplx{});
}

void SpectralField::set_zero() { std::fill(data_.begin(), data_.end(), cplx{}); }

bool SpectralField::same_shape(const SpectralField& o) const {
  return grid_ == o.grid_ && ncomp_ == o.ncomp_ && nz_ == o.nz_;
}

static void require_same(const SpectralField& a, const SpectralField& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::shape_mismatch, "spectral fields differ in shape");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : data_) c *= s;
  return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
  require_same(*this, x);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : data_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

PhysicalField::PhysicalField(GridPtr grid, int ncomp, Layout layout)
    : grid_(std::move(grid)), ncomp_(ncomp) {
  nz_ = layout == Layout::plane ? 1 : grid_->nv();
  points_ = grid_->physical_size(nz_);
  values_.assign(points_ * ncomp_, 0.0);
}

PhysicalField to_physical(const SpectralField& s) {
  PhysicalField p(s.grid_ptr(), s.ncomp(), s.layout());
  for (int c = 0; c < s.ncomp(); ++c) s.grid().fft().inverse(s.component(c), p.component(c), s.nz());
  return p;
}

SpectralField to_spectral(const PhysicalField& p) {
  SpectralField s(p.grid_ptr(), p.ncomp(), p.nz() == 1 ? Layout::plane : Layout::volume);
  for (int c = 0; c < p.ncomp(); ++c) {
    for (double v : p.component(c))
      if (!std::isfinite(v)) throw Error(ErrorKind::nan_detected, "non-finite physical value");
    p.grid().fft().forward(p.component(c), s.component(c), p.nz());
  }
  return s;
}

void apply_dealias(SpectralField& s) {
  const Grid& g = s.grid();
  const int nz = s.nz();
  for (int c = 0; c < s.ncomp(); ++c) {
    auto comp = s.component(c);
    for_each_mode(g, nz, [&](std::size_t idx, int iz, int j2, int j1, const Wavevector&) {
      if (!g.keep(iz, j2, j1, nz)) comp[idx] = cplx{};
    });
  }
}

void enforce_hermitian(SpectralField& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  const int nz = s.nz();
  for (int c = 0; c < s.ncomp(); ++c) {
    for (int j1 : {0, n / 2}) {
      for (int iz = 0; iz < nz; ++iz) {
        const int pz = (nz - iz) % nz;
        for (int j2 = 0; j2 < n; ++j2) {
          const int p2 = (n - j2) % n;
          const std::size_t a = s.index(iz, j2, j1);
          const std::size_t b = s.index(pz, p2, j1);
          if (b < a) continue;
          auto comp = s.component(c);
          if (a == b) {
            comp[a] = cplx(comp[a].real(), 0.0);
          } else {
            const cplx avg = 0.5 * (comp[a] + std::conj(comp[b]));
            comp[a] = avg;
            comp[b] = std::conj(avg);
          }
        }
      }
    }
  }
}

void enforce_parity(SpectralField& s, std::span<const int> parity) {
  const Grid& g = s.grid();
  if (g.bc() != Boundary::stress_free || s.nz() == 1) return;
  const int nz = s.nz();
  const int c_max = std::min<int>(s.ncomp(), static_cast<int>(parity.size()));
  for (int c = 0; c < c_max; ++c) {
    const double sign = parity[c];
    auto comp = s.component(c);
    for (int iz = 0; iz < nz; ++iz) {
      const int pz = (nz - iz) % nz;
      if (pz < iz) continue;
      for (int j2 = 0; j2 < g.n(); ++j2)
        for (int j1 = 0; j1 < g.nh(); ++j1) {
          const std::size_t a = s.index(iz, j2, j1);
          const std::size_t b = s.index(pz, j2, j1);
          if (a == b) {
            if (sign < 0) comp[a] = cplx{};
          } else {
            const cplx sym = 0.5 * (comp[a] + sign * comp[b]);
            comp[a] = sym;
            comp[b] = sign * sym;
          }
        }
    }
  }
}

}  // namespace bvx
