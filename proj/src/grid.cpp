#include "bvx/grid.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "bvx/error.hpp"
#include "fft_engine.hpp"

namespace bvx {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::zero_wavevector: return "zero-wavevector";
    case ErrorKind::nonsolenoidal: return "nonsolenoidal";
    case ErrorKind::nonzero_mean: return "nonzero-mean";
    case ErrorKind::nonzero_barotropic: return "nonzero-barotropic";
    case ErrorKind::tail_mass: return "tail-mass";
    case ErrorKind::extrapolation: return "extrapolation";
    case ErrorKind::nan_detected: return "nan-detected";
    case ErrorKind::nonpositive_values: return "nonpositive-values";
    case ErrorKind::insufficient_samples: return "insufficient-samples";
    case ErrorKind::undersampled: return "undersampled";
    case ErrorKind::missing_split: return "missing-split";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::validation_error: return "validation-error";
    case ErrorKind::corrupt_file: return "corrupt-file";
    case ErrorKind::version_mismatch: return "version-mismatch";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::unknown_experiment: return "unknown-experiment";
  }
  return "error";
}

void GridSpec::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::invalid_spec, "L must be positive");
  if (N % 2 != 0) throw Error(ErrorKind::invalid_spec, "N must be even");
  if (Nv % 2 != 0) throw Error(ErrorKind::invalid_spec, "Nv must be even");
  if (N < 8) throw Error(ErrorKind::invalid_spec, "N must be at least 8");
  if (Nv < 4) throw Error(ErrorKind::invalid_spec, "Nv must be at least 4");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw Error(ErrorKind::invalid_spec, "dealias fraction must lie in (0, 1]");
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  dk_ = 2.0 * std::numbers::pi / spec_.L;
  dkz_ = 2.0 * std::numbers::pi / vertical_period();
  // floor with a small guard so that 2/3 * 6 = 4 exactly, not 3.999...
  cutoff_h_ = static_cast<int>(std::floor(spec_.dealias_fraction * (spec_.N / 2) + 1e-12));
  cutoff_v_ = static_cast<int>(std::floor(spec_.dealias_fraction * (spec_.Nv / 2) + 1e-12));
  if (cutoff_h_ >= spec_.N / 2) cutoff_h_ = spec_.N / 2 - 1;
  if (cutoff_v_ >= spec_.Nv / 2) cutoff_v_ = spec_.Nv / 2 - 1;
  fft_ = std::make_unique<FftEngine>(spec_.N, spec_.Nv, spec_.L);
}

Grid::~Grid() = default;

std::vector<double> Grid::horizontal_wavenumbers() const {
  std::vector<double> k(spec_.N);
  for (int j = 0; j < spec_.N; ++j) k[j] = dk_ * (j - spec_.N / 2);
  return k;
}

bool Grid::keep(int iz, int j2, int j1, int nz) const {
  if (j1 > cutoff_h_) return false;
  if (std::abs(mode_h(j2)) > cutoff_h_) return false;
  if (nz > 1 && std::abs(mode_v(iz)) > cutoff_v_) return false;
  return true;
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

// ---------------------------------------------------------------------------

FftEngine::FftEngine(int n, int nv, double) : n_(n), nv_(nv) {
  make(volume_, nv);
  make(plane_, 1);
}

FftEngine::~FftEngine() {
  for (Plans* p : {&volume_, &plane_}) {
    fftw_destroy_plan(p->r2c);
    fftw_destroy_plan(p->c2r);
    fftw_free(p->real);
    fftw_free(p->spec);
  }
}

void FftEngine::make(Plans& p, int nz) {
  const std::size_t nreal = static_cast<std::size_t>(nz) * n_ * n_;
  const std::size_t nspec = static_cast<std::size_t>(nz) * n_ * (n_ / 2 + 1);
  p.nz = nz;
  p.real = fftw_alloc_real(nreal);
  p.spec = fftw_alloc_complex(nspec);
  if (nz == 1) {
    p.r2c = fftw_plan_dft_r2c_2d(n_, n_, p.real, p.spec, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_2d(n_, n_, p.spec, p.real, FFTW_ESTIMATE);
  } else {
    p.r2c = fftw_plan_dft_r2c_3d(nz, n_, n_, p.real, p.spec, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_3d(nz, n_, n_, p.spec, p.real, FFTW_ESTIMATE);
  }
}

FftEngine::Plans& FftEngine::plans_for(int nz) {
  if (nz == 1) return plane_;
  if (nz == nv_) return volume_;
  throw Error(ErrorKind::shape_mismatch, "no transform plan for this vertical size");
}

// The box starts at x = -L/2, which multiplies mode m by (-1)^m relative to
// a box starting at the origin.
void FftEngine::forward(std::span<const double> in, std::span<cplx> out, int nz) {
  Plans& p = plans_for(nz);
  const int nh = n_ / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(nz) * n_ * n_;
  if (in.size() != nreal || out.size() != static_cast<std::size_t>(nz) * n_ * nh)
    throw Error(ErrorKind::shape_mismatch, "forward transform size");
  std::memcpy(p.real, in.data(), nreal * sizeof(double));
  fftw_execute(p.r2c);
  const double scale = 1.0 / static_cast<double>(nreal);
  const auto* src = reinterpret_cast<const cplx*>(p.spec);
  std::size_t idx = 0;
  for (int iz = 0; iz < nz; ++iz)
    for (int j2 = 0; j2 < n_; ++j2)
      for (int j1 = 0; j1 < nh; ++j1, ++idx)
        out[idx] = src[idx] * (((j1 + j2) & 1) ? -scale : scale);
}

void FftEngine::inverse(std::span<const cplx> in, std::span<double> out, int nz) {
  Plans& p = plans_for(nz);
  const int nh = n_ / 2 + 1;
  const std::size_t nreal = static_cast<std::size_t>(nz) * n_ * n_;
  if (out.size() != nreal || in.size() != static_cast<std::size_t>(nz) * n_ * nh)
    throw Error(ErrorKind::shape_mismatch, "inverse transform size");
  auto* dst = reinterpret_cast<cplx*>(p.spec);
  std::size_t idx = 0;
  for (int iz = 0; iz < nz; ++iz)
    for (int j2 = 0; j2 < n_; ++j2)
      for (int j1 = 0; j1 < nh; ++j1, ++idx) dst[idx] = ((j1 + j2) & 1) ? -in[idx] : in[idx];
  fftw_execute(p.c2r);
  std::memcpy(out.data(), p.real, nreal * sizeof(double));
}

}  // namespace bvx
