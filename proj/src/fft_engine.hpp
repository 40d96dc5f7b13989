#pragma once

#include <fftw3.h>

#include <span>

#include "bvx/grid.hpp"

namespace bvx {

/// FFTW r2c/c2r plans for the volume (nz = Nv) and plane (nz = 1) layouts.
/// Plans are made with FFTW_ESTIMATE so that the chosen algorithm, and hence
/// every output bit, does not depend on timing measurements.
class FftEngine {
 public:
  FftEngine(int n, int nv, double box_length);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  /// in: nz*N*N point values; out: nz*N*(N/2+1) mean-normalized coefficients.
  void forward(std::span<const double> in, std::span<cplx> out, int nz);
  /// in: coefficients; out: point values.
  void inverse(std::span<const cplx> in, std::span<double> out, int nz);

 private:
  struct Plans {
    int nz = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
  };
  Plans& plans_for(int nz);
  void make(Plans& p, int nz);

  int n_;
  int nv_;
  Plans volume_;
  Plans plane_;
};

}  // namespace bvx
