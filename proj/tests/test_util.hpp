#pragma once

#include <random>

#include "bvx/field.hpp"

namespace bvx::test {

/// Random real field: uniform coefficients on the dealiased modes, made
/// Hermitian (and parity-consistent on stress-free grids).
inline SpectralField random_field(const GridPtr& g, int ncomp, std::uint64_t seed, Layout layout = Layout::volume) {
  SpectralField s(g, ncomp, layout);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& c : s.data()) c = {u(rng), u(rng)};
  apply_dealias(s);
  if (ncomp == 4) enforce_parity(s, kStateParity);
  enforce_hermitian(s);
  apply_dealias(s);
  return s;
}

inline double max_diff(const SpectralField& a, const SpectralField& b) { return (a - b).max_abs(); }

}  // namespace bvx::test
