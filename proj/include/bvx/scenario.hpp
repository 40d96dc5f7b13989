#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bvx/diagnostics.hpp"
#include "bvx/dynamics.hpp"

namespace bvx {

enum class InitType { vortex, vortex_plus_perturbation, random_baroclinic, single_mode, from_snapshot, wave_packet };
enum class Perturbation { none, dipole, random };
enum class Branch { g, plus, minus };

struct InitSpec {
  InitType type = InitType::vortex;
  // vortex family
  double A = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  // vortex_plus_perturbation: dipole is eps * A * d1 phi0 in omega3 (eps =
  // perturbation_amplitude); random adds random_baroclinic data.
  Perturbation perturbation = Perturbation::dipole;
  double perturbation_amplitude = 0.1;
  // random_baroclinic (band in physical wavenumbers |k|)
  std::uint64_t seed = 1;
  double k_min = 0.0;
  double k_max = 4.0;
  /// RMS amplitude of the baroclinic field.
  double amplitude = 1.0;
  bool remove_geostrophic = false;
  /// RMS of an added mean-zero barotropic velocity perturbation.
  double barotropic_amplitude = 0.0;
  // single_mode: integer mode indices (m1, m2, n)
  std::array<int, 3> mode{1, 0, 1};
  Branch branch = Branch::plus;
  // from_snapshot
  std::string path;
  // wave_packet: theta = env cos(2 pi n z), u1 = env sin(2 pi n z), env Gaussian
  double sigma = 0.3;
  int vertical_mode = 1;
  double band_R = 8.0;
};

struct TimeSpec {
  double T = 0.0;
  /// 0 selects dt from the CFL target.
  double dt = 0.0;
  double cfl = 0.5;
  bool linear_only = false;
};

struct OutputSpec {
  /// Sampling interval; 0 means T/200.
  double cadence = 0.0;
  std::string directory;
  std::vector<std::string> series;
  /// Write a snapshot at every sample.
  bool snapshots = false;
};

struct FitRequest {
  std::string series;
  DecayModel model = DecayModel::algebraic;
  /// Empty window -> default (last half in tau).
  double t0 = -1.0;
  double t1 = -1.0;
};

struct SweepSpec {
  std::vector<double> Omegas{10, 30, 100, 300, 1000};
  std::vector<double> horizons{0.2, 0.4};
  double dt = 5e-4;
  double R = 8.0;
  bool keep_geostrophic = false;
};

struct Scenario {
  std::string experiment = "custom";
  GridSpec grid;
  PhysParams physics;
  Formulation formulation = Formulation::full;
  InitSpec init;
  TimeSpec time;
  OutputSpec output;
  std::vector<FitRequest> fits;
  /// > 0 enables the lambda/r split.
  double split_R = 0.0;
  SweepSpec sweep;
  /// Approximation warnings collected during validation.
  std::vector<std::string> warnings;

  double cadence() const { return output.cadence > 0.0 ? output.cadence : time.T / 200.0; }
};

/// Parse `section.key = value` lines. Throws parse-error with the line number
/// and validation-error naming the violated invariant.
Scenario parse_scenario(const std::string& text);

/// Re-check the invariants of a scenario assembled in code.
void validate_scenario(Scenario& sc);

/// Canonical text form; parse_scenario(to_text(s)) reproduces s.
std::string to_text(const Scenario& sc);

/// Initial state for a validated scenario.
SimState initial_state(const Scenario& sc, const GridPtr& grid);

/// Random band-limited, solenoidal, baroclinic data with unit-free RMS
/// `amplitude`; deterministic in `seed`.
SpectralField random_baroclinic(const GridPtr& grid, const PhysParams& params, std::uint64_t seed, double k_min,
                                double k_max, double amplitude, bool remove_geostrophic);

/// RMS value |s|_L2 / L^(d/2) over the box.
double rms(const SpectralField& s);

}  // namespace bvx
