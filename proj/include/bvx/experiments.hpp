#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bvx/diagnostics.hpp"
#include "bvx/scenario.hpp"

namespace bvx {

struct CatalogEntry {
  std::string name;
  std::string summary;
};

const std::vector<CatalogEntry>& catalog();

/// Preset scenario by name; throws unknown-experiment listing the catalog.
Scenario preset(const std::string& name);

/// One threshold test on a run: pass iff lo <= value <= hi.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct FitRow {
  std::string series;
  /// "algebraic", "exponential", "oscillation" or "loglog".
  std::string model;
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// Oscillation fits only (NaN otherwise).
  double omega = 0.0;
  double phase = 0.0;
};

struct ExperimentResult {
  Scenario scenario;
  Trajectory traj;
  std::vector<FitRow> fits;
  std::vector<Check> checks;
  std::optional<SweepResult> sweep;
  std::optional<SweepResult> sweep_keep_geostrophic;
  double wall_seconds = 0.0;

  bool passed() const;
  const Check* check(const std::string& name) const;
};

struct RunOptions {
  /// Empty: nothing is written.
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  /// Progress messages (may be null).
  std::ostream* progress = nullptr;
};

/// Integrates (or sweeps) the scenario, evaluates the preset's fits and
/// threshold checks and writes series.csv, fits.csv, checks.csv and run.log
/// to out_dir.
ExperimentResult run_experiment(Scenario sc, const RunOptions& opt);
ExperimentResult run_experiment(const std::string& name, const RunOptions& opt);

/// Smallest nu|k|^2 over the modes carrying baroclinic content.
double slowest_decay_rate(const SpectralField& v, const PhysParams& params);

/// Scaled-variable distance of the barotropic perturbation vorticity to the
/// span of phi0: |Q0 W|_L1 with W(xi) = (1+t) omega3'(xi sqrt(1+t)).
/// Also returns the tail fraction seen by the Hermite projection.
std::pair<double, double> qg_distance(const SimState& s);

/// The CSV text of series.csv for a trajectory (columns t, tau, names...).
std::string series_csv(const Trajectory& traj, const std::vector<std::string>& names);

}  // namespace bvx
