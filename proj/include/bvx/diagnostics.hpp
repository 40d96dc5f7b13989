#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bvx/dynamics.hpp"

namespace bvx {

struct TimeSeries {
  std::string name;
  std::vector<double> t;
  std::vector<double> v;

  std::size_t size() const { return t.size(); }
  /// Throws invalid-spec unless t is strictly increasing and values finite.
  void validate() const;
};

enum class DecayModel { algebraic, exponential };

struct DecayFit {
  DecayModel model = DecayModel::algebraic;
  /// algebraic: v ~ amplitude (1+t)^exponent; exponential: v ~ amplitude e^{-exponent t}.
  double exponent = 0.0;
  double amplitude = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// RMS of the log-space residual.
  double rms_residual = 0.0;
  std::size_t samples = 0;
};

struct Window {
  double t0;
  double t1;
};

/// Default window: the last half of the run in tau = log(1+t).
Window default_window(const TimeSeries& ts);

/// Least squares in (log(1+t), log v) or (t, log v). Throws
/// nonpositive-values or insufficient-samples (fewer than 4 in the window).
DecayFit fit_decay(const TimeSeries& ts, DecayModel model, std::optional<Window> window = std::nullopt);

struct OscillationFit {
  double omega = 0.0;
  /// atan2(b, a) for v = (1+t)^p (a cos wt + b sin wt).
  double phase = 0.0;
  double envelope_exponent = 0.0;
  double amplitude = 0.0;
  double rms_residual = 0.0;
  /// Less than one period resolved, or no oscillating content.
  bool degenerate = false;
};

/// Separable least squares: for each trial (omega, p) the amplitudes (a, b)
/// are solved linearly; omega comes from a scan up to the 8-samples-per-period
/// limit refined by golden section, p by golden section on [-6, 6].
/// Throws undersampled when the fitted period spans fewer than 8 samples.
OscillationFit fit_oscillation(const TimeSeries& ts);

/// Functionals of one trajectory sample.
struct Functionals {
  double omega3_L1 = 0.0;
  double omega3_L2sq = 0.0;
  double grad_r_L2sq = 0.0;
  double Psi = 0.0;
  double vt_H1 = 0.0;
};

Functionals functionals(const SimState& s, const SpectralField* r);

/// Series {omega3_L1, omega3_L2sq, grad_r_L2sq, Psi, vt_H1} over the stored
/// snapshots of a trajectory. Throws missing-split when the remainders are
/// absent.
std::vector<TimeSeries> energy_functionals(const Trajectory& traj);

/// (|S vt|, |(1 - S) vt|) over the stored snapshots.
std::pair<TimeSeries, TimeSeries> geostrophic_norms(const Trajectory& traj, const PhysParams& params);

/// Series recorded inline by `integrate`, by name.
TimeSeries series(const Trajectory& traj, const std::string& name);

struct SweepRow {
  double Omega = 0.0;
  double eta = 0.0;
  /// I(T) for each requested horizon.
  std::vector<double> I;
};

struct SweepResult {
  std::vector<double> horizons;
  std::vector<SweepRow> rows;
  /// Slope of log I(last horizon) against log eta over the largest decade.
  double slope = 0.0;
  /// The eta-range used for the slope.
  double eta_lo = 0.0;
  double eta_hi = 0.0;
};

/// For each Omega, evolves lambda(t) = E(t) P_R v0 with the exact propagator
/// and accumulates I = sum_t |lambda(t)|_inf dt (left rectangle rule) up to
/// each horizon. v0 must be baroclinic; remove_geostrophic drops S v0 first.
/// With threads > 1 the Omega values are spread over workers, each with its
/// own grid; rows keep the order of Omegas.
SweepResult dispersive_sweep(const SpectralField& v0, const PhysParams& base, const std::vector<double>& Omegas,
                             double R, const std::vector<double>& horizons, double dt, bool remove_geostrophic,
                             int threads = 1);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bvx
