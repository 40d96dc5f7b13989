#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bvx/field.hpp"
#include "bvx/linops.hpp"
#include "bvx/reference.hpp"
#include "bvx/spectral_ops.hpp"

namespace bvx {

enum class Formulation { full, background_perturbation };

/// In background mode v holds the perturbation around the analytic vortex
/// family `background`; otherwise v is the full field.
struct SimState {
  SpectralField v;
  double t = 0.0;
  Formulation formulation = Formulation::full;
  VortexParams background;
  PhysParams params;
};

struct StepperConfig {
  double dt = 0.0;
  double cfl_target = 0.5;
  /// Drop the nonlinearity: each step is then exactly the linear propagator.
  bool linear_only = false;
};

/// Pointwise background fields of the vortex family at one time.
struct BackgroundFields {
  double t = -1.0;
  PhysicalField v;  ///< plane, components (u1, u2, u3, theta)
};

/// Evaluates -P[(u.grad) v] pseudo-spectrally in divergence form. Barotropic
/// products are taken on the plane, the x3-dependent remainder on the volume,
/// so a state with no baroclinic content never acquires any through roundoff.
class NonlinearTerm {
 public:
  explicit NonlinearTerm(GridPtr grid);
  /// rhs <- -P[(u.grad) v] evaluated at the state's time.
  void evaluate(const SimState& s, SpectralField& rhs);

 private:
  const BackgroundFields& background(const SimState& s);

  GridPtr grid_;
  BackgroundFields bg_;
};

SpectralField nonlinear_rhs(const SimState& state);

/// Lawson (integrating-factor) RK4 around the exact mode propagator.
class Stepper {
 public:
  Stepper(GridPtr grid, const PhysParams& params, const StepperConfig& cfg);
  double dt() const { return dt_; }
  void step(SimState& s);

 private:
  GridPtr grid_;
  PhysParams params_;
  StepperConfig cfg_;
  double dt_;
  Propagator full_;
  Propagator half_;
  NonlinearTerm nonlinear_;
  // Stage buffers reused across steps.
  SimState stage_;
  SpectralField k1_, k2_, k3_, k4_, tmp_, ev_, acc_;
};

/// One step; builds the propagator tables on every call.
SimState step(const SimState& state, const StepperConfig& cfg);

/// Largest |u| on the grid including the background velocity.
double max_velocity(const SimState& s);

/// dt = cfl * dx / max|u|, shrunk so that it divides `interval`; equals
/// `interval` when the flow is at rest.
double choose_dt(const SimState& s, double cfl, double interval);

/// Flush subnormals to zero on the calling thread (x86 only); a decaying
/// baroclinic field then underflows to exact zeros instead of slowing down.
void enable_flush_to_zero();

struct RunControl {
  double T = 0.0;
  double output_interval = 0.0;
  /// > 0 enables the lambda/r split with this band cutoff.
  double lambda_R = 0.0;
  bool keep_snapshots = false;
  bool keep_remainders = false;
  double blowup_factor = 1e6;
  /// Called with every recorded sample (after the series are appended).
  std::function<void(const SimState&)> observer;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SimState> snapshots;
  std::vector<SpectralField> remainders;
  std::map<std::string, std::vector<double>> series;
  double dt = 0.0;
  std::size_t steps = 0;
};

/// Integrates from s.t to s.t + T, recording at every output interval
/// (including t = 0). Throws nan-detected when a norm is not finite or grows
/// beyond blowup_factor times its initial value.
Trajectory integrate(SimState s, const StepperConfig& cfg, const RunControl& ctl);

/// r = v_tilde - lambda with lambda(t) = E(t) P_R v_tilde_0, recorded together
/// with the full run.
struct LambdaRSplit {
  std::vector<double> times;
  std::vector<SpectralField> lambda;
  std::vector<SpectralField> r;
};

LambdaRSplit lambda_r_split(const SpectralField& v0, double R, const PhysParams& params, double T, double dt,
                            bool linear_only = false);

}  // namespace bvx
