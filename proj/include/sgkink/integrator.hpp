/// @file integrator.hpp
/// @brief Time stepping for f_tt - f_xx + sin f = 0 and the conserved-quantity,
/// energy-momentum tensor and residual diagnostics.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgkink/field.hpp"

namespace sgk {

/// Time-stepping scheme.
///  - Leapfrog: f^{n+1} = 2f^n - f^{n-1} + dt^2 (D2 f^n - sin f^n) with a Taylor
///    first step, run in its velocity-Verlet form so phi_t is available at
///    every step; fourth-order finite differences in space.
///  - Composition4: fourth-order symplectic composition of five Leapfrog
///    substeps with weights (p, p, 1-4p, p, p), p = 1/(4 - 4^(1/3)).
///  - StrangSplitSpectral: kick-drift-kick splitting; the drift is the exact
///    Fourier propagator of phi_tt - phi_xx + phi = 0 and the kick adds
///    phi - sin(phi) to phi_t. Zero topology only.
/// The finite-difference schemes hold the two outermost nodes on each side at
/// their initial values (clamped tails) and require dt <= 0.9 dx.
struct Scheme {
  enum class Kind { Leapfrog, Composition4, StrangSplitSpectral };
  Kind kind = Kind::Composition4;
  double dt = 1.0 / 32.0;
};

std::string to_string(Scheme::Kind k);
Scheme::Kind scheme_kind_from_string(const std::string& s);

/// Raised when any sample exceeds 1e6 in magnitude or becomes non-finite.
struct BlowUpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Snapshots at a uniform interval, starting with the initial state.
struct Trajectory {
  std::vector<State> states;
  double interval = 0.0;

  /// Index of the snapshot at time t; throws std::out_of_range if absent.
  std::size_t index_of(double t) const;
};

using Observer = std::function<void(const State&)>;

/// Evolves s0 to t_end, calling observer at s0.time and every snapshot_every.
/// The step is shrunk if needed so that snapshot_every is a whole number of
/// steps; t_end - s0.time must be a whole number of snapshot intervals.
/// Returns the final state.
State evolve_observed(const State& s0, const Scheme& scheme, double t_end,
                      double snapshot_every, const Observer& observer);

/// Evolves and stores every snapshot.
Trajectory evolve(const State& s0, const Scheme& scheme, double t_end, double snapshot_every);

/// f_tt - f_xx + sin f at snapshot time t, with a three-point difference in time.
Field pde_residual(const Trajectory& traj, double t);

struct Conserved {
  double E0 = 0.0;  ///< energy
  double P = 0.0;   ///< momentum, integral of f_t f_x / 2
  double E2 = 0.0;  ///< second higher conserved quantity
  double E4 = 0.0;  ///< fourth higher conserved quantity
};

/// Conserved quantities of a single state. Light-cone derivatives
/// d_(+/-) = (d_t +/- d_x)/sqrt(2) are formed with phi_tt replaced by
/// phi_xx - sin(phi) and phi_ttt by phi_txx - cos(phi) phi_t.
Conserved conserved_quantities(const State& s);

struct EnergyMomentum {
  Field T00;
  Field T01;
  Field T11;
};

/// T00 = (f_t^2 + f_x^2)/2 + 1 - cos f, T01 = f_t f_x,
/// T11 = (f_t^2 + f_x^2)/2 - 1 + cos f.
EnergyMomentum em_tensor(const State& s);

struct TensorResidual {
  Field r0;  ///< d_t T00 - d_x T10
  Field r1;  ///< d_t T01 - d_x T11
};

/// Residuals of the two local conservation laws at snapshot time t.
TensorResidual em_conservation_residual(const Trajectory& traj, double t);

/// Writes each snapshot as snapshot_<k>.sgf into dir.
void write_trajectory(const Trajectory& traj, const std::string& dir);

}  // namespace sgk
