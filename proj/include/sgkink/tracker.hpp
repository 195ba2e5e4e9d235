/// @file tracker.hpp
/// @brief Kink center selection, center velocity, per-snapshot difference
/// norms, exterior decay diagnostics and log-log decay fits.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgkink/exact.hpp"
#include "sgkink/field.hpp"
#include "sgkink/integrator.hpp"

namespace sgk {

/// Orthogonality: root of G(c) = int (f - Q(t,.;beta,c)) sech(gamma(x - beta t - c)) dx.
/// PiLevel: c with f(t, beta t + c) = pi.
enum class CenterMode { Orthogonality, PiLevel };

std::string to_string(CenterMode m);
CenterMode center_mode_from_string(const std::string& s);

/// Returns the center c (the offset beyond beta t). Throws std::runtime_error
/// when no sign change is found near the guess or Newton diverges.
double solve_center(const Field& f, double beta, double t, double guess, CenterMode mode);

/// G(c) for the orthogonality mode, by trapezoid quadrature.
double orthogonality_residual(const Field& f, double beta, double t, double c);

/// x'(t) = -int (f_t + beta f_x) sech / int f_x sech, both weights centered
/// at beta t + center. Throws std::runtime_error if |denominator| < 1.
double center_velocity(const State& f, double beta, double center);

struct TrackRecord {
  double time = 0.0;
  double center = 0.0;
  double center_velocity = 0.0;
  double diff_linf = 0.0;           ///< sup |f - K~|
  double diff_deriv_l2plinf = 0.0;  ///< ||f_x - K~_x||_{L2+Linf} + ||f_t - K~_t||_{L2+Linf}
  double diff_pair_energy = 0.0;    ///< ||(f - K~, f_t - K~_t)||_{H1 x L2}
  std::vector<double> exterior_l2;  ///< one entry per configured R
};

struct TrackedTrajectory {
  double beta = 0.0;
  std::vector<TrackRecord> records;
};

struct TrackOptions {
  CenterMode mode = CenterMode::Orthogonality;
  /// Exterior regions |x| >= t + R; the H1 x L2 difference norm is restricted there.
  std::vector<double> exterior_R = {0.0};
};

/// Reference kink K~ = Q(t,.;beta,center) on the state's grid.
State reference_kink(const Grid& g, double beta, double center, double t);

/// Record for a single snapshot given its already solved center.
TrackRecord make_record(const State& f, double beta, double center, const TrackOptions& opt);

/// Tracks every snapshot, seeding each center solve with the previous center.
/// Throws std::runtime_error naming the snapshot time on failure, or when
/// consecutive centers differ by 0.5 or more.
TrackedTrajectory track(const Trajectory& traj, double beta, double x0_guess,
                        const TrackOptions& opt = {});

/// Incremental form of track for use with evolve_observed.
class Tracker {
 public:
  Tracker(double beta, double x0_guess, TrackOptions opt = {});
  const TrackRecord& observe(const State& f);
  const TrackedTrajectory& result() const { return out_; }

 private:
  double guess_;
  TrackOptions opt_;
  TrackedTrajectory out_;
};

struct ExteriorDecay {
  double lhs = 0.0;    ///< sup over |x| >= t+R of max(|d|, |d_x|, |d_t|), d = f - K
  double bound = 0.0;  ///< bound shape at the point attaining lhs
  double ratio = 0.0;  ///< sup over the region of pointwise difference / shape
  double x_worst = 0.0;
};

/// shape(t, x) = min(t^{-1/4} <|x|-t>^{-1/4}, <|x|-t>^{-s}).
double exterior_bound_shape(double t, double x, double s);

/// Compares f with the kink state K on {|x| >= t + R}. Requires t >= 1 and a
/// nonempty region.
ExteriorDecay exterior_decay_check(const State& f, const State& K, double R, double s);

struct DecayFit {
  double exponent = 0.0;
  double prefactor = 0.0;  ///< value ~ prefactor * t^exponent
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of log(value) against log(t) over t in [t1, t2].
/// Requires at least 10 samples in the window, all values > 0.
DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series, double t1,
                            double t2);

/// One CSV row per record: t, center, center_velocity, diff_linf,
/// diff_deriv_l2plinf, diff_pair_energy, exterior_l2_R...
void write_csv(const TrackedTrajectory& tt, const std::vector<double>& exterior_R,
               const std::string& path);

}  // namespace sgk
