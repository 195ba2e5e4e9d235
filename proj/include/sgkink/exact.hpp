/// @file exact.hpp
/// @brief Closed-form sine-Gordon solutions (kink, antikink, breather, wobbling
/// kink) with first derivatives, Lorentz boosts, and the kink identity kit.
#pragma once

#include <vector>

#include "sgkink/field.hpp"

namespace sgk {

/// Traveling kink parameters: velocity beta in (-1,1) and centre x0.
struct KinkParams {
  double beta = 0.0;
  double x0 = 0.0;

  KinkParams() = default;
  KinkParams(double beta_, double x0_);
  double gamma() const;
  /// Baecklund parameter sqrt((1+beta)/(1-beta)) = gamma*(1+beta).
  double a() const;
  /// Inverse of a(): beta = (a^2-1)/(a^2+1).
  static KinkParams from_a(double a, double x0);
};

/// Breather with velocity v, frequency parameter beta in (0, gamma_v) and phase
/// offsets x1 (temporal) and x2 (spatial).
struct BreatherParams {
  double v = 0.0;
  double beta = 0.5;
  double x1 = 0.0;
  double x2 = 0.0;

  BreatherParams() = default;
  BreatherParams(double v_, double beta_, double x1_, double x2_);
  double gamma_v() const;
  double alpha() const;
};

/// Value and first derivatives at a space-time point.
struct PointValue {
  double f = 0.0;
  double f_t = 0.0;
  double f_x = 0.0;
};

enum class SolutionKind { Kink, Antikink, Breather, WobblingKink, Zero };

/// A closed-form solution, optionally composed with a sequence of Lorentz boosts.
struct ExactSolution {
  SolutionKind kind = SolutionKind::Zero;
  KinkParams kink;          ///< Kink and Antikink
  BreatherParams breather;  ///< Breather
  double wobble = 0.0;      ///< WobblingKink amplitude parameter in (-1,1)
  std::vector<double> boosts;  ///< applied in order, innermost first

  static ExactSolution zero();
  static ExactSolution make_kink(KinkParams p);
  static ExactSolution make_antikink(KinkParams p);
  static ExactSolution make_breather(BreatherParams p);
  static ExactSolution make_wobbling_kink(double beta);

  Topology topology() const;
};

/// f, f_t, f_x at (t, x).
PointValue evaluate(const ExactSolution& sol, double t, double x);

/// Samples (f, f_t) on the grid. Throws std::invalid_argument when the end
/// values are further than 1e-12 from the asymptotic constants.
State sample_state(const ExactSolution& sol, const Grid& grid, double t);

/// Kink identities at (t, x): Q, Q_x, Q_t, sin(Q/2) = sech, cos(Q/2) = -tanh.
struct KinkIdentities {
  double Q = 0.0;
  double Q_x = 0.0;
  double Q_t = 0.0;
  double sin_half = 0.0;
  double cos_half = 0.0;
};

KinkIdentities kink_identities(const KinkParams& p, double t, double x);

/// Composes the solution with f(t,x) -> f(gamma(t - beta x), gamma(x - beta t)).
ExactSolution lorentz_boost_solution(const ExactSolution& sol, double beta);

/// Overflow-safe sech.
double sech(double z);

/// Q(t, .; beta, x0) and Q_t sampled on a grid, as a Kink-topology state.
State kink_state(const KinkParams& p, const Grid& grid, double t);

}  // namespace sgk
