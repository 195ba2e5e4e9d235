/// @file backlund.hpp
/// @brief Baecklund transform between a near-zero solution phi and a near-kink
/// solution f, the functional F = (F1, F2, F3) whose zeros encode it, the
/// linearized solve used by the Newton scheme, and the cosh-kernel operator I.
#pragma once

#include <stdexcept>

#include "json.hpp"

#include "sgkink/exact.hpp"
#include "sgkink/field.hpp"

namespace sgk {

/// Baecklund parameter a > 0 with derived velocity beta = (a^2-1)/(a^2+1).
struct BacklundParam {
  double a = 1.0;

  explicit BacklundParam(double a_);
  static BacklundParam from_beta(double beta);
  double beta() const;
  double gamma() const;
};

/// Raised when a Newton iteration fails; carries the last residual.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual_)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

struct BacklundResidual {
  Field R1;  ///< f_x - phi_t - (1/a) sin((f+phi)/2) - a sin((f-phi)/2)
  Field R2;  ///< f_t - phi_x - (1/a) sin((f+phi)/2) + a sin((f-phi)/2)
};

/// Residuals of the Baecklund system at the common time of f and phi.
/// Spatial derivatives here and in the transforms use smooth_derivative.
BacklundResidual backlund_residual(const State& f, const State& phi, double a);

struct ForwardOptions {
  double max_substep = 1.0 / 128.0;  ///< RK4 step cap; each cell is split evenly
};

/// Integrates f_x = phi_t + (1/a) sin((f+phi)/2) + a sin((f-phi)/2) outward
/// from f(center) = pi with RK4, then sets f_t from the second equation.
/// phi must be Zero topology; throws std::runtime_error if the tails do not
/// settle at 0 and 2*pi.
State forward_transform(const State& phi, double a, double center, const ForwardOptions& opt = {});

/// Base point of the functional: reference kink Q(t, .; beta0, x0).
struct FContext {
  double beta0 = 0.0;
  double t = 0.0;
  double x0 = 0.0;
};

struct FTriple {
  Field F1;
  Field F2;
  double F3 = 0.0;
};

/// Evaluates F at (delta, y, v0, v1, u0, u1) with a = a0 + delta. The kink
/// Q0 = Q(t, .; beta0, x0) and Q1 = Q_t are sampled on the grid of v0.
FTriple eval_F(double delta, double y, const Field& v0, const Field& v1, const Field& u0,
               const Field& u1, const FContext& ctx);

struct LinearF2Solution {
  double lambda = 0.0;
  Field w;
};

/// Solves -w_x - gamma0 cos(Q0/2) w + lambda (1 + a0^-2) sin(Q0/2) = g for a
/// decaying w. lambda comes from the solvability condition
/// int lambda (1 + a0^-2) sech^2 - g sech = 0 and w from the cosh-kernel
/// integrals taken inward from each tail.
LinearF2Solution solve_linearized_F2(const Field& g, const FContext& ctx);

struct InverseOptions {
  double tolerance = 1e-10;  ///< on ||F2||_2
  int max_iterations = 50;
};

struct InverseResult {
  double delta = 0.0;
  double y = 0.0;
  State phi;                  ///< (v0, v1) as a Zero-topology state
  double residual_norm = 0.0; ///< max(||F2||_2, |F3|)
  int iterations = 0;
  double beta = 0.0;  ///< beta(a0 + delta)
  double y0 = 0.0;    ///< x0_guess + y
};

/// Recovers (delta, y, phi) from a near-kink state f: damped Newton on F2 with
/// the linearization frozen at the base point, then v1 from F1 = 0, then
/// scalar Newton for y on F3 = 0. Throws ConvergenceError on divergence.
InverseResult inverse_transform(const State& f, double beta0, double x0_guess,
                                const InverseOptions& opt = {});

/// {delta, y, beta, y0, residual_norm, iterations, phi_norms {l2, linf, dt_l2, dt_linf, h1xl2}}.
nlohmann::ordered_json to_json(const InverseResult& r);

/// (I F)(x) = int_{c}^{x} cosh(gamma(y-c))/cosh(gamma(x-c)) F(y) dy with
/// c = beta t + center, by cumulative Simpson quadrature outward from c.
Field operator_I(const Field& F, double beta, double center, double t);

/// Leading-order f - Q(., beta, center) predicted from phi:
/// I F - gamma/(2 cosh(gamma(x-c))) int (I F) sech(gamma(y-c)) dy with
/// F = phi_t - beta gamma cos(Q/2) phi.
Field reconstruct_difference(const State& phi, double beta, double center);

}  // namespace sgk
