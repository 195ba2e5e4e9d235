#include "sgkink/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgk {

double sech(double z) {
  const double e = std::exp(-std::abs(z));
  return 2.0 * e / (1.0 + e * e);
}

KinkParams::KinkParams(double beta_, double x0_) : beta(beta_), x0(x0_) {
  if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("KinkParams: |beta| must be < 1");
}

double KinkParams::gamma() const { return 1.0 / std::sqrt(1.0 - beta * beta); }

double KinkParams::a() const { return std::sqrt((1.0 + beta) / (1.0 - beta)); }

KinkParams KinkParams::from_a(double a, double x0) {
  if (!(a > 0.0)) throw std::invalid_argument("KinkParams::from_a: a must be positive");
  return KinkParams((a * a - 1.0) / (a * a + 1.0), x0);
}

BreatherParams::BreatherParams(double v_, double beta_, double x1_, double x2_)
    : v(v_), beta(beta_), x1(x1_), x2(x2_) {
  if (!(std::abs(v) < 1.0)) throw std::invalid_argument("BreatherParams: |v| must be < 1");
  if (!(beta > 0.0 && beta < gamma_v()))
    throw std::invalid_argument("BreatherParams: beta must lie in (0, gamma_v)");
}

double BreatherParams::gamma_v() const { return 1.0 / std::sqrt(1.0 - v * v); }

double BreatherParams::alpha() const {
  const double g = gamma_v();
  return std::sqrt(g * g - beta * beta);
}

ExactSolution ExactSolution::zero() { return ExactSolution{}; }

ExactSolution ExactSolution::make_kink(KinkParams p) {
  ExactSolution s;
  s.kind = SolutionKind::Kink;
  s.kink = p;
  return s;
}

ExactSolution ExactSolution::make_antikink(KinkParams p) {
  ExactSolution s;
  s.kind = SolutionKind::Antikink;
  s.kink = p;
  return s;
}

ExactSolution ExactSolution::make_breather(BreatherParams p) {
  ExactSolution s;
  s.kind = SolutionKind::Breather;
  s.breather = p;
  return s;
}

ExactSolution ExactSolution::make_wobbling_kink(double beta) {
  if (!(std::abs(beta) < 1.0))
    throw std::invalid_argument("wobbling kink: |beta| must be < 1");
  ExactSolution s;
  s.kind = SolutionKind::WobblingKink;
  s.wobble = beta;
  return s;
}

Topology ExactSolution::topology() const {
  switch (kind) {
    case SolutionKind::Kink:
    case SolutionKind::WobblingKink: return Topology::Kink;
    case SolutionKind::Antikink: return Topology::Antikink;
    default: return Topology::Zero;
  }
}

KinkIdentities kink_identities(const KinkParams& p, double t, double x) {
  const double g = p.gamma();
  const double s = g * (x - p.beta * t - p.x0);
  KinkIdentities k;
  // 4*atan(e^s) evaluated on the side where the exponential cannot overflow.
  k.Q = s <= 0.0 ? 4.0 * std::atan(std::exp(s)) : 2.0 * kPi - 4.0 * std::atan(std::exp(-s));
  k.sin_half = sech(s);
  k.cos_half = -std::tanh(s);
  k.Q_x = 2.0 * g * k.sin_half;
  k.Q_t = -2.0 * p.beta * g * k.sin_half;
  return k;
}

namespace {

PointValue eval_breather(const BreatherParams& p, double t, double x) {
  const double al = p.alpha();
  const double th = al * (t - p.v * x - p.x1);
  const double eta = p.beta * (x - p.v * t - p.x2);
  const double se = sech(eta), te = std::tanh(eta);
  const double c = std::cos(th), s = std::sin(th);
  const double k = p.beta / al;
  const double r = k * c * se;
  const double r_x = k * (al * p.v * s * se - p.beta * c * te * se);
  const double r_t = k * (-al * s * se + p.beta * p.v * c * te * se);
  const double den = 1.0 + r * r;
  return {4.0 * std::atan(r), 4.0 * r_t / den, 4.0 * r_x / den};
}

// W = 4 arg(U + iV) with U, V written as sums of exponentials so a common
// factor e^{-M} can be removed before evaluation; arg and the logarithmic
// derivatives are invariant under that rescaling.
PointValue eval_wobbler(double b, double t, double x) {
  const double w = std::sqrt(1.0 - b * b);
  const double c = std::cos(w * t), s = std::sin(w * t);
  const double M = std::max({b * x, -b * x, x, (1.0 + b) * x, (1.0 - b) * x, 0.0});
  const double ebp = std::exp(b * x - M), ebm = std::exp(-b * x - M), ex = std::exp(x - M);
  const double e1p = std::exp((1.0 + b) * x - M), e1m = std::exp((1.0 - b) * x - M);
  const double e0 = std::exp(-M);
  const double U = 0.5 * (1.0 + b) * ebp + 0.5 * (1.0 - b) * ebm - b * c * ex;
  const double V = 0.5 * (1.0 - b) * e1p + 0.5 * (1.0 + b) * e1m - b * c * e0;
  const double U_x = 0.5 * b * (1.0 + b) * ebp - 0.5 * b * (1.0 - b) * ebm - b * c * ex;
  const double V_x = 0.5 * (1.0 - b) * (1.0 + b) * (e1p + e1m);
  const double U_t = b * w * s * ex;
  const double V_t = b * w * s * e0;
  const double r2 = U * U + V * V;
  return {4.0 * std::atan2(V, U), 4.0 * (U * V_t - V * U_t) / r2, 4.0 * (U * V_x - V * U_x) / r2};
}

PointValue eval_base(const ExactSolution& sol, double t, double x) {
  switch (sol.kind) {
    case SolutionKind::Zero: return {};
    case SolutionKind::Kink: {
      const auto k = kink_identities(sol.kink, t, x);
      return {k.Q, k.Q_t, k.Q_x};
    }
    case SolutionKind::Antikink: {
      const auto k = kink_identities(sol.kink, t, x);
      return {-k.Q, -k.Q_t, -k.Q_x};
    }
    case SolutionKind::Breather: return eval_breather(sol.breather, t, x);
    case SolutionKind::WobblingKink: return eval_wobbler(sol.wobble, t, x);
  }
  return {};
}

PointValue eval_boosted(const ExactSolution& sol, std::size_t depth, double t, double x) {
  if (depth == 0) return eval_base(sol, t, x);
  const double b = sol.boosts[depth - 1];
  const double g = 1.0 / std::sqrt(1.0 - b * b);
  const PointValue in = eval_boosted(sol, depth - 1, g * (t - b * x), g * (x - b * t));
  return {in.f, g * in.f_t - b * g * in.f_x, -b * g * in.f_t + g * in.f_x};
}

}  // namespace

PointValue evaluate(const ExactSolution& sol, double t, double x) {
  return eval_boosted(sol, sol.boosts.size(), t, x);
}

ExactSolution lorentz_boost_solution(const ExactSolution& sol, double beta) {
  if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("lorentz boost: |beta| must be < 1");
  ExactSolution out = sol;
  if (beta != 0.0) out.boosts.push_back(beta);
  return out;
}

State sample_state(const ExactSolution& sol, const Grid& grid, double t) {
  Field f(grid), ft(grid);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const PointValue p = evaluate(sol, t, grid.x(j));
    f[j] = p.f;
    ft[j] = p.f_t;
  }
  // arg is only defined modulo 2*pi, so the wobbler phase is made continuous.
  if (sol.kind == SolutionKind::WobblingKink) {
    const double jump = 8.0 * kPi;
    const std::vector<double> raw = f.values;
    double shift = 0.0;
    for (std::size_t j = 1; j < grid.n; ++j) {
      const double step = raw[j] - raw[j - 1];
      if (step > 0.5 * jump) shift -= jump;
      if (step < -0.5 * jump) shift += jump;
      f[j] = raw[j] + shift;
    }
  }
  const Topology topo = sol.topology();
  const double tol = 1e-12;
  const double left_err = std::max(std::abs(f.values.front() - left_tail(topo)),
                                   std::abs(ft.values.front()));
  const double right_err = std::max(std::abs(f.values.back() - right_tail(topo)),
                                    std::abs(ft.values.back()));
  if (left_err > tol || right_err > tol)
    throw std::invalid_argument("sample_state: grid too narrow, tail error " +
                                std::to_string(std::max(left_err, right_err)));
  State s{std::move(f), std::move(ft), t, topo};
  s.validate();
  return s;
}

State kink_state(const KinkParams& p, const Grid& grid, double t) {
  return sample_state(ExactSolution::make_kink(p), grid, t);
}

}  // namespace sgk
