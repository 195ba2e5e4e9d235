#include "sgkink/backlund.hpp"

#include <algorithm>
#include <cmath>

#include "kernel.hpp"

namespace sgk {

BacklundParam::BacklundParam(double a_) : a(a_) {
  if (!(a > 0.0)) throw std::invalid_argument("BacklundParam: a must be positive");
}

BacklundParam BacklundParam::from_beta(double beta) { return BacklundParam(KinkParams(beta, 0.0).a()); }

double BacklundParam::beta() const { return (a * a - 1.0) / (a * a + 1.0); }

double BacklundParam::gamma() const {
  const double b = beta();
  return 1.0 / std::sqrt(1.0 - b * b);
}

namespace {

void require_same(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

double l2(const Field& f) { return std::sqrt(inner_product(f, f)); }

// Index of the last node at or left of x; x must lie inside [x_0, x_{n-1}].
std::size_t node_below(const Grid& g, double x, const char* what) {
  const double u = (x - g.x_min) / g.dx;
  if (u < 0.0 || u > static_cast<double>(g.n - 1))
    throw std::invalid_argument(std::string(what) + ": point outside grid");
  return std::min(static_cast<std::size_t>(std::floor(u)), g.n - 2);
}

}  // namespace

BacklundResidual backlund_residual(const State& f, const State& phi, double a) {
  require_same(f.grid(), phi.grid(), "backlund_residual");
  if (std::abs(f.time - phi.time) > 1e-12 * std::max(1.0, std::abs(f.time)))
    throw std::invalid_argument("backlund_residual: time mismatch");
  if (!(a > 0.0)) throw std::invalid_argument("backlund_residual: a must be positive");
  const Field fx = smooth_derivative(f.phi);
  const Field px = smooth_derivative(phi.phi);
  BacklundResidual r{Field(f.grid()), Field(f.grid())};
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const double sp = std::sin(0.5 * (f.phi[j] + phi.phi[j]));
    const double sm = std::sin(0.5 * (f.phi[j] - phi.phi[j]));
    r.R1[j] = fx[j] - phi.phi_t[j] - sp / a - a * sm;
    r.R2[j] = f.phi_t[j] - px[j] - sp / a + a * sm;
  }
  return r;
}

State forward_transform(const State& phi, double a, double center, const ForwardOptions& opt) {
  phi.validate();
  if (phi.topology != Topology::Zero)
    throw std::invalid_argument("forward_transform: phi must have Zero topology");
  if (!(a > 0.0)) throw std::invalid_argument("forward_transform: a must be positive");
  const Grid& g = phi.grid();
  const std::size_t jc = node_below(g, center, "forward_transform");
  const int sub = std::max(1, static_cast<int>(std::ceil(g.dx / opt.max_substep - 1e-12)));
  const double inv_a = 1.0 / a;

  auto rhs = [&](double x, double f) {
    const double p = interpolate(phi.phi, x);
    const double pt = interpolate(phi.phi_t, x);
    return pt + inv_a * std::sin(0.5 * (f + p)) + a * std::sin(0.5 * (f - p));
  };
  auto rk4 = [&](double x, double f, double h) {
    const double k1 = rhs(x, f);
    const double k2 = rhs(x + 0.5 * h, f + 0.5 * h * k1);
    const double k3 = rhs(x + 0.5 * h, f + 0.5 * h * k2);
    const double k4 = rhs(x + h, f + h * k3);
    return f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto advance = [&](double from, double to, double f) {
    const int m = std::max(1, static_cast<int>(std::ceil(std::abs(to - from) / g.dx * sub - 1e-9)));
    const double h = (to - from) / m;
    for (int i = 0; i < m; ++i) f = rk4(from + i * h, f, h);
    return f;
  };

  Field f(g);
  // Right of the pinning point.
  double val = kPi;
  double pos = center;
  for (std::size_t j = jc + 1; j < g.n; ++j) {
    val = advance(pos, g.x(j), val);
    pos = g.x(j);
    f[j] = val;
  }
  // Left of the pinning point (includes node jc).
  val = kPi;
  pos = center;
  for (std::size_t j = jc + 1; j-- > 0;) {
    val = std::abs(pos - g.x(j)) > 0.0 ? advance(pos, g.x(j), val) : val;
    pos = g.x(j);
    f[j] = val;
  }
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::runtime_error("forward_transform: ODE step failure");

  const Field px = smooth_derivative(phi.phi);
  Field ft(g);
  for (std::size_t j = 0; j < g.n; ++j)
    ft[j] = px[j] + inv_a * std::sin(0.5 * (f[j] + phi.phi[j])) - a * std::sin(0.5 * (f[j] - phi.phi[j]));

  if (std::abs(f.values.front()) > 1e-3 || std::abs(f.values.back() - 2.0 * kPi) > 1e-3)
    throw std::runtime_error("forward_transform: tails did not converge to 0 and 2*pi");
  State out{std::move(f), std::move(ft), phi.time, Topology::Kink};
  out.validate();
  return out;
}

namespace {

struct KinkSamples {
  Field Q0, Q1, Q0x;
};

KinkSamples sample_kink(const Grid& g, const FContext& ctx) {
  const KinkParams p(ctx.beta0, ctx.x0);
  KinkSamples s{Field(g), Field(g), Field(g)};
  for (std::size_t j = 0; j < g.n; ++j) {
    const auto k = kink_identities(p, ctx.t, g.x(j));
    s.Q0[j] = k.Q;
    s.Q1[j] = k.Q_t;
    s.Q0x[j] = k.Q_x;
  }
  return s;
}

Field eval_F2(double a, const Field& v0, const Field& f, const Field& ft) {
  const Field v0x = smooth_derivative(v0);
  Field out(v0.grid);
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = ft[j] - v0x[j] - std::sin(0.5 * (f[j] + v0[j])) / a + a * std::sin(0.5 * (f[j] - v0[j]));
  return out;
}

double eval_F3(double gamma_d, double y, const Field& f, const FContext& ctx) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    acc += f[j] * sech(gamma_d * (f.grid.x(j) - ctx.beta0 * ctx.t - ctx.x0 - y));
  return acc * f.grid.dx - kPi * kPi / gamma_d;
}

double eval_dF3(double gamma_d, double y, const Field& f, const FContext& ctx) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double z = gamma_d * (f.grid.x(j) - ctx.beta0 * ctx.t - ctx.x0 - y);
    acc += f[j] * gamma_d * std::tanh(z) * sech(z);
  }
  return acc * f.grid.dx;
}

}  // namespace

FTriple eval_F(double delta, double y, const Field& v0, const Field& v1, const Field& u0,
               const Field& u1, const FContext& ctx) {
  const Grid& g = v0.grid;
  require_same(g, v1.grid, "eval_F");
  require_same(g, u0.grid, "eval_F");
  require_same(g, u1.grid, "eval_F");
  const double a0 = KinkParams(ctx.beta0, ctx.x0).a();
  if (!(delta > -a0)) throw std::invalid_argument("eval_F: delta must exceed -a0");
  const BacklundParam bp(a0 + delta);
  const double a = bp.a;
  const KinkSamples k = sample_kink(g, ctx);
  const Field f = k.Q0 + u0;
  const Field ft = k.Q1 + u1;
  const Field u0x = smooth_derivative(u0);
  FTriple out{Field(g), eval_F2(a, v0, f, ft), 0.0};
  for (std::size_t j = 0; j < g.n; ++j)
    out.F1[j] = k.Q0x[j] + u0x[j] - v1[j] - std::sin(0.5 * (f[j] + v0[j])) / a -
                a * std::sin(0.5 * (f[j] - v0[j]));
  out.F3 = eval_F3(bp.gamma(), y, f, ctx);
  return out;
}

LinearF2Solution solve_linearized_F2(const Field& g, const FContext& ctx) {
  const Grid& grid = g.grid;
  const KinkParams p(ctx.beta0, ctx.x0);
  const double a0 = p.a(), gamma0 = p.gamma();
  const double c = ctx.beta0 * ctx.t + ctx.x0;
  const double coef = 1.0 + 1.0 / (a0 * a0);

  double proj = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) proj += g[j] * sech(gamma0 * (grid.x(j) - c));
  proj *= grid.dx;
  if (!std::isfinite(proj)) throw std::runtime_error("solve_linearized_F2: quadrature failure");
  // int sech^2(gamma0 y) dy = 2/gamma0.
  const double lambda = gamma0 * proj / (2.0 * coef);

  Field h(grid);
  for (std::size_t j = 0; j < grid.n; ++j)
    h[j] = lambda * coef * sech(gamma0 * (grid.x(j) - c)) - g[j];
  const auto mid = detail::midpoint_values(h);
  // w(x) = int_{-inf}^{x} cosh(gamma0(x-c))/cosh(gamma0(y-c)) h(y) dy on the left and
  // -int_{x}^{inf} (same kernel) h(y) dy on the right; both kernels are <= 1 along the sweep.
  const detail::CoshKernel k{gamma0, c, -1.0};
  std::vector<double> w(grid.n, 0.0);
  const double u = (c - grid.x_min) / grid.dx;
  const std::size_t split = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(grid.n - 2)));
  detail::kernel_sweep(k, h, mid, 0, split, 0.0, w);
  std::vector<double> right(grid.n, 0.0);
  detail::kernel_sweep(k, h, mid, grid.n - 1, split + 1, 0.0, right);
  for (std::size_t j = split + 1; j < grid.n; ++j) w[j] = right[j];
  return {lambda, Field(grid, std::move(w))};
}

InverseResult inverse_transform(const State& f, double beta0, double x0_guess, const InverseOptions& opt) {
  f.validate();
  if (f.topology != Topology::Kink)
    throw std::invalid_argument("inverse_transform: f must have Kink topology");
  const Grid& g = f.grid();
  const FContext ctx{beta0, f.time, x0_guess};
  const double a0 = KinkParams(beta0, x0_guess).a();
  const KinkSamples k = sample_kink(g, ctx);
  const Field u0 = f.phi - k.Q0;

  double delta = 0.0;
  Field v0(g);
  Field F2 = eval_F2(a0, v0, f.phi, f.phi_t);
  double res = l2(F2);
  int it = 0;
  for (; it < opt.max_iterations && res >= opt.tolerance; ++it) {
    Field rhs = -1.0 * F2;
    const LinearF2Solution step = solve_linearized_F2(rhs, ctx);
    double tau = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 12; ++halving, tau *= 0.5) {
      const double trial_delta = delta + tau * step.lambda;
      if (!(trial_delta > -a0)) continue;
      Field trial_v0 = v0 + tau * step.w;
      Field trial_F2 = eval_F2(a0 + trial_delta, trial_v0, f.phi, f.phi_t);
      const double trial_res = l2(trial_F2);
      if (std::isfinite(trial_res) && trial_res < res) {
        delta = trial_delta;
        v0 = std::move(trial_v0);
        F2 = std::move(trial_F2);
        res = trial_res;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(res < opt.tolerance))
    throw ConvergenceError("inverse_transform: Newton on F2 did not converge, residual " +
                               std::to_string(res),
                           res);

  const double a = a0 + delta;
  const Field u0x = smooth_derivative(u0);
  Field v1(g);
  for (std::size_t j = 0; j < g.n; ++j)
    v1[j] = k.Q0x[j] + u0x[j] - std::sin(0.5 * (f.phi[j] + v0[j])) / a -
            a * std::sin(0.5 * (f.phi[j] - v0[j]));

  const double gamma_d = BacklundParam(a).gamma();
  double y = 0.0;
  double F3 = eval_F3(gamma_d, y, f.phi, ctx);
  for (int i = 0; i < 50 && std::abs(F3) > 1e-13; ++i) {
    const double d = eval_dF3(gamma_d, y, f.phi, ctx);
    if (!(std::abs(d) > 1e-3))
      throw ConvergenceError("inverse_transform: degenerate F3 slope", std::abs(F3));
    y -= F3 / d;
    F3 = eval_F3(gamma_d, y, f.phi, ctx);
  }
  if (!(std::abs(F3) < 1e-9))
    throw ConvergenceError("inverse_transform: Newton on F3 did not converge", std::abs(F3));

  InverseResult r;
  r.delta = delta;
  r.y = y;
  r.phi = State{std::move(v0), std::move(v1), f.time, Topology::Zero};
  r.residual_norm = std::max(res, std::abs(F3));
  r.iterations = it;
  r.beta = BacklundParam(a).beta();
  r.y0 = x0_guess + y;
  return r;
}

Field operator_I(const Field& F, double beta, double center, double t) {
  const Grid& g = F.grid;
  const double gamma = KinkParams(beta, center).gamma();
  const double c = beta * t + center;
  const std::size_t jc = node_below(g, c, "operator_I");
  const detail::CoshKernel k{gamma, c, 1.0};
  const auto mid = detail::midpoint_values(F);
  std::vector<double> out(g.n, 0.0);
  // Partial cells from c to its neighbouring nodes, then outward sweeps.
  const double Fc = interpolate(F, c);
  auto partial = [&](std::size_t j) {
    const double xj = g.x(j);
    if (xj == c) return 0.0;
    const double Fm = interpolate(F, 0.5 * (c + xj));
    return detail::kernel_step(k, c, xj, 0.0, Fc, Fm, F[j]);
  };
  detail::kernel_sweep(k, F, mid, jc + 1, g.n - 1, partial(jc + 1), out);
  std::vector<double> left(g.n, 0.0);
  detail::kernel_sweep(k, F, mid, jc, 0, partial(jc), left);
  for (std::size_t j = 0; j <= jc; ++j) out[j] = left[j];
  return Field(g, std::move(out));
}

Field reconstruct_difference(const State& phi, double beta, double center) {
  if (phi.topology != Topology::Zero)
    throw std::invalid_argument("reconstruct_difference: phi must have Zero topology");
  const Grid& g = phi.grid();
  const double gamma = KinkParams(beta, center).gamma();
  const double c = beta * phi.time + center;
  Field F(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    const double cos_half = -std::tanh(gamma * (g.x(j) - c));
    F[j] = phi.phi_t[j] - beta * gamma * cos_half * phi.phi[j];
  }
  const Field I = operator_I(F, beta, center, phi.time);
  double proj = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) proj += I[j] * sech(gamma * (g.x(j) - c));
  proj *= g.dx;
  Field out(g);
  for (std::size_t j = 0; j < g.n; ++j)
    out[j] = I[j] - 0.5 * gamma * sech(gamma * (g.x(j) - c)) * proj;
  return out;
}

nlohmann::ordered_json to_json(const InverseResult& r) {
  const State zero{Field(r.phi.grid()), Field(r.phi.grid()), r.phi.time, Topology::Zero};
  nlohmann::ordered_json j;
  j["delta"] = r.delta;
  j["y"] = r.y;
  j["beta"] = r.beta;
  j["y0"] = r.y0;
  j["residual_norm"] = r.residual_norm;
  j["iterations"] = r.iterations;
  j["phi_norms"] = {{"l2", norm(r.phi.phi, NormSpec::lp(2.0))},
                    {"linf", norm(r.phi.phi, NormSpec::lp(INFINITY))},
                    {"dt_l2", norm(r.phi.phi_t, NormSpec::lp(2.0))},
                    {"dt_linf", norm(r.phi.phi_t, NormSpec::lp(INFINITY))},
                    {"h1xl2", norm(r.phi, zero, NormSpec::pair_energy())}};
  return j;
}

}  // namespace sgk
