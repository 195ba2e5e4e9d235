#include "sgkink/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace sgk {

std::string to_string(CenterMode m) {
  return m == CenterMode::Orthogonality ? "orthogonality" : "pi-level";
}

CenterMode center_mode_from_string(const std::string& s) {
  if (s == "orthogonality") return CenterMode::Orthogonality;
  if (s == "pi-level") return CenterMode::PiLevel;
  throw std::invalid_argument("unknown center mode: " + s);
}

namespace {

double kink_gamma(double beta) { return KinkParams(beta, 0.0).gamma(); }

// dG/dc = int f gamma tanh(z) sech(z) dx, z = gamma(x - beta t - c).
double orthogonality_slope(const Field& f, double beta, double t, double c) {
  const double gamma = kink_gamma(beta);
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double z = gamma * (f.grid.x(j) - beta * t - c);
    acc += f[j] * gamma * std::tanh(z) * sech(z);
  }
  return acc * f.grid.dx;
}

double solve_orthogonality(const Field& f, double beta, double t, double guess) {
  double c = guess;
  double G = orthogonality_residual(f, beta, t, c);
  for (int it = 0; it < 60 && std::abs(G) >= 1e-11; ++it) {
    const double d = orthogonality_slope(f, beta, t, c);
    if (!(std::abs(d) > 1e-3)) throw std::runtime_error("solve_center: degenerate orthogonality slope");
    const double step = G / d;
    if (!std::isfinite(step) || std::abs(step) > 2.0)
      throw std::runtime_error("solve_center: orthogonality Newton diverged");
    c -= step;
    G = orthogonality_residual(f, beta, t, c);
  }
  if (!(std::abs(G) < 1e-10)) throw std::runtime_error("solve_center: orthogonality Newton did not converge");
  return c;
}

double solve_pi_level(const Field& f, double beta, double t, double guess) {
  const Grid& g = f.grid;
  const double target = beta * t + guess;
  const double u = (target - g.x_min) / g.dx;
  if (u < 4.0 || u > static_cast<double>(g.n) - 5.0)
    throw std::runtime_error("solve_center: guess outside grid");
  const long j0 = static_cast<long>(std::lround(u));
  const long reach = static_cast<long>(std::ceil(3.0 / g.dx));
  const auto h = [&](long j) { return f[static_cast<std::size_t>(j)] - kPi; };
  long lo = -1;
  for (long k = 0; k <= reach && lo < 0; ++k) {
    for (long j : {j0 + k, j0 - k - 1}) {
      if (j < 3 || j + 4 >= static_cast<long>(g.n)) continue;
      if (h(j) == 0.0 || (h(j) < 0.0) != (h(j + 1) < 0.0)) {
        lo = j;
        break;
      }
    }
  }
  if (lo < 0) throw std::runtime_error("solve_center: no sign change near guess");
  double a = g.x(static_cast<std::size_t>(lo));
  double b = a + g.dx;
  const auto F = [&](double x) { return interpolate(f, x) - kPi; };
  double Fa = F(a);
  for (int it = 0; it < 30; ++it) {
    const double m = 0.5 * (a + b);
    const double Fm = F(m);
    if ((Fm < 0.0) == (Fa < 0.0)) {
      a = m;
      Fa = Fm;
    } else {
      b = m;
    }
  }
  double x = 0.5 * (a + b);
  double Fx = F(x);
  const double dh = 1e-6;
  for (int it = 0; it < 20 && std::abs(Fx) >= 1e-12; ++it) {
    const double d = (F(x + dh) - F(x - dh)) / (2.0 * dh);
    if (!(std::abs(d) > 0.0)) break;
    const double nx = x - Fx / d;
    if (!std::isfinite(nx) || std::abs(nx - x) > g.dx) break;
    x = nx;
    Fx = F(x);
  }
  if (!(std::abs(Fx) < 1e-10)) throw std::runtime_error("solve_center: pi-level Newton did not converge");
  return x - beta * t;
}

}  // namespace

double orthogonality_residual(const Field& f, double beta, double t, double c) {
  const double gamma = kink_gamma(beta);
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * sech(gamma * (f.grid.x(j) - beta * t - c));
  return acc * f.grid.dx - kPi * kPi / gamma;
}

double solve_center(const Field& f, double beta, double t, double guess, CenterMode mode) {
  return mode == CenterMode::Orthogonality ? solve_orthogonality(f, beta, t, guess)
                                           : solve_pi_level(f, beta, t, guess);
}

double center_velocity(const State& f, double beta, double center) {
  const Grid& g = f.grid();
  const double gamma = kink_gamma(beta);
  const Field fx = smooth_derivative(f.phi);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double w = sech(gamma * (g.x(j) - beta * f.time - center));
    num += (f.phi_t[j] + beta * fx[j]) * w;
    den += fx[j] * w;
  }
  if (!(std::abs(den * g.dx) >= 1.0)) throw std::runtime_error("center_velocity: denominator below 1");
  return -num / den;
}

State reference_kink(const Grid& g, double beta, double center, double t) {
  return kink_state(KinkParams(beta, center), g, t);
}

TrackRecord make_record(const State& f, double beta, double center, const TrackOptions& opt) {
  const Grid& g = f.grid();
  const State K = reference_kink(g, beta, center, f.time);
  const Field d = f.phi - K.phi;
  const Field dt = f.phi_t - K.phi_t;
  const Field dx = spatial_derivative(d, 1);
  TrackRecord r;
  r.time = f.time;
  r.center = center;
  r.center_velocity = center_velocity(f, beta, center);
  r.diff_linf = norm(d, NormSpec::lp(INFINITY));
  r.diff_deriv_l2plinf = norm(dx, NormSpec::l2_plus_linf()) + norm(dt, NormSpec::l2_plus_linf());
  r.diff_pair_energy = norm(f, K, NormSpec::pair_energy());
  for (double R : opt.exterior_R) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
      if (std::abs(g.x(j)) >= f.time + R) acc += d[j] * d[j] + dx[j] * dx[j] + dt[j] * dt[j];
    r.exterior_l2.push_back(std::sqrt(acc * g.dx));
  }
  return r;
}

Tracker::Tracker(double beta, double x0_guess, TrackOptions opt) : guess_(x0_guess), opt_(std::move(opt)) {
  out_.beta = beta;
}

const TrackRecord& Tracker::observe(const State& f) {
  double c;
  try {
    c = solve_center(f.phi, out_.beta, f.time, guess_, opt_.mode);
  } catch (const std::exception& e) {
    throw std::runtime_error("track: at t = " + std::to_string(f.time) + ": " + e.what());
  }
  if (!out_.records.empty() && std::abs(c - out_.records.back().center) >= 0.5)
    throw std::runtime_error("track: center jumped at t = " + std::to_string(f.time));
  out_.records.push_back(make_record(f, out_.beta, c, opt_));
  guess_ = c;
  return out_.records.back();
}

TrackedTrajectory track(const Trajectory& traj, double beta, double x0_guess, const TrackOptions& opt) {
  Tracker tr(beta, x0_guess, opt);
  for (const State& s : traj.states) tr.observe(s);
  return tr.result();
}

double exterior_bound_shape(double t, double x, double s) {
  const double r = std::abs(x) - t;
  const double jr = std::sqrt(1.0 + r * r);
  return std::min(std::pow(t, -0.25) * std::pow(jr, -0.25), std::pow(jr, -s));
}

ExteriorDecay exterior_decay_check(const State& f, const State& K, double R, double s) {
  if (f.grid() != K.grid()) throw std::invalid_argument("exterior_decay_check: grid mismatch");
  const double t = f.time;
  if (!(t >= 1.0)) throw std::invalid_argument("exterior_decay_check: requires t >= 1");
  const Grid& g = f.grid();
  const Field d = f.phi - K.phi;
  const Field dx = spatial_derivative(d, 1);
  ExteriorDecay out;
  bool any = false;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double x = g.x(j);
    if (std::abs(x) < t + R) continue;
    any = true;
    const double v = std::max({std::abs(d[j]), std::abs(dx[j]), std::abs(f.phi_t[j] - K.phi_t[j])});
    const double shape = exterior_bound_shape(t, x, s);
    if (v > out.lhs) {
      out.lhs = v;
      out.bound = shape;
      out.x_worst = x;
    }
    out.ratio = std::max(out.ratio, v / shape);
  }
  if (!any) throw std::invalid_argument("exterior_decay_check: empty exterior region");
  if (out.lhs == 0.0) {
    // Identically zero difference: report the bound at the region edge.
    out.x_worst = t + R;
    out.bound = exterior_bound_shape(t, out.x_worst, s);
  }
  return out;
}

DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series, double t1, double t2) {
  std::vector<double> X, Y;
  for (const auto& [t, v] : series) {
    if (t < t1 || t > t2) continue;
    if (!(v > 0.0) || !(t > 0.0)) throw std::invalid_argument("fit_decay_exponent: non-positive sample");
    X.push_back(std::log(t));
    Y.push_back(std::log(v));
  }
  if (X.size() < 10) throw std::invalid_argument("fit_decay_exponent: fewer than 10 samples in window");
  const double n = static_cast<double>(X.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
    syy += (Y[i] - my) * (Y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_decay_exponent: degenerate time window");
  DecayFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.samples = X.size();
  return fit;
}

void write_csv(const TrackedTrajectory& tt, const std::vector<double>& exterior_R, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "t,center,center_velocity,diff_linf,diff_deriv_l2plinf,diff_pair_energy";
  for (double R : exterior_R) os << ",exterior_l2_R" << R;
  os << '\n' << std::setprecision(17);
  for (const auto& r : tt.records) {
    os << r.time << ',' << r.center << ',' << r.center_velocity << ',' << r.diff_linf << ','
       << r.diff_deriv_l2plinf << ',' << r.diff_pair_energy;
    for (double e : r.exterior_l2) os << ',' << e;
    os << '\n';
  }
  if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace sgk
