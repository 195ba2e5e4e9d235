#include "sgkink/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "fft.hpp"

namespace sgk {

std::string to_string(Scheme::Kind k) {
  switch (k) {
    case Scheme::Kind::Leapfrog: return "leapfrog";
    case Scheme::Kind::Composition4: return "composition4";
    case Scheme::Kind::StrangSplitSpectral: return "strang-spectral";
  }
  return "unknown";
}

Scheme::Kind scheme_kind_from_string(const std::string& s) {
  if (s == "leapfrog") return Scheme::Kind::Leapfrog;
  if (s == "composition4") return Scheme::Kind::Composition4;
  if (s == "strang-spectral") return Scheme::Kind::StrangSplitSpectral;
  throw std::invalid_argument("unknown scheme kind: " + s);
}

std::size_t Trajectory::index_of(double t) const {
  for (std::size_t k = 0; k < states.size(); ++k)
    if (std::abs(states[k].time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  throw std::out_of_range("Trajectory: no snapshot at t = " + std::to_string(t));
}

namespace {

constexpr double kBlowUp = 1e6;

void check_bounded(const std::vector<double>& a, const std::vector<double>& b, double t) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!(std::abs(a[j]) <= kBlowUp) || !(std::abs(b[j]) <= kBlowUp))
      throw BlowUpError("evolve: solution exceeded 1e6 at t = " + std::to_string(t));
  }
}

// Finite-difference stepper on raw arrays; the two outermost nodes on each side
// are frozen.
class FdStepper {
 public:
  FdStepper(const State& s0, Scheme::Kind kind)
      : f_(s0.phi.values), g_(s0.phi_t.values), a_(f_.size(), 0.0), n_(f_.size()),
        inv12h2_(1.0 / (12.0 * s0.grid().dx * s0.grid().dx)) {
    for (std::size_t j : {std::size_t{0}, std::size_t{1}, n_ - 2, n_ - 1}) g_[j] = 0.0;
    if (kind == Scheme::Kind::Leapfrog) {
      weights_ = {1.0};
    } else {
      const double p = 1.0 / (4.0 - std::cbrt(4.0));
      weights_ = {p, p, 1.0 - 4.0 * p, p, p};
    }
    accel();
  }

  void step(double dt) {
    for (double w : weights_) verlet(w * dt);
  }

  std::vector<double>& f() { return f_; }
  std::vector<double>& g() { return g_; }

 private:
  void accel() {
    const double* f = f_.data();
    double* a = a_.data();
    for (std::size_t i = 2; i + 2 < n_; ++i) {
      a[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * inv12h2_ -
             std::sin(f[i]);
    }
  }

  // Kick-drift-kick; the acceleration at the end is reused by the next call.
  void verlet(double h) {
    const std::size_t lo = 2, hi = n_ - 2;
    for (std::size_t i = lo; i < hi; ++i) g_[i] += 0.5 * h * a_[i];
    for (std::size_t i = lo; i < hi; ++i) f_[i] += h * g_[i];
    accel();
    for (std::size_t i = lo; i < hi; ++i) g_[i] += 0.5 * h * a_[i];
  }

  std::vector<double> f_, g_, a_;
  std::size_t n_;
  double inv12h2_;
  std::vector<double> weights_;
};

// Spectral splitting with consecutive half kicks merged into one full kick.
class SpectralStepper {
 public:
  SpectralStepper(const State& s0, double dt)
      : n_(s0.grid().n), dt_(dt), phi_(s0.phi.values), work_(n_) {
    detail::rfft_forward(s0.phi.values, P_);
    detail::rfft_forward(s0.phi_t.values, V_);
    const auto k = detail::wavenumbers(n_, s0.grid().dx);
    const std::size_t m = n_ / 2 + 1;
    c_.resize(m);
    s_over_w_.resize(m);
    w_s_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double w = std::sqrt(1.0 + k[j] * k[j]);
      c_[j] = std::cos(w * dt);
      s_over_w_[j] = std::sin(w * dt) / w;
      w_s_[j] = w * std::sin(w * dt);
    }
  }

  // Advances `steps` full steps starting and ending on a synchronized state.
  void advance(std::size_t steps) {
    kick(0.5 * dt_);
    for (std::size_t s = 0; s < steps; ++s) {
      drift();
      sync_phi();
      kick(s + 1 == steps ? 0.5 * dt_ : dt_);
    }
  }

  State state(const State& templ, double t) {
    State out = templ;
    out.time = t;
    out.phi.values = phi_;
    std::vector<cplx> tmp = V_;
    detail::rfft_inverse(tmp, out.phi_t.values);
    return out;
  }

  const std::vector<double>& phi() const { return phi_; }

 private:
  void drift() {
    for (std::size_t j = 0; j < P_.size(); ++j) {
      const cplx p = P_[j], v = V_[j];
      P_[j] = c_[j] * p + s_over_w_[j] * v;
      V_[j] = -w_s_[j] * p + c_[j] * v;
    }
  }

  void sync_phi() {
    std::vector<cplx> tmp = P_;
    detail::rfft_inverse(tmp, phi_);
  }

  void kick(double h) {
    for (std::size_t j = 0; j < n_; ++j) work_[j] = phi_[j] - std::sin(phi_[j]);
    detail::rfft_forward(work_, N_);
    for (std::size_t j = 0; j < V_.size(); ++j) V_[j] += h * N_[j];
  }

  std::size_t n_;
  double dt_;
  std::vector<double> phi_, work_;
  std::vector<cplx> P_, V_, N_;
  std::vector<double> c_, s_over_w_, w_s_;
};

}  // namespace

State evolve_observed(const State& s0, const Scheme& scheme, double t_end,
                      double snapshot_every, const Observer& observer) {
  s0.validate();
  if (!(t_end > s0.time)) throw std::invalid_argument("evolve: t_end must exceed the start time");
  if (!(scheme.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (!(snapshot_every > 0.0)) throw std::invalid_argument("evolve: snapshot interval must be positive");
  const double span = t_end - s0.time;
  const double blocks_real = span / snapshot_every;
  const auto blocks = static_cast<std::size_t>(std::llround(blocks_real));
  if (blocks == 0 || std::abs(blocks_real - static_cast<double>(blocks)) > 1e-9 * blocks_real)
    throw std::invalid_argument("evolve: t_end - t0 must be a multiple of snapshot_every");
  const auto steps_per_block =
      static_cast<std::size_t>(std::ceil(snapshot_every / scheme.dt - 1e-9));
  const double dt = snapshot_every / static_cast<double>(steps_per_block);
  const double dx = s0.grid().dx;

  if (observer) observer(s0);

  if (scheme.kind == Scheme::Kind::StrangSplitSpectral) {
    if (s0.topology != Topology::Zero)
      throw std::invalid_argument("evolve: spectral splitting requires Zero topology");
    SpectralStepper st(s0, dt);
    State cur = s0;
    for (std::size_t b = 1; b <= blocks; ++b) {
      st.advance(steps_per_block);
      cur = st.state(s0, s0.time + static_cast<double>(b) * snapshot_every);
      check_bounded(cur.phi.values, cur.phi_t.values, cur.time);
      if (observer) observer(cur);
    }
    return cur;
  }

  if (dt > 0.9 * dx) throw std::invalid_argument("evolve: CFL violation, dt > 0.9 dx");
  FdStepper st(s0, scheme.kind);
  State cur = s0;
  for (std::size_t b = 1; b <= blocks; ++b) {
    for (std::size_t k = 0; k < steps_per_block; ++k) st.step(dt);
    cur.time = s0.time + static_cast<double>(b) * snapshot_every;
    cur.phi.values = st.f();
    cur.phi_t.values = st.g();
    check_bounded(cur.phi.values, cur.phi_t.values, cur.time);
    if (observer) observer(cur);
  }
  return cur;
}

Trajectory evolve(const State& s0, const Scheme& scheme, double t_end, double snapshot_every) {
  Trajectory traj;
  traj.interval = snapshot_every;
  evolve_observed(s0, scheme, t_end, snapshot_every,
                  [&traj](const State& s) { traj.states.push_back(s); });
  return traj;
}

namespace {

std::size_t interior_index(const Trajectory& traj, double t) {
  const std::size_t k = traj.index_of(t);
  if (k == 0 || k + 1 >= traj.states.size())
    throw std::invalid_argument("trajectory diagnostic: t has no neighbours on both sides");
  return k;
}

}  // namespace

Field pde_residual(const Trajectory& traj, double t) {
  const std::size_t k = interior_index(traj, t);
  const Field& a = traj.states[k - 1].phi;
  const Field& b = traj.states[k].phi;
  const Field& c = traj.states[k + 1].phi;
  const double h = traj.states[k + 1].time - traj.states[k].time;
  const Field fxx = spatial_derivative(b, 2);
  Field r(b.grid);
  for (std::size_t j = 0; j < r.size(); ++j)
    r[j] = (c[j] - 2.0 * b[j] + a[j]) / (h * h) - fxx[j] + std::sin(b[j]);
  return r;
}

EnergyMomentum em_tensor(const State& s) {
  const Field fx = spatial_derivative(s.phi, 1);
  EnergyMomentum T{Field(s.grid()), Field(s.grid()), Field(s.grid())};
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const double ft = s.phi_t[j];
    const double kin = 0.5 * (ft * ft + fx[j] * fx[j]);
    const double pot = 1.0 - std::cos(s.phi[j]);
    T.T00[j] = kin + pot;
    T.T01[j] = ft * fx[j];
    T.T11[j] = kin - pot;
  }
  return T;
}

TensorResidual em_conservation_residual(const Trajectory& traj, double t) {
  const std::size_t k = interior_index(traj, t);
  const double h = traj.states[k + 1].time - traj.states[k - 1].time;
  const EnergyMomentum before = em_tensor(traj.states[k - 1]);
  const EnergyMomentum now = em_tensor(traj.states[k]);
  const EnergyMomentum after = em_tensor(traj.states[k + 1]);
  const Field dT10 = spatial_derivative(now.T01, 1);
  const Field dT11 = spatial_derivative(now.T11, 1);
  TensorResidual r{Field(now.T00.grid), Field(now.T00.grid)};
  for (std::size_t j = 0; j < r.r0.size(); ++j) {
    r.r0[j] = (after.T00[j] - before.T00[j]) / h - dT10[j];
    r.r1[j] = (after.T01[j] - before.T01[j]) / h - dT11[j];
  }
  return r;
}

Conserved conserved_quantities(const State& s) {
  const Field& phi = s.phi;
  const Field& pt = s.phi_t;
  const Field px = spatial_derivative(phi, 1);
  const Field pxx = spatial_derivative(phi, 2);
  const Field pxxx = spatial_derivative(pxx, 1);
  const Field ptx = spatial_derivative(pt, 1);
  const Field ptxx = spatial_derivative(pt, 2);
  const double r2 = std::sqrt(2.0);
  const double r8 = 2.0 * r2;
  Conserved q;
  double e0 = 0.0, p = 0.0, e2 = 0.0, e4 = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const double f = phi[j], c = std::cos(f), sn = std::sin(f);
    e0 += 0.5 * (pt[j] * pt[j] + px[j] * px[j]) + 1.0 - c;
    p += 0.5 * pt[j] * px[j];
    // Light-cone derivatives with time derivatives eliminated through the PDE.
    const double m1 = (pt[j] - px[j]) / r2;
    const double p1 = (pt[j] + px[j]) / r2;
    const double m2 = (2.0 * pxx[j] - sn - 2.0 * ptx[j]) / 2.0;
    const double p2 = (2.0 * pxx[j] - sn + 2.0 * ptx[j]) / 2.0;
    const double base3 = 4.0 * ptxx[j] - c * pt[j];
    const double odd3 = 4.0 * pxxx[j] - 3.0 * c * px[j];
    const double m3 = (base3 - odd3) / r8;
    const double p3 = (base3 + odd3) / r8;
    const double mmp = -0.5 * c * m1;  // d_- d_- d_+ phi
    const double ppm = -0.5 * c * p1;  // d_+ d_+ d_- phi
    // Second-order currents (a) and their mirror images (b).
    const double j2a = m2 * m2 - 0.25 * std::pow(m1, 4) + 0.5 * m1 * m1 * c;
    const double j2b = p2 * p2 - 0.25 * std::pow(p1, 4) + 0.5 * p1 * p1 * c;
    e2 += j2a + j2b;
    // Fourth-order currents.
    auto j4 = [&](double d1, double d2, double d3, double d21) {
      const double plus = d3 * d3 + 2.5 * d1 * d1 * d2 * d2 + (5.0 / 3.0) * std::pow(d1, 3) * d3 +
                          0.125 * std::pow(d1, 6);
      const double minus = -(5.0 / 3.0) * std::pow(d1, 3) * d21 - 0.375 * std::pow(d1, 4) * c +
                           1.5 * d1 * d1 * d2 * sn + 0.5 * d2 * d2 * c;
      return plus + minus;
    };
    e4 += j4(m1, m2, m3, mmp) + j4(p1, p2, p3, ppm);
  }
  const double dx = phi.grid.dx;
  q.E0 = e0 * dx;
  q.P = p * dx;
  q.E2 = e2 * dx;
  q.E4 = e4 * dx;
  return q;
}

void write_trajectory(const Trajectory& traj, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    write_snapshot(traj.states[k], (std::filesystem::path(dir) / ("snapshot_" + std::to_string(k) + ".sgf")).string());
}

}  // namespace sgk
