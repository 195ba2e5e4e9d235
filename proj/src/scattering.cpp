#include "sgkink/scattering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "fft.hpp"
#include "sgkink/exact.hpp"
#include "sgkink/backlund.hpp"

namespace sgk {

WavePacketSpec::WavePacketSpec(double c) : chi_radius(c) {
  if (!(c > 0.0 && c < 0.25)) throw std::invalid_argument("WavePacketSpec: chi_radius must lie in (0, 0.25)");
}

double WavePacketSpec::chi(double y) const {
  const double r = y / chi_radius;
  if (std::abs(r) >= 1.0) return 0.0;
  const double q = 1.0 - r * r;
  return 315.0 / (256.0 * chi_radius) * q * q * q * q;
}

double xi_of_v(double v) {
  if (!(std::abs(v) < 1.0)) throw std::invalid_argument("xi_of_v: |v| must be < 1");
  return v / std::sqrt(1.0 - v * v);
}

double v_of_xi(double xi) { return xi / japanese(xi); }

ComplexField to_complex_u(const State& phi) {
  if (phi.topology != Topology::Zero) throw std::invalid_argument("to_complex_u: requires Zero topology");
  const Field w = bessel_multiplier(phi.phi_t, -1.0);
  ComplexField u(phi.grid());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = cplx(phi.phi[j], w[j]);
  return u;
}

double packet_half_width(const WavePacketSpec& spec, double t, double v) {
  return spec.chi_radius * std::sqrt(t) * std::pow(japanese(xi_of_v(v)), -1.5);
}

cplx wave_packet(const WavePacketSpec& spec, double t, double v, double x) {
  const double jx = japanese(xi_of_v(v));
  const double s = std::pow(jx, 1.5);
  const double amp = s * spec.chi(s * (x - v * t) / std::sqrt(t));
  if (amp == 0.0) return 0.0;
  return amp * std::polar(1.0, -std::sqrt(t * t - x * x));
}

namespace {

// Band-limited refinement of u by an integer power-of-two factor.
ComplexField refine(const ComplexField& u, std::size_t factor) {
  if (factor == 1) return u;
  const std::size_t n = u.size(), N = n * factor;
  std::vector<cplx> spec(u.values);
  detail::fft_forward(spec);
  std::vector<cplx> big(N, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) big[k] = spec[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) big[N - n + k] = spec[k];
  big[n / 2] = 0.5 * spec[n / 2];
  big[N - n / 2] = 0.5 * spec[n / 2];
  detail::fft_inverse(big);
  for (auto& z : big) z *= static_cast<double>(factor);
  return ComplexField(make_grid(u.grid.x_min, u.grid.x_max, N), std::move(big));
}

cplx packet_pairing(const ComplexField& u, double t, double v, const WavePacketSpec& spec) {
  const Grid& g = u.grid;
  const double hw = packet_half_width(spec, t, v);
  const double lo = v * t - hw, hi = v * t + hw;
  if (lo <= g.x_min || hi >= g.x(g.n - 1))
    throw std::invalid_argument("gamma_profile: packet support leaves the grid");
  if (!(std::max(std::abs(lo), std::abs(hi)) < t))
    throw std::invalid_argument("gamma_profile: packet support leaves the light cone");
  const std::size_t j0 = static_cast<std::size_t>(std::ceil((lo - g.x_min) / g.dx));
  const std::size_t j1 = static_cast<std::size_t>(std::floor((hi - g.x_min) / g.dx));
  cplx acc = 0.0;
  for (std::size_t j = j0; j <= j1; ++j) acc += u[j] * std::conj(wave_packet(spec, t, v, g.x(j)));
  return acc * g.dx;
}

}  // namespace

std::vector<cplx> gamma_profile(const ComplexField& u, double t, const std::vector<double>& v_list,
                                const WavePacketSpec& spec) {
  if (!(t >= 1.0)) throw std::invalid_argument("gamma_profile: requires t >= 1");
  double min_hw = INFINITY;
  for (double v : v_list) min_hw = std::min(min_hw, packet_half_width(spec, t, v));
  std::size_t factor = 1;
  if (!v_list.empty()) {
    const double nodes = 2.0 * min_hw / u.grid.dx;
    if (nodes < 32.0) factor = std::bit_ceil(static_cast<std::size_t>(std::ceil(32.0 / nodes)));
  }
  const ComplexField fine = refine(u, factor);
  std::vector<cplx> out;
  out.reserve(v_list.size());
  for (double v : v_list) out.push_back(packet_pairing(fine, t, v, spec));
  return out;
}

cplx ray_amplitude(const ComplexField& u, double t, double v) {
  const double rho = t * std::sqrt(1.0 - v * v);
  return std::sqrt(t) * std::polar(1.0, rho) * interpolate(u, v * t);
}

std::string to_string(ExtractionMethod m) {
  return m == ExtractionMethod::WavePacket ? "wave-packet" : "stationary-phase";
}

cplx ProfileW::value(double xi) const {
  if (xi_grid.empty() || xi < xi_grid.front() || xi > xi_grid.back())
    throw std::out_of_range("ProfileW: xi outside sampled range");
  auto it = std::upper_bound(xi_grid.begin(), xi_grid.end(), xi);
  if (it == xi_grid.end()) return W.back();
  const std::size_t k = static_cast<std::size_t>(it - xi_grid.begin());
  const double w = (xi - xi_grid[k - 1]) / (xi_grid[k] - xi_grid[k - 1]);
  return (1.0 - w) * W[k - 1] + w * W[k];
}

cplx ProfileW::value_or_zero(double xi) const {
  if (xi_grid.empty() || xi < xi_grid.front() || xi > xi_grid.back()) return 0.0;
  return value(xi);
}

double ProfileW::sup_abs() const {
  double m = 0.0;
  for (const cplx& z : W) m = std::max(m, std::abs(z));
  return m;
}

ProfileW extract_W(const State& phi, const std::vector<double>& xi_grid, const WavePacketSpec& spec,
                   ExtractionMethod method, double log_coefficient) {
  if (!(phi.time >= 100.0)) throw std::invalid_argument("extract_W: requires t >= 100");
  for (std::size_t i = 1; i < xi_grid.size(); ++i)
    if (!(xi_grid[i] > xi_grid[i - 1])) throw std::invalid_argument("extract_W: xi grid must increase");
  const double t = phi.time;
  const ComplexField u = to_complex_u(phi);
  std::vector<double> vs;
  for (double xi : xi_grid) vs.push_back(v_of_xi(xi));
  std::vector<cplx> g;
  if (method == ExtractionMethod::WavePacket) {
    g = gamma_profile(u, t, vs, spec);
  } else {
    for (double v : vs) g.push_back(ray_amplitude(u, t, v));
  }
  ProfileW out{xi_grid, {}, t, method};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ph = -log_coefficient / japanese(xi_grid[i]) * std::norm(g[i]) * std::log(t);
    out.W.push_back(g[i] * std::polar(1.0, ph));
  }
  return out;
}

ProfileW extract_W(const Trajectory& traj, const std::vector<double>& xi_grid, const WavePacketSpec& spec,
                   ExtractionMethod method, double log_coefficient) {
  if (traj.states.empty()) throw std::invalid_argument("extract_W: empty trajectory");
  return extract_W(traj.states.back(), xi_grid, spec, method, log_coefficient);
}

std::vector<double> uniform_xi_grid(double xi_max, double spacing) {
  if (!(xi_max > 0.0 && spacing > 0.0)) throw std::invalid_argument("uniform_xi_grid: bad arguments");
  const long m = std::lround(xi_max / spacing);
  std::vector<double> out;
  for (long i = -m; i <= m; ++i) out.push_back(static_cast<double>(i) * spacing);
  return out;
}

namespace {

// Common factor W(x/rho) exp(-i rho + i c |W|^2 ln t / <x/rho>); zero outside the cone.
struct ConeSample {
  bool inside = false;
  double xi = 0.0;
  cplx value = 0.0;
};

ConeSample cone_sample(const ProfileW& W, double t, double x, double c, bool strict) {
  ConeSample s;
  if (!(std::abs(x) < t)) return s;
  const double rho = std::sqrt(t * t - x * x);
  s.inside = true;
  s.xi = x / rho;
  const cplx w = strict ? W.value(s.xi) : W.value_or_zero(s.xi);
  s.value = w * std::polar(1.0, -rho + c * std::norm(w) * std::log(t) / japanese(s.xi));
  return s;
}

}  // namespace

cplx predict_U(const ProfileW& W, double t, double x, double l, double log_coefficient) {
  const ConeSample s = cone_sample(W, t, x, log_coefficient, true);
  if (!s.inside) return 0.0;
  return std::pow(japanese(s.xi), l) * s.value / std::sqrt(t);
}

ComplexField predict_U_field(const ProfileW& W, const Grid& g, double t, double l, double log_coefficient) {
  ComplexField out(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    const ConeSample s = cone_sample(W, t, g.x(j), log_coefficient, false);
    if (s.inside) out[j] = std::pow(japanese(s.xi), l) * s.value / std::sqrt(t);
  }
  return out;
}

KinkSources kink_sources(const ProfileW& W, const Grid& g, double t, double beta, double center,
                         double log_coefficient) {
  const double gamma = KinkParams(beta, center).gamma();
  const double c = beta * t + center;
  KinkSources out{Field(g), Field(g)};
  const cplx I(0.0, 1.0);
  for (std::size_t j = 0; j < g.n; ++j) {
    const double x = g.x(j);
    const ConeSample s = cone_sample(W, t, x, log_coefficient, false);
    if (!s.inside) continue;
    const double cos_half = -std::tanh(gamma * (x - c));
    out.A[j] = std::real((-I * japanese(s.xi) - beta * gamma * cos_half) * s.value) / std::sqrt(t);
    out.B[j] = std::real((I * s.xi + gamma * cos_half) * s.value) / std::sqrt(t);
  }
  return out;
}

Field predict_kink_diff(const ProfileW& W, const Grid& g, double t, double beta, double center,
                        double log_coefficient) {
  const KinkSources src = kink_sources(W, g, t, beta, center, log_coefficient);
  const double gamma = KinkParams(beta, center).gamma();
  const double c = beta * t + center;
  const Field IA = operator_I(src.A, beta, center, t);
  double corr = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double y = g.x(j) - c;
    corr += (y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0)) * std::exp(-gamma * std::abs(y)) * src.A[j];
  }
  corr *= g.dx;
  Field out(g);
  for (std::size_t j = 0; j < g.n; ++j) out[j] = IA[j] - 0.5 * sech(gamma * (g.x(j) - c)) * corr;
  return out;
}

KinkDerivDiff predict_kink_deriv_diff(const ProfileW& W, const Grid& g, double t, double beta,
                                      double center, double log_coefficient) {
  const KinkSources src = kink_sources(W, g, t, beta, center, log_coefficient);
  const Field D = predict_kink_diff(W, g, t, beta, center, log_coefficient);
  const double gamma = KinkParams(beta, center).gamma();
  const double c = beta * t + center;
  KinkDerivDiff out{Field(g), Field(g)};
  for (std::size_t j = 0; j < g.n; ++j) {
    const double cos_half = -std::tanh(gamma * (g.x(j) - c));
    out.dx[j] = src.A[j] + gamma * cos_half * D[j];
    out.dt[j] = src.B[j] - beta * gamma * cos_half * D[j];
  }
  return out;
}

Field lorentz_boost_field(const State& s) {
  const Field px = spatial_derivative(s.phi, 1);
  Field out(s.grid());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = s.time * px[j] + s.grid().x(j) * s.phi_t[j];
  return out;
}

ComplexField free_evolution(const ComplexField& u0, double t) {
  std::vector<cplx> spec(u0.values);
  detail::fft_forward(spec);
  const auto k = detail::wavenumbers(u0.size(), u0.grid.dx);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= std::polar(1.0, -std::sqrt(1.0 + k[i] * k[i]) * t);
  detail::fft_inverse(spec);
  return ComplexField(u0.grid, std::move(spec));
}

void write_csv(const ProfileW& W, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "xi,re,im,abs\n" << std::setprecision(17);
  for (std::size_t i = 0; i < W.W.size(); ++i)
    os << W.xi_grid[i] << ',' << W.W[i].real() << ',' << W.W[i].imag() << ',' << std::abs(W.W[i]) << '\n';
  if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace sgk
