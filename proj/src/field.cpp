#include "sgkink/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "fft.hpp"

namespace sgk {

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
  return xs;
}

Grid make_grid(double x_min, double x_max, std::size_t n) {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw std::invalid_argument("make_grid: degenerate interval");
  if (n < 16 || !std::has_single_bit(n))
    throw std::invalid_argument("make_grid: n must be a power of two >= 16, got " +
                                std::to_string(n));
  return Grid{x_min, x_max, n, (x_max - x_min) / static_cast<double>(n)};
}

namespace {
bool finite_value(double v) { return std::isfinite(v); }
bool finite_value(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
}  // namespace

template <class T>
BasicField<T>::BasicField(const Grid& g, std::vector<T> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n) throw std::invalid_argument("Field: length does not match grid");
  for (const auto& z : values)
    if (!finite_value(z)) throw std::invalid_argument("Field: non-finite value");
}

template struct BasicField<double>;
template struct BasicField<cplx>;

namespace {
void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] - b[j];
  return out;
}

Field operator*(double s, const Field& a) {
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = s * a[j];
  return out;
}

ComplexField to_complex(const Field& a) {
  ComplexField out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j];
  return out;
}

Field real_part(const ComplexField& a) {
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j].real();
  return out;
}

Field imag_part(const ComplexField& a) {
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j].imag();
  return out;
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Zero: return "zero";
    case Topology::Kink: return "kink";
    case Topology::Antikink: return "antikink";
  }
  return "unknown";
}

double left_tail(Topology) { return 0.0; }

double right_tail(Topology t) {
  switch (t) {
    case Topology::Kink: return 2.0 * kPi;
    case Topology::Antikink: return -2.0 * kPi;
    case Topology::Zero: return 0.0;
  }
  return 0.0;
}

void State::validate() const {
  require_same_grid(phi.grid, phi_t.grid, "State");
  if (phi.size() != phi.grid.n || phi_t.size() != phi.grid.n)
    throw std::invalid_argument("State: field length mismatch");
  if (topology == Topology::Zero) return;
  const double tol = 1e-3;
  if (std::abs(phi.values.front() - left_tail(topology)) > tol ||
      std::abs(phi.values.back() - right_tail(topology)) > tol)
    throw std::invalid_argument("State: boundary values inconsistent with " +
                                to_string(topology) + " topology");
}

template <class T>
BasicField<T> spatial_derivative(const BasicField<T>& f, int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("spatial_derivative: order must be 1 or 2");
  const std::size_t n = f.size();
  const double h = f.grid.dx;
  const auto& v = f.values;
  BasicField<T> out(f.grid);
  auto& d = out.values;
  if (order == 1) {
    const double c = 1.0 / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * c;
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * c;
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * c;
    d[n - 1] = -(-25.0 * v[n - 1] + 48.0 * v[n - 2] - 36.0 * v[n - 3] + 16.0 * v[n - 4] -
                 3.0 * v[n - 5]) * c;
    d[n - 2] = -(-3.0 * v[n - 1] - 10.0 * v[n - 2] + 18.0 * v[n - 3] - 6.0 * v[n - 4] +
                 v[n - 5]) * c;
  } else {
    const double c = 1.0 / (12.0 * h * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
      d[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) * c;
    d[0] = (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] -
            10.0 * v[5]) * c;
    d[1] = (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]) * c;
    d[n - 1] = (45.0 * v[n - 1] - 154.0 * v[n - 2] + 214.0 * v[n - 3] - 156.0 * v[n - 4] +
                61.0 * v[n - 5] - 10.0 * v[n - 6]) * c;
    d[n - 2] = (10.0 * v[n - 1] - 15.0 * v[n - 2] - 4.0 * v[n - 3] + 14.0 * v[n - 4] -
                6.0 * v[n - 5] + v[n - 6]) * c;
  }
  return out;
}

template Field spatial_derivative(const Field&, int);
template ComplexField spatial_derivative(const ComplexField&, int);

template <class T>
bool is_periodic_compatible(const BasicField<T>& f, double tol) {
  double scale = 1.0;
  for (const auto& z : f.values) scale = std::max(scale, std::abs(z));
  return std::abs(f.values.front() - f.values.back()) <= tol * scale;
}

template bool is_periodic_compatible(const Field&, double);
template bool is_periodic_compatible(const ComplexField&, double);

namespace {

// Applies a symbol m(k) to a real or complex field via the FFT.
template <class T, class Symbol>
BasicField<T> apply_symbol(const BasicField<T>& f, Symbol&& symbol) {
  const std::size_t n = f.size();
  std::vector<cplx> buf(n);
  for (std::size_t j = 0; j < n; ++j) buf[j] = f[j];
  detail::fft_forward(buf);
  const auto k = detail::wavenumbers(n, f.grid.dx);
  for (std::size_t j = 0; j < n; ++j) buf[j] *= symbol(k[j], j == n / 2);
  detail::fft_inverse(buf);
  BasicField<T> out(f.grid);
  for (std::size_t j = 0; j < n; ++j) {
    if constexpr (std::is_same_v<T, double>)
      out[j] = buf[j].real();
    else
      out[j] = buf[j];
  }
  return out;
}

}  // namespace

Field smooth_derivative(const Field& f) {
  const std::size_t n = f.size();
  const double L = f.values.front(), R = f.values.back();
  const double scale = std::max({1.0, std::abs(L), std::abs(R)});
  const bool flat = std::abs(f[1] - L) <= 1e-12 * scale && std::abs(f[n - 2] - R) <= 1e-12 * scale;
  if (!flat) return spatial_derivative(f, 1);
  if (L == 0.0 && R == 0.0) return spectral_derivative(f, 1);
  const Grid& g = f.grid;
  // Ramp width: saturated to round-off at both ends and resolved by the grid.
  const double w = (g.x(n - 1) - g.x_min) / 40.0;
  if (w < 8.0 * g.dx) return spatial_derivative(f, 1);
  const double xc = 0.5 * (g.x_min + g.x(n - 1));
  Field h(g), ramp_x(g);
  for (std::size_t j = 0; j < n; ++j) {
    const double z = (g.x(j) - xc) / w;
    const double c = std::cosh(z);
    h[j] = f[j] - (L + 0.5 * (R - L) * (1.0 + std::tanh(z)));
    ramp_x[j] = 0.5 * (R - L) / (w * c * c);
  }
  return spectral_derivative(h, 1) + ramp_x;
}

template <class T>
BasicField<T> bessel_multiplier(const BasicField<T>& f, double l) {
  if (!is_periodic_compatible(f))
    throw std::invalid_argument("bessel_multiplier: field is not periodic-compatible");
  if (l == 0.0) return f;
  return apply_symbol(f, [l](double k, bool) { return cplx(std::pow(1.0 + k * k, 0.5 * l)); });
}

template Field bessel_multiplier(const Field&, double);
template ComplexField bessel_multiplier(const ComplexField&, double);

template <class T>
BasicField<T> spectral_derivative(const BasicField<T>& f, int k) {
  if (k < 0) throw std::invalid_argument("spectral_derivative: negative order");
  if (!is_periodic_compatible(f))
    throw std::invalid_argument("spectral_derivative: field is not periodic-compatible");
  if (k == 0) return f;
  return apply_symbol(f, [k](double xi, bool nyquist) {
    if (nyquist && (k % 2 == 1)) return cplx(0.0);
    return std::pow(cplx(0.0, xi), k);
  });
}

template Field spectral_derivative(const Field&, int);
template ComplexField spectral_derivative(const ComplexField&, int);

// The grid is a periodic layout, so the trapezoid rule weights every node by dx.
cplx inner_product(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f.grid, g.grid, "inner_product");
  cplx acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * std::conj(g[j]);
  return acc * f.grid.dx;
}

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid, "inner_product");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * g[j];
  return acc * f.grid.dx;
}

double integrate(const Field& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * f.grid.dx;
}

cplx integrate(const ComplexField& f) {
  cplx acc = 0.0;
  for (const auto& v : f.values) acc += v;
  return acc * f.grid.dx;
}

double spectral_energy(const ComplexField& f) {
  std::vector<cplx> buf = f.values;
  detail::fft_forward(buf);
  double acc = 0.0;
  for (const auto& z : buf) acc += std::norm(z);
  return acc * f.grid.dx / static_cast<double>(f.size());
}

template <class T>
T interpolate(const BasicField<T>& f, double x, int points) {
  if (points < 2 || points % 2 != 0)
    throw std::invalid_argument("interpolate: points must be even and >= 2");
  const std::size_t n = f.size();
  if (static_cast<std::size_t>(points) > n) throw std::invalid_argument("interpolate: grid too small");
  const double u = (x - f.grid.x_min) / f.grid.dx;
  if (u < -1e-9 || u > static_cast<double>(n - 1) + 1e-9)
    throw std::out_of_range("interpolate: point outside grid");
  const long base = static_cast<long>(std::floor(u));
  long first = base - points / 2 + 1;
  first = std::clamp(first, 0L, static_cast<long>(n) - points);
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-13) return f[static_cast<std::size_t>(nearest)];
  T acc{};
  for (int i = 0; i < points; ++i) {
    double w = 1.0;
    const double ui = static_cast<double>(first + i);
    for (int k = 0; k < points; ++k) {
      if (k == i) continue;
      const double uk = static_cast<double>(first + k);
      w *= (u - uk) / (ui - uk);
    }
    acc += w * f[static_cast<std::size_t>(first + i)];
  }
  return acc;
}

template double interpolate(const Field&, double, int);
template cplx interpolate(const ComplexField&, double, int);

namespace {

template <class T>
std::vector<double> magnitudes(const BasicField<T>& g) {
  std::vector<double> a(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) a[j] = std::abs(g[j]);
  return a;
}

double lp_norm(const std::vector<double>& a, double p, double dx) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm: p must be in [1, inf]");
  if (std::isinf(p)) return a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  double acc = 0.0;
  for (double v : a) acc += std::pow(v, p);
  return std::pow(acc * dx, 1.0 / p);
}

// inf over lambda in [0, max|g|] of ||(|g|-lambda)_+||_2 + lambda; the
// objective is convex in lambda, so golden-section search converges.
double l2_plus_linf(const std::vector<double>& a, double dx) {
  const double top = a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  if (top == 0.0) return 0.0;
  auto objective = [&](double lam) {
    double acc = 0.0;
    for (double v : a) {
      const double e = v - lam;
      if (e > 0.0) acc += e * e;
    }
    return std::sqrt(acc * dx) + lam;
  };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = top;
  double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * top; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = objective(d);
    }
  }
  return std::min({objective(0.5 * (lo + hi)), objective(0.0), objective(top)});
}

double weighted_l2(const Field& g, double s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.grid.x(j);
    const double w = std::pow(1.0 + x * x, 0.5 * s);
    acc += (w * g[j]) * (w * g[j]);
  }
  return std::sqrt(acc * g.grid.dx);
}

}  // namespace

double norm(const Field& g, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::Lp:
      return lp_norm(magnitudes(g), spec.p, g.grid.dx);
    case NormSpec::Kind::L2PlusLinf:
      return l2_plus_linf(magnitudes(g), g.grid.dx);
    case NormSpec::Kind::WeightedSobolev: {
      if (spec.m < 0.0 || spec.s < 0.0)
        throw std::invalid_argument("norm: WeightedSobolev needs m, s >= 0");
      const int whole = static_cast<int>(std::floor(spec.m));
      const double theta = spec.m - whole;
      if (theta > 0.0 && !is_periodic_compatible(g))
        throw std::invalid_argument("norm: fractional m requires Zero topology");
      double total = 0.0;
      Field d = g;
      for (int j = 0; j <= whole; ++j) {
        if (j > 0) d = spatial_derivative(d, 1);
        total += weighted_l2(d, spec.s);
      }
      if (theta > 0.0) {
        const Field top = spectral_derivative(g, whole);
        total += weighted_l2(bessel_multiplier(top, theta) - top, spec.s);
      }
      return total;
    }
    case NormSpec::Kind::PairEnergy:
      throw std::invalid_argument("norm: PairEnergy applies to a State pair");
  }
  return 0.0;
}

double norm(const ComplexField& g, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::Lp:
      return lp_norm(magnitudes(g), spec.p, g.grid.dx);
    case NormSpec::Kind::L2PlusLinf:
      return l2_plus_linf(magnitudes(g), g.grid.dx);
    default:
      throw std::invalid_argument("norm: unsupported spec for complex field");
  }
}

double norm(const State& s, const State& reference, const NormSpec& spec) {
  if (spec.kind != NormSpec::Kind::PairEnergy)
    throw std::invalid_argument("norm: State pair requires PairEnergy");
  require_same_grid(s.grid(), reference.grid(), "norm");
  const Field d = s.phi - reference.phi;
  const Field dt = s.phi_t - reference.phi_t;
  const Field dx = spatial_derivative(d, 1);
  return std::sqrt(inner_product(d, d) + inner_product(dx, dx) + inner_product(dt, dt));
}

void write_csv(const Field& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "x,value\n" << std::setprecision(17);
  for (std::size_t j = 0; j < f.size(); ++j) os << f.grid.x(j) << ',' << f[j] << '\n';
  if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_csv(const ComplexField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << "x,re,im\n" << std::setprecision(17);
  for (std::size_t j = 0; j < f.size(); ++j)
    os << f.grid.x(j) << ',' << f[j].real() << ',' << f[j].imag() << '\n';
  if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary snapshots assume a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_snapshot: truncated file");
  return v;
}

}  // namespace

void write_snapshot(const State& s, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
  os.write("SGF1", 4);
  put<std::uint64_t>(os, s.grid().n);
  put<double>(os, s.grid().x_min);
  put<double>(os, s.grid().x_max);
  put<double>(os, s.time);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.topology));
  os.write(reinterpret_cast<const char*>(s.phi.values.data()),
           static_cast<std::streamsize>(s.phi.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(s.phi_t.values.data()),
           static_cast<std::streamsize>(s.phi_t.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

State read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SGF1", 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  const auto n = get<std::uint64_t>(is);
  const double x_min = get<double>(is);
  const double x_max = get<double>(is);
  const double time = get<double>(is);
  const auto topo = get<std::uint32_t>(is);
  if (topo > 2) throw std::runtime_error("read_snapshot: bad topology tag");
  const Grid g = make_grid(x_min, x_max, static_cast<std::size_t>(n));
  std::vector<double> a(n), b(n);
  is.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(n * sizeof(double)));
  is.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("read_snapshot: truncated payload");
  State s{Field(g, std::move(a)), Field(g, std::move(b)), time, static_cast<Topology>(topo)};
  s.validate();
  return s;
}

}  // namespace sgk
