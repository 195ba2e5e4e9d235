/// @file field.hpp
/// @brief Uniform grids, real and complex fields, phase-space states, derivatives,
/// Fourier multipliers, quadrature and norms.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgk {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform periodic-layout grid: nodes x_j = x_min + j*dx for j = 0..n-1.
struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 16;
  double dx = 1.0 / 16.0;

  double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }
  std::vector<double> nodes() const;
  bool operator==(const Grid& o) const {
    return x_min == o.x_min && x_max == o.x_max && n == o.n;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Builds a grid. Throws std::invalid_argument unless x_max > x_min and n is a
/// power of two with n >= 16.
Grid make_grid(double x_min, double x_max, std::size_t n);

/// Samples of a real or complex function on a grid.
template <class T>
struct BasicField {
  Grid grid;
  std::vector<T> values;

  BasicField() = default;
  explicit BasicField(const Grid& g) : grid(g), values(g.n, T{}) {}
  BasicField(const Grid& g, std::vector<T> v);

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
};

using Field = BasicField<double>;
using ComplexField = BasicField<cplx>;

extern template struct BasicField<double>;
extern template struct BasicField<cplx>;

/// Samples a callable on the grid nodes.
template <class F>
Field sample(const Grid& g, F&& fn) {
  Field out(g);
  for (std::size_t j = 0; j < g.n; ++j) out[j] = fn(g.x(j));
  return out;
}

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
ComplexField to_complex(const Field& a);
Field real_part(const ComplexField& a);
Field imag_part(const ComplexField& a);

/// Boundary behaviour of a state: decaying to 0 (periodic-compatible), or
/// connecting 0 on the left to +2*pi (kink) or -2*pi (antikink) on the right.
enum class Topology { Zero, Kink, Antikink };

std::string to_string(Topology t);

/// Phase-space pair (phi, phi_t) at a time instant.
struct State {
  Field phi;
  Field phi_t;
  double time = 0.0;
  Topology topology = Topology::Zero;

  const Grid& grid() const { return phi.grid; }
  /// Checks shared grids and the boundary values demanded by the topology tag.
  void validate() const;
};

/// Asymptotic value of a field of the given topology at the left and right ends.
double left_tail(Topology t);
double right_tail(Topology t);

/// Fourth-order central differences with one-sided fourth-order stencils at the
/// two outermost nodes on each side. order must be 1 or 2.
template <class T>
BasicField<T> spatial_derivative(const BasicField<T>& f, int order);

/// True when both ends of the field sit at a common value, as required for
/// spectral (periodic) treatment.
template <class T>
bool is_periodic_compatible(const BasicField<T>& f, double tol = 1e-6);

/// Applies the symbol (1 + xi^2)^(l/2) through the discrete Fourier transform.
/// Throws std::invalid_argument for fields that do not decay to a common value.
template <class T>
BasicField<T> bessel_multiplier(const BasicField<T>& f, double l);

/// Applies (i*xi)^k spectrally (k >= 0).
template <class T>
BasicField<T> spectral_derivative(const BasicField<T>& f, int k);

/// First derivative of a real field with flat tails (constant over the last
/// two nodes at each end): the tail constants are removed with a tanh ramp
/// differentiated exactly and the remainder is differentiated spectrally.
/// Falls back to spatial_derivative when the tails are not flat.
Field smooth_derivative(const Field& f);

/// Trapezoid quadrature of f * conj(g) * dx.
cplx inner_product(const ComplexField& f, const ComplexField& g);
double inner_product(const Field& f, const Field& g);

/// Trapezoid quadrature of a field.
double integrate(const Field& f);
cplx integrate(const ComplexField& f);

/// Sum over Fourier modes of |f_hat|^2 scaled to match the L^2 norm squared.
double spectral_energy(const ComplexField& f);

/// Lagrange interpolation of the given order (even, >= 2) centred on x.
template <class T>
T interpolate(const BasicField<T>& f, double x, int points = 8);

/// Norm selector.
struct NormSpec {
  enum class Kind { Lp, L2PlusLinf, WeightedSobolev, PairEnergy };
  Kind kind = Kind::Lp;
  double p = 2.0;  ///< Lp exponent, in [1, inf]
  double m = 0.0;  ///< derivative order for WeightedSobolev
  double s = 0.0;  ///< weight exponent for WeightedSobolev

  static NormSpec lp(double p) { return {Kind::Lp, p, 0.0, 0.0}; }
  static NormSpec l2_plus_linf() { return {Kind::L2PlusLinf, 2.0, 0.0, 0.0}; }
  static NormSpec weighted_sobolev(double m, double s) {
    return {Kind::WeightedSobolev, 2.0, m, s};
  }
  static NormSpec pair_energy() { return {Kind::PairEnergy, 2.0, 0.0, 0.0}; }
};

/// Norm of a single field. Lp uses quadrature (p = inf gives the maximum).
/// L2PlusLinf minimizes ||(|g|-lambda)_+||_2 + lambda over lambda in
/// [0, ||g||_inf] by golden-section search. WeightedSobolev(m, s) sums
/// ||<x>^s d^j g||_2 for j <= floor(m) with finite differences; a fractional
/// remainder theta adds ||<x>^s (<D>^theta - 1) d^floor(m) g||_2 spectrally.
double norm(const Field& g, const NormSpec& spec);

/// Norm of a complex field (Lp and L2PlusLinf only).
double norm(const ComplexField& g, const NormSpec& spec);

/// ||(f - ref, f_t - ref_t)||_{H^1 x L^2}; spec must be PairEnergy.
double norm(const State& s, const State& reference, const NormSpec& spec);

/// Writes "x,value" rows (complex fields write "x,re,im").
void write_csv(const Field& f, const std::string& path);
void write_csv(const ComplexField& f, const std::string& path);

/// Binary snapshot: magic "SGF1", u64 n, f64 x_min, f64 x_max, f64 time,
/// u32 topology, then n phi values and n phi_t values, all little-endian.
void write_snapshot(const State& s, const std::string& path);
State read_snapshot(const std::string& path);

}  // namespace sgk
