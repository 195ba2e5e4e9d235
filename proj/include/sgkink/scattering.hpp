/// @file scattering.hpp
/// @brief Small-data asymptotics: complex reduction u = phi + i<D>^-1 phi_t,
/// wave packets, the profile gamma(t, v), extraction of the scattering
/// profile W, and the asymptotic predictors for the field and the kink
/// difference.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sgkink/field.hpp"
#include "sgkink/integrator.hpp"

namespace sgk {

/// Coefficient of the logarithmic phase correction c <xi>^-1 |W|^2 ln t used
/// by the extraction and predictors.
inline constexpr double kDefaultLogPhaseCoefficient = 1.0 / 32.0;

/// chi(y) = 315/(256 c) (1 - (y/c)^2)^4 on (-c, c), zero elsewhere.
struct WavePacketSpec {
  double chi_radius = 0.2;  ///< c, in (0, 0.25)

  explicit WavePacketSpec(double c = 0.2);
  double chi(double y) const;
};

/// <xi> = sqrt(1 + xi^2).
inline double japanese(double xi) { return std::sqrt(1.0 + xi * xi); }
/// xi_v = v / sqrt(1 - v^2) and its inverse.
double xi_of_v(double v);
double v_of_xi(double xi);

/// u = phi + i <D>^-1 phi_t. Zero topology only.
ComplexField to_complex_u(const State& phi);

/// Psi_v(t, x) = <xi_v>^{3/2} chi(t^{-1/2} <xi_v>^{3/2} (x - v t)) e^{-i sqrt(t^2 - x^2)}.
cplx wave_packet(const WavePacketSpec& spec, double t, double v, double x);

/// Half width of supp Psi_v: c t^{1/2} <xi_v>^{-3/2}.
double packet_half_width(const WavePacketSpec& spec, double t, double v);

/// gamma(t, v) = <u, Psi_v> = int u conj(Psi_v) dx for each v. When a packet
/// spans fewer than 32 grid nodes, u is refined by zero-padded FFT first.
/// Requires t >= 1; throws std::invalid_argument if a packet leaves the grid
/// or the light cone.
std::vector<cplx> gamma_profile(const ComplexField& u, double t, const std::vector<double>& v_list,
                                const WavePacketSpec& spec);

/// sqrt(t) e^{i rho} u(t, v t) with rho = t sqrt(1 - v^2), u interpolated.
cplx ray_amplitude(const ComplexField& u, double t, double v);

enum class ExtractionMethod { WavePacket, StationaryPhase };
std::string to_string(ExtractionMethod m);

struct ProfileW {
  std::vector<double> xi_grid;  ///< strictly increasing
  std::vector<cplx> W;
  double extraction_time = 0.0;
  ExtractionMethod method = ExtractionMethod::WavePacket;

  /// Linear interpolation in xi; throws std::out_of_range outside the grid.
  cplx value(double xi) const;
  /// As value, but zero outside the sampled range.
  cplx value_or_zero(double xi) const;
  double sup_abs() const;
};

/// W(xi_v) = gamma(t, v) exp(-i c <xi_v>^-1 |gamma|^2 ln t) from the state at
/// time t >= 100, with gamma from wave packets or from the ray amplitude.
ProfileW extract_W(const State& phi, const std::vector<double>& xi_grid, const WavePacketSpec& spec,
                   ExtractionMethod method, double log_coefficient = kDefaultLogPhaseCoefficient);

/// Same, at the final snapshot of a trajectory.
ProfileW extract_W(const Trajectory& traj, const std::vector<double>& xi_grid,
                   const WavePacketSpec& spec, ExtractionMethod method,
                   double log_coefficient = kDefaultLogPhaseCoefficient);

/// Uniform xi grid on [-xi_max, xi_max] with the given spacing.
std::vector<double> uniform_xi_grid(double xi_max, double spacing);

/// Predicted u(t, x) = t^{-1/2} <x/rho>^l W(x/rho) exp(-i rho + i c |W|^2 ln t / <x/rho>)
/// for |x| < t, and 0 for |x| >= t. Throws std::out_of_range if x/rho is
/// outside the W grid.
cplx predict_U(const ProfileW& W, double t, double x, double l = 0.0,
               double log_coefficient = kDefaultLogPhaseCoefficient);

/// predict_U on every node of g; W is taken as zero outside its sampled range.
ComplexField predict_U_field(const ProfileW& W, const Grid& g, double t, double l = 0.0,
                             double log_coefficient = kDefaultLogPhaseCoefficient);

/// Light-cone sources A_W (for the x-derivative) and B_W (for the
/// t-derivative) of the kink difference, relative to Q(t,.;beta,center).
struct KinkSources {
  Field A;
  Field B;
};
KinkSources kink_sources(const ProfileW& W, const Grid& g, double t, double beta, double center,
                         double log_coefficient = kDefaultLogPhaseCoefficient);

/// Predicted f - K~: I A_W - (1/(2 cosh(gamma(x-c)))) int sgn(y-c) e^{-gamma|y-c|} A_W dy
/// with c = beta t + center.
Field predict_kink_diff(const ProfileW& W, const Grid& g, double t, double beta, double center,
                        double log_coefficient = kDefaultLogPhaseCoefficient);

/// Predicted (f_x - K~_x, f_t - K~_t) =
/// (A_W + gamma cos(K~/2) D, B_W - beta gamma cos(K~/2) D) with D the kink difference prediction.
struct KinkDerivDiff {
  Field dx;
  Field dt;
};
KinkDerivDiff predict_kink_deriv_diff(const ProfileW& W, const Grid& g, double t, double beta,
                                      double center,
                                      double log_coefficient = kDefaultLogPhaseCoefficient);

/// Z phi = t phi_x + x phi_t.
Field lorentz_boost_field(const State& s);

/// Free Klein-Gordon evolution of u: e^{-i <D> t} u, exact in Fourier space.
ComplexField free_evolution(const ComplexField& u0, double t);

/// CSV with columns xi, re, im, abs.
void write_csv(const ProfileW& W, const std::string& path);

}  // namespace sgk
