/// @file kernel.hpp
/// @brief Cumulative integrals against cosh-ratio kernels, shared by the
/// operator I and the linearized Baecklund solve.
#pragma once

#include <cmath>
#include <vector>

#include "sgkink/field.hpp"

namespace sgk::detail {

/// log cosh(z) without overflow.
inline double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

/// Kernel k(x, y) = [cosh(gamma(y-c)) / cosh(gamma(x-c))]^sigma with sigma = +-1.
/// Satisfies k(x, y) = k(x, z) k(z, y), which drives the recursion below.
struct CoshKernel {
  double gamma;
  double c;
  double sigma;

  double operator()(double x, double y) const {
    return std::exp(sigma * (log_cosh(gamma * (y - c)) - log_cosh(gamma * (x - c))));
  }
};

/// Values of h at cell midpoints (x_j + x_{j+1})/2, sixth-order interpolation.
std::vector<double> midpoint_values(const Field& h);

/// Given I(from) = start, returns I(to) for I(x) = k(x, x0) I(x0) + int_{x0}^{x} k(x, y) h(y) dy
/// over one interval, using Simpson's rule with the supplied endpoint and midpoint values.
inline double kernel_step(const CoshKernel& k, double from, double to, double start, double h_from,
                          double h_mid, double h_to) {
  const double mid = 0.5 * (from + to);
  return k(to, from) * start +
         (to - from) / 6.0 * (k(to, from) * h_from + 4.0 * k(to, mid) * h_mid + h_to);
}

/// Sweeps nodes i0 -> i1 (either direction) starting from value `start` at node i0.
/// Writes I at every visited node into out.
void kernel_sweep(const CoshKernel& k, const Field& h, const std::vector<double>& mid,
                  std::size_t i0, std::size_t i1, double start, std::vector<double>& out);

}  // namespace sgk::detail
