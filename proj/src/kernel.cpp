#include "kernel.hpp"

#include <algorithm>

namespace sgk::detail {

std::vector<double> midpoint_values(const Field& h) {
  const std::size_t n = h.size();
  std::vector<double> mid(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (j >= 2 && j + 3 < n) {
      mid[j] = (3.0 * h[j - 2] - 25.0 * h[j - 1] + 150.0 * h[j] + 150.0 * h[j + 1] -
                25.0 * h[j + 2] + 3.0 * h[j + 3]) / 256.0;
    } else {
      mid[j] = interpolate(h, h.grid.x(j) + 0.5 * h.grid.dx, 6);
    }
  }
  return mid;
}

void kernel_sweep(const CoshKernel& k, const Field& h, const std::vector<double>& mid,
                  std::size_t i0, std::size_t i1, double start, std::vector<double>& out) {
  out[i0] = start;
  double cur = start;
  if (i1 >= i0) {
    for (std::size_t j = i0; j < i1; ++j) {
      cur = kernel_step(k, h.grid.x(j), h.grid.x(j + 1), cur, h[j], mid[j], h[j + 1]);
      out[j + 1] = cur;
    }
  } else {
    for (std::size_t j = i0; j > i1; --j) {
      cur = kernel_step(k, h.grid.x(j), h.grid.x(j - 1), cur, h[j], mid[j - 1], h[j - 1]);
      out[j - 1] = cur;
    }
  }
}

}  // namespace sgk::detail
