#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace sgk::detail {
namespace {

enum class Kind { C2CForward, C2CInverse, R2C, C2R };

// Plans are created once per (kind, n) on aligned scratch arrays and then run
// with the new-array execute interface on aligned copies, which is thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(Kind kind, std::size_t n) {
  static std::map<std::pair<int, std::size_t>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_pair(static_cast<int>(kind), n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int ni = static_cast<int>(n);
  fftw_complex* c = fftw_alloc_complex(n);
  double* r = fftw_alloc_real(n);
  fftw_plan p = nullptr;
  switch (kind) {
    case Kind::C2CForward:
      p = fftw_plan_dft_1d(ni, c, c, FFTW_FORWARD, FFTW_ESTIMATE);
      break;
    case Kind::C2CInverse:
      p = fftw_plan_dft_1d(ni, c, c, FFTW_BACKWARD, FFTW_ESTIMATE);
      break;
    case Kind::R2C:
      p = fftw_plan_dft_r2c_1d(ni, r, c, FFTW_ESTIMATE);
      break;
    case Kind::C2R:
      p = fftw_plan_dft_c2r_1d(ni, c, r, FFTW_ESTIMATE);
      break;
  }
  fftw_free(c);
  fftw_free(r);
  if (!p) throw std::runtime_error("FFTW plan creation failed");
  cache.emplace(key, p);
  return p;
}

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(ptr); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* ptr;
};

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(ptr); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* ptr;
};

void run_c2c(std::vector<std::complex<double>>& data, Kind kind) {
  const std::size_t n = data.size();
  fftw_plan p = get_plan(kind, n);
  ComplexBuffer buf(n);
  std::memcpy(buf.ptr, data.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(p, buf.ptr, buf.ptr);
  std::memcpy(static_cast<void*>(data.data()), buf.ptr, n * sizeof(fftw_complex));
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) { run_c2c(data, Kind::C2CForward); }

void fft_inverse(std::vector<std::complex<double>>& data) {
  run_c2c(data, Kind::C2CInverse);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

void rfft_forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
  const std::size_t n = in.size();
  fftw_plan p = get_plan(Kind::R2C, n);
  RealBuffer r(n);
  ComplexBuffer c(n / 2 + 1);
  std::memcpy(r.ptr, in.data(), n * sizeof(double));
  fftw_execute_dft_r2c(p, r.ptr, c.ptr);
  out.resize(n / 2 + 1);
  std::memcpy(static_cast<void*>(out.data()), c.ptr, (n / 2 + 1) * sizeof(fftw_complex));
}

void rfft_inverse(std::vector<std::complex<double>>& in, std::vector<double>& out) {
  const std::size_t n = out.size();
  if (in.size() != n / 2 + 1) throw std::invalid_argument("rfft_inverse: size mismatch");
  fftw_plan p = get_plan(Kind::C2R, n);
  RealBuffer r(n);
  ComplexBuffer c(n / 2 + 1);
  std::memcpy(c.ptr, in.data(), (n / 2 + 1) * sizeof(fftw_complex));
  fftw_execute_dft_c2r(p, c.ptr, r.ptr);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = r.ptr[j] * scale;
}

std::vector<double> wavenumbers(std::size_t n, double dx) {
  std::vector<double> k(n);
  const double base = 2.0 * 3.14159265358979323846 / (static_cast<double>(n) * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const long m = j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    k[j] = base * static_cast<double>(m);
  }
  return k;
}

}  // namespace sgk::detail
