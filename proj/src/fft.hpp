/// @file fft.hpp
/// @brief Thin FFTW wrapper with cached plans; executes on caller-owned buffers.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sgk::detail {

/// Unnormalized forward transform (sign -1) of a complex sequence, in place.
void fft_forward(std::vector<std::complex<double>>& data);

/// Inverse transform (sign +1) including the 1/n normalization, in place.
void fft_inverse(std::vector<std::complex<double>>& data);

/// Real-to-half-complex forward transform; output has n/2 + 1 entries.
void rfft_forward(const std::vector<double>& in, std::vector<std::complex<double>>& out);

/// Half-complex-to-real inverse transform including the 1/n normalization.
/// The input is not preserved.
void rfft_inverse(std::vector<std::complex<double>>& in, std::vector<double>& out);

/// Angular wavenumbers 2*pi*k/(n*dx) in FFT ordering.
std::vector<double> wavenumbers(std::size_t n, double dx);

}  // namespace sgk::detail
