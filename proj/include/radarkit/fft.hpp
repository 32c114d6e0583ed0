#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Thin double-precision DFT layer over FFTW. Forward transforms only,
// unnormalized (sum convention, exp(-j*2*pi*k*n/N)).

namespace radarkit::dsp {

/// Forward DFT of a complex sequence.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input);

/// Forward DFT of a real sequence zero-padded to fft_length, returning
/// bins 0..fft_length/2 (fft_length must be even).
std::vector<std::complex<double>> rfft(std::span<const double> input, std::size_t fft_length);

/// In-place forward 2D DFT of a row-major n0 x n1 matrix.
void fft2_inplace(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1);

}  // namespace radarkit::dsp
