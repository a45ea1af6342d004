#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bw::dsp {

// In-place iterative radix-2 FFT for power-of-two sizes; plain DFT otherwise
// (chirp lengths are small, and the fallback only matters for odd configs).
void fft(std::vector<std::complex<double>>& a);

// One-sided magnitude spectrum of a real signal: |X[0..n/2]|, n/2+1 bins.
std::vector<double> real_fft_magnitude(std::span<const double> x);

}  // namespace bw::dsp
