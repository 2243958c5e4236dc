#pragma once

#include <complex>
#include <vector>

namespace pkam::detail {

enum class FftDirection { forward, backward };

/// In-place unnormalized multi-dimensional complex DFT (row-major layout).
/// forward uses exp(-2 pi i j k / G), backward exp(+2 pi i j k / G).
/// Plans are cached per (dims, direction) and built with FFTW_ESTIMATE,
/// so results are reproducible run to run.
void fft(std::vector<std::complex<double>>& data, const std::vector<int>& dims,
         FftDirection direction);

}  // namespace pkam::detail
