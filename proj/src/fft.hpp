#pragma once

#include <complex>
#include <vector>

namespace wrmsm::detail {

/// In-place forward DFT, X_k = sum_t x_t exp(-2 pi i k t / N).
void fft_forward(std::vector<std::complex<double>>& data);

}  // namespace wrmsm::detail
