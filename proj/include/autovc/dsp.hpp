#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace autovc {

/// In-place radix-2 Cooley-Tukey FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse = false);

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

/// Short-time analysis of a real signal. Frames are centered: frame t covers
/// samples [t*hop - win/2, t*hop + win/2) of the zero-padded signal, giving
/// floor(len/hop) + 1 frames. Returns (fft_size/2 + 1) x T complex bins.
Eigen::MatrixXcd stft(const std::vector<double>& signal, int fft_size, int win_length,
                      int hop);

/// Overlap-add inverse of stft() with squared-window normalization.
/// Output length is exactly (T - 1) * hop.
std::vector<double> istft(const Eigen::MatrixXcd& spec, int fft_size, int win_length,
                          int hop);

/// Magnitude of a complex spectrogram.
Eigen::MatrixXd magnitude(const Eigen::MatrixXcd& spec);

}  // namespace autovc
