#include "autovc/dsp.hpp"

#include <cmath>

#include "autovc/errors.hpp"

namespace autovc {

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ArgumentError("FFT size must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& v : x) v /= static_cast<double>(n);
    }
}

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
    return w;
}

Eigen::MatrixXcd stft(const std::vector<double>& signal, int fft_size, int win_length,
                      int hop) {
    if (signal.empty()) throw ArgumentError("stft: empty signal");
    if (fft_size < win_length) throw ArgumentError("stft: fft_size < win_length");
    const auto len = static_cast<long>(signal.size());
    const long n_frames = len / hop + 1;
    const int n_bins = fft_size / 2 + 1;
    const int half = win_length / 2;
    const std::vector<double> window = hann_window(win_length);

    Eigen::MatrixXcd spec(n_bins, n_frames);
    std::vector<std::complex<double>> buf(fft_size);
    for (long t = 0; t < n_frames; ++t) {
        const long start = t * hop - half;
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (int i = 0; i < win_length; ++i) {
            const long idx = start + i;
            const double s = (idx >= 0 && idx < len) ? signal[idx] : 0.0;
            buf[i] = s * window[i];
        }
        fft_inplace(buf);
        for (int b = 0; b < n_bins; ++b) spec(b, t) = buf[b];
    }
    return spec;
}

std::vector<double> istft(const Eigen::MatrixXcd& spec, int fft_size, int win_length,
                          int hop) {
    const long n_frames = spec.cols();
    const int n_bins = fft_size / 2 + 1;
    if (spec.rows() != n_bins) throw ArgumentError("istft: bin count mismatch");
    if (n_frames < 2) throw ArgumentError("istft: need at least 2 frames");
    const int half = win_length / 2;
    const long out_len = (n_frames - 1) * hop;
    const std::vector<double> window = hann_window(win_length);

    // Accumulate into a padded buffer, then trim the centering offset.
    std::vector<double> acc(out_len + win_length, 0.0);
    std::vector<double> wsum(out_len + win_length, 0.0);
    std::vector<std::complex<double>> buf(fft_size);
    for (long t = 0; t < n_frames; ++t) {
        for (int b = 0; b < n_bins; ++b) buf[b] = spec(b, t);
        for (int b = n_bins; b < fft_size; ++b) buf[b] = std::conj(spec(fft_size - b, t));
        fft_inplace(buf, true);
        const long start = t * hop;  // signal position (t*hop - half) plus pad offset half
        for (int i = 0; i < win_length; ++i) {
            acc[start + i] += buf[i].real() * window[i];
            wsum[start + i] += window[i] * window[i];
        }
    }
    std::vector<double> out(out_len);
    for (long i = 0; i < out_len; ++i) {
        const double denom = wsum[i + half];
        out[i] = denom > 1e-9 ? acc[i + half] / denom : 0.0;
    }
    return out;
}

Eigen::MatrixXd magnitude(const Eigen::MatrixXcd& spec) {
    return spec.cwiseAbs();
}

}  // namespace autovc
