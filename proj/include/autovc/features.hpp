#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>

#include "autovc/wav.hpp"

namespace autovc {

/// Analysis parameters. Defaults give the fixed 62.5 Hz frame rate at 16 kHz.
struct FeatureConfig {
    int sample_rate_hz = kSampleRate;
    int n_mels = 80;
    int hop_samples = 256;
    int fft_size = 1024;
    int win_length = 1024;
    double mel_fmin_hz = 90.0;
    double mel_fmax_hz = 7600.0;
    double floor_db = -100.0;

    int n_bins() const { return fft_size / 2 + 1; }
    double frame_rate_hz() const {
        return static_cast<double>(sample_rate_hz) / hop_samples;
    }

    /// Throws ArgumentError on any violated constraint (frame rate, fft size,
    /// mel range ordering).
    void validate() const;

    /// Stable hash over every field; stored in cache and checkpoint headers.
    std::uint64_t hash() const;
};

/// Normalized log-mel spectrogram, n_mels x T with entries in [0, 1].
struct MelSpectrogram {
    Eigen::MatrixXd values;
    FeatureConfig config;

    long frames() const { return values.cols(); }
    long bins() const { return values.rows(); }
};

/// Triangular mel filterbank (HTK mel scale, area-normalized),
/// n_mels x (fft_size/2 + 1).
Eigen::MatrixXd mel_filterbank(const FeatureConfig& cfg);

/// Mel magnitudes in dB, clipped below at floor_db but not normalized.
/// Doubling the input amplitude shifts every unclipped entry by exactly
/// 20*log10(2), which is the property tests key on.
Eigen::MatrixXd compute_mel_db(const Waveform& wav, const FeatureConfig& cfg);

/// Full analysis: STFT magnitude -> mel -> dB -> min-max normalized to [0, 1]
/// over [floor_db, 0]. T = floor(len/hop) + 1.
MelSpectrogram compute_mel(const Waveform& wav, const FeatureConfig& cfg);

/// Griffin-Lim inversion. Requires T >= 2 (the output length (T-1)*hop must
/// be nonempty). Phase starts at zero so the result is deterministic.
Waveform invert_mel(const MelSpectrogram& mel, int iterations = 60);

/// Right-pads with zero frames so T becomes a multiple of `factor`.
MelSpectrogram pad_frames(const MelSpectrogram& mel, int factor);

/// Keeps the first `frames` columns (undo pad_frames).
MelSpectrogram crop_frames(const MelSpectrogram& mel, long frames);

/// Binary mel cache: magic, n_mels, T, config hash, then row-major
/// little-endian float32 values.
void write_mel_cache(const std::filesystem::path& path, const MelSpectrogram& mel);
MelSpectrogram read_mel_cache(const std::filesystem::path& path,
                              const FeatureConfig& expected);

}  // namespace autovc
