#pragma once

#include <filesystem>
#include <vector>

namespace autovc {

inline constexpr int kSampleRate = 16000;

/// Mono waveform, samples in [-1, 1], fixed 16 kHz rate.
struct Waveform {
    std::vector<double> samples;
    int sample_rate_hz = kSampleRate;

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

/// Reads a RIFF PCM WAV file. 16-bit PCM only; stereo is mixed down and
/// any sample rate is linearly resampled to 16 kHz.
Waveform read_wav(const std::filesystem::path& path);

/// Writes 16 kHz mono 16-bit PCM. Samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const Waveform& wav);

}  // namespace autovc
