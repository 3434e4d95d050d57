#include "autovc/features.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "autovc/dsp.hpp"
#include "autovc/errors.hpp"
#include "autovc/rng.hpp"

namespace autovc {

namespace {

constexpr char kMelMagic[8] = {'A', 'V', 'C', 'M', 'E', 'L', '1', '\0'};

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

void FeatureConfig::validate() const {
    if (sample_rate_hz <= 0 || hop_samples <= 0)
        throw ArgumentError("feature config: rates must be positive");
    if (std::abs(frame_rate_hz() - 62.5) > 1e-9)
        throw ArgumentError("feature config: sample_rate/hop must give the 62.5 Hz frame rate");
    if (fft_size < win_length)
        throw ArgumentError("feature config: fft_size must be >= window length");
    if (!(mel_fmin_hz < mel_fmax_hz && mel_fmax_hz <= sample_rate_hz / 2.0))
        throw ArgumentError("feature config: need mel_fmin < mel_fmax <= Nyquist");
    if (n_mels < 1) throw ArgumentError("feature config: n_mels must be positive");
    if (floor_db >= 0.0) throw ArgumentError("feature config: floor_db must be negative");
}

std::uint64_t FeatureConfig::hash() const {
    std::ostringstream os;
    os << sample_rate_hz << '|' << n_mels << '|' << hop_samples << '|' << fft_size << '|'
       << win_length << '|' << mel_fmin_hz << '|' << mel_fmax_hz << '|' << floor_db;
    return fnv1a_str(os.str());
}

Eigen::MatrixXd mel_filterbank(const FeatureConfig& cfg) {
    cfg.validate();
    const int n_bins = cfg.n_bins();
    const double mel_lo = hz_to_mel(cfg.mel_fmin_hz);
    const double mel_hi = hz_to_mel(cfg.mel_fmax_hz);

    std::vector<double> edges(cfg.n_mels + 2);
    for (int i = 0; i < cfg.n_mels + 2; ++i)
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

    Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, n_bins);
    for (int m = 0; m < cfg.n_mels; ++m) {
        const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
        const double area_norm = 2.0 / (hi - lo);
        for (int b = 0; b < n_bins; ++b) {
            const double f = static_cast<double>(b) * cfg.sample_rate_hz / cfg.fft_size;
            double w = 0.0;
            if (f > lo && f < hi)
                w = (f <= center) ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
            fb(m, b) = w * area_norm;
        }
    }
    return fb;
}

Eigen::MatrixXd compute_mel_db(const Waveform& wav, const FeatureConfig& cfg) {
    cfg.validate();
    if (wav.samples.empty()) throw ArgumentError("compute_mel: empty waveform");
    if (static_cast<int>(wav.samples.size()) < cfg.win_length)
        throw ArgumentError("compute_mel: waveform shorter than one analysis window");
    if (wav.sample_rate_hz != cfg.sample_rate_hz)
        throw ArgumentError("compute_mel: waveform sample rate mismatch");

    const Eigen::MatrixXcd spec =
        stft(wav.samples, cfg.fft_size, cfg.win_length, cfg.hop_samples);
    const Eigen::MatrixXd mag = magnitude(spec);
    const Eigen::MatrixXd mel = mel_filterbank(cfg) * mag;

    const double amin = std::pow(10.0, cfg.floor_db / 20.0);
    Eigen::MatrixXd db(mel.rows(), mel.cols());
    for (long j = 0; j < mel.cols(); ++j)
        for (long i = 0; i < mel.rows(); ++i)
            db(i, j) = 20.0 * std::log10(std::max(mel(i, j), amin));
    return db;
}

MelSpectrogram compute_mel(const Waveform& wav, const FeatureConfig& cfg) {
    const Eigen::MatrixXd db = compute_mel_db(wav, cfg);
    MelSpectrogram out;
    out.config = cfg;
    out.values = ((db.array() - cfg.floor_db) / (0.0 - cfg.floor_db)).cwiseMin(1.0).cwiseMax(0.0);
    return out;
}

Waveform invert_mel(const MelSpectrogram& mel, int iterations) {
    mel.config.validate();
    if (iterations < 1) throw ArgumentError("invert_mel: iterations must be >= 1");
    if (mel.frames() < 2)
        throw ArgumentError("invert_mel: need at least 2 frames for a nonempty output");
    if (mel.bins() != mel.config.n_mels)
        throw ArgumentError("invert_mel: mel bin count does not match config");
    const FeatureConfig& cfg = mel.config;

    // Denormalize back to mel magnitudes.
    const Eigen::MatrixXd db =
        mel.values.array() * (0.0 - cfg.floor_db) + cfg.floor_db;
    const Eigen::MatrixXd mel_mag = Eigen::pow(10.0, db.array() / 20.0);

    // Mel -> linear via the minimum-norm least-squares solution, clipped at 0.
    const Eigen::MatrixXd fb = mel_filterbank(cfg);
    Eigen::MatrixXd gram = fb * fb.transpose();
    gram.diagonal().array() += 1e-10;
    const Eigen::MatrixXd lin =
        (fb.transpose() * gram.ldlt().solve(mel_mag)).cwiseMax(0.0);

    // Griffin-Lim with zero initial phase.
    const long T = lin.cols();
    Eigen::MatrixXcd spec = lin.cast<std::complex<double>>();
    std::vector<double> x =
        istft(spec, cfg.fft_size, cfg.win_length, cfg.hop_samples);
    for (int it = 1; it < iterations; ++it) {
        Eigen::MatrixXcd est = stft(x, cfg.fft_size, cfg.win_length, cfg.hop_samples);
        // stft of the synthesized signal has the same frame count.
        for (long t = 0; t < T; ++t)
            for (int b = 0; b < cfg.n_bins(); ++b) {
                const double m = std::abs(est(b, t));
                const std::complex<double> phase =
                    m > 1e-12 ? est(b, t) / m : std::complex<double>(1.0, 0.0);
                spec(b, t) = lin(b, t) * phase;
            }
        x = istft(spec, cfg.fft_size, cfg.win_length, cfg.hop_samples);
    }

    Waveform out;
    out.sample_rate_hz = cfg.sample_rate_hz;
    out.samples.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.samples[i] = std::clamp(x[i], -1.0, 1.0);
    return out;
}

MelSpectrogram pad_frames(const MelSpectrogram& mel, int factor) {
    if (factor < 1) throw ArgumentError("pad_frames: factor must be >= 1");
    const long T = mel.frames();
    const long padded = (T + factor - 1) / factor * factor;
    if (padded == T) return mel;
    MelSpectrogram out;
    out.config = mel.config;
    out.values = Eigen::MatrixXd::Zero(mel.bins(), padded);
    out.values.leftCols(T) = mel.values;
    return out;
}

MelSpectrogram crop_frames(const MelSpectrogram& mel, long frames) {
    if (frames < 1 || frames > mel.frames())
        throw ArgumentError("crop_frames: frame count out of range");
    MelSpectrogram out;
    out.config = mel.config;
    out.values = mel.values.leftCols(frames);
    return out;
}

void write_mel_cache(const std::filesystem::path& path, const MelSpectrogram& mel) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write mel cache: " + path.string());
    out.write(kMelMagic, 8);
    const std::uint32_t n_mels = static_cast<std::uint32_t>(mel.bins());
    const std::uint32_t frames = static_cast<std::uint32_t>(mel.frames());
    const std::uint64_t hash = mel.config.hash();
    out.write(reinterpret_cast<const char*>(&n_mels), 4);
    out.write(reinterpret_cast<const char*>(&frames), 4);
    out.write(reinterpret_cast<const char*>(&hash), 8);
    for (long i = 0; i < mel.bins(); ++i)
        for (long j = 0; j < mel.frames(); ++j) {
            const float v = static_cast<float>(mel.values(i, j));
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    if (!out) throw IoError("short write to mel cache: " + path.string());
}

MelSpectrogram read_mel_cache(const std::filesystem::path& path,
                              const FeatureConfig& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mel cache: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMelMagic, 8) != 0)
        throw ParseError("bad mel cache magic: " + path.string());
    std::uint32_t n_mels = 0, frames = 0;
    std::uint64_t hash = 0;
    in.read(reinterpret_cast<char*>(&n_mels), 4);
    in.read(reinterpret_cast<char*>(&frames), 4);
    in.read(reinterpret_cast<char*>(&hash), 8);
    if (!in) throw ParseError("truncated mel cache header: " + path.string());
    if (hash != expected.hash())
        throw ConfigError("mel cache was built with a different feature config: " +
                          path.string());
    MelSpectrogram mel;
    mel.config = expected;
    mel.values.resize(n_mels, frames);
    for (std::uint32_t i = 0; i < n_mels; ++i)
        for (std::uint32_t j = 0; j < frames; ++j) {
            float v;
            in.read(reinterpret_cast<char*>(&v), 4);
            mel.values(i, j) = v;
        }
    if (!in) throw ParseError("truncated mel cache data: " + path.string());
    return mel;
}

}  // namespace autovc
