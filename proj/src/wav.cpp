#include "autovc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "autovc/errors.hpp"

namespace autovc {

namespace {

struct RiffChunk {
    char id[4];
    std::uint32_t size;
};

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff)};
    out.write(reinterpret_cast<char*>(b), 2);
}

std::vector<double> resample_linear(const std::vector<double>& in, int from_rate,
                                    int to_rate) {
    if (from_rate == to_rate) return in;
    const double ratio = static_cast<double>(from_rate) / to_rate;
    const auto out_len =
        static_cast<std::size_t>(std::floor((in.size() - 1) / ratio)) + 1;
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const double pos = i * ratio;
        const auto i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min(i0 + 1, in.size() - 1);
        const double frac = pos - static_cast<double>(i0);
        out[i] = in[i0] * (1.0 - frac) + in[i1] * frac;
    }
    return out;
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open WAV file: " + path.string());

    char riff[4], wave[4];
    in.read(riff, 4);
    read_u32(in);  // total size
    in.read(wave, 4);
    if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
        throw ParseError("not a RIFF/WAVE file: " + path.string());

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::vector<double> mono;
    bool have_fmt = false, have_data = false;

    while (in && !have_data) {
        char id[4];
        in.read(id, 4);
        if (!in) break;
        const std::uint32_t size = read_u32(in);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            format = read_u16(in);
            channels = read_u16(in);
            rate = read_u32(in);
            read_u32(in);  // byte rate
            read_u16(in);  // block align
            bits = read_u16(in);
            if (size > 16) in.seekg(size - 16, std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (!have_fmt) throw ParseError("WAV data chunk before fmt: " + path.string());
            if (format != 1 || bits != 16)
                throw ParseError("unsupported WAV encoding (need 16-bit PCM): " +
                                 path.string());
            if (channels == 0) throw ParseError("WAV with zero channels: " + path.string());
            const std::size_t n_frames = size / (2 * channels);
            std::vector<std::int16_t> raw(n_frames * channels);
            in.read(reinterpret_cast<char*>(raw.data()),
                    static_cast<std::streamsize>(raw.size() * 2));
            if (!in) throw ParseError("truncated WAV data: " + path.string());
            mono.resize(n_frames);
            for (std::size_t f = 0; f < n_frames; ++f) {
                double acc = 0.0;
                for (int c = 0; c < channels; ++c)
                    acc += raw[f * channels + c] / 32768.0;
                mono[f] = acc / channels;
            }
            have_data = true;
        } else {
            in.seekg(size + (size & 1), std::ios::cur);  // chunks are word-aligned
        }
    }
    if (!have_data) throw ParseError("WAV file has no data chunk: " + path.string());
    if (mono.empty()) throw ValidationError("WAV file holds no samples: " + path.string());

    Waveform wav;
    wav.samples = resample_linear(mono, static_cast<int>(rate), kSampleRate);
    wav.sample_rate_hz = kSampleRate;
    return wav;
}

void write_wav(const std::filesystem::path& path, const Waveform& wav) {
    if (wav.samples.empty()) throw ArgumentError("refusing to write empty waveform");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write WAV file: " + path.string());

    const auto n = static_cast<std::uint32_t>(wav.samples.size());
    const std::uint32_t data_bytes = n * 2;
    out.write("RIFF", 4);
    write_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1);  // PCM
    write_u16(out, 1);  // mono
    write_u32(out, static_cast<std::uint32_t>(wav.sample_rate_hz));
    write_u32(out, static_cast<std::uint32_t>(wav.sample_rate_hz * 2));
    write_u16(out, 2);
    write_u16(out, 16);
    out.write("data", 4);
    write_u32(out, data_bytes);
    for (double s : wav.samples) {
        const double clipped = std::clamp(s, -1.0, 1.0);
        const auto q = static_cast<std::int16_t>(std::lrint(clipped * 32767.0));
        write_u16(out, static_cast<std::uint16_t>(q));
    }
    if (!out) throw IoError("short write to WAV file: " + path.string());
}

}  // namespace autovc
