#include "autovc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "autovc/errors.hpp"
#include "autovc/wav.hpp"

namespace autovc {

using nlohmann::json;

std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw ParseError("unknown split value: " + s);
}

void CorpusManifest::validate() const {
    if (records.empty() || speakers.empty())
        throw ValidationError("manifest holds no utterances");
    std::set<std::string> known(speakers.begin(), speakers.end());
    std::map<std::string, int> train_counts;
    for (const auto& rec : records) {
        if (rec.speaker_id.empty())
            throw ValidationError("manifest record with empty speaker_id");
        if (rec.duration_s <= 0.0)
            throw ValidationError("manifest record with non-positive duration for speaker " +
                                  rec.speaker_id);
        if (!known.count(rec.speaker_id))
            throw ValidationError("record speaker " + rec.speaker_id +
                                  " missing from speaker list");
        if (rec.split == Split::train) ++train_counts[rec.speaker_id];
    }
    for (const auto& spk : speakers) {
        if (train_counts[spk] < 2)
            throw ValidationError("speaker " + spk +
                                  " has fewer than 2 train utterances");
    }
}

std::vector<const UtteranceRecord*> CorpusManifest::records_for(
    const std::string& speaker_id, Split split) const {
    std::vector<const UtteranceRecord*> out;
    for (const auto& rec : records)
        if (rec.speaker_id == speaker_id && rec.split == split) out.push_back(&rec);
    return out;
}

std::filesystem::path CorpusManifest::resolve(const UtteranceRecord& rec) const {
    std::filesystem::path p(rec.audio_path);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

CorpusManifest CorpusManifest::subset(const std::vector<std::string>& keep) const {
    std::set<std::string> wanted(keep.begin(), keep.end());
    CorpusManifest out;
    out.base_dir = base_dir;
    for (const auto& spk : speakers)
        if (wanted.count(spk)) out.speakers.push_back(spk);
    for (const auto& rec : records)
        if (wanted.count(rec.speaker_id)) out.records.push_back(rec);
    return out;
}

void SyntheticSpeakerSpec::validate() const {
    if (speaker_id.empty()) throw ValidationError("synthetic speaker without id");
    for (double f : formant_centers_hz)
        if (!(f > 200.0 && f < 3500.0))
            throw ValidationError("formant center out of (200, 3500) Hz for " + speaker_id);
    if (!(formant_centers_hz[0] < formant_centers_hz[1] &&
          formant_centers_hz[1] < formant_centers_hz[2]))
        throw ValidationError("formant centers not strictly increasing for " + speaker_id);
    if (!(pitch_hz > 80.0 && pitch_hz < 300.0))
        throw ValidationError("pitch out of (80, 300) Hz for " + speaker_id);
}

std::vector<SyntheticSpeakerSpec> make_speaker_specs(int num_speakers,
                                                     std::uint64_t seed) {
    if (num_speakers < 2) throw ArgumentError("need at least 2 synthetic speakers");
    std::vector<SyntheticSpeakerSpec> specs;
    Rng rng(fnv1a_str("speaker-specs") ^ seed);
    for (int i = 0; i < num_speakers; ++i) {
        const double frac = (i + 0.5) / num_speakers;
        SyntheticSpeakerSpec spec;
        char name[16];
        std::snprintf(name, sizeof(name), "spk%02d", i);
        spec.speaker_id = name;
        spec.formant_centers_hz = {
            std::clamp(250.0 + 500.0 * frac + rng.normal(0.0, 12.0), 210.0, 790.0),
            std::clamp(850.0 + 1400.0 * frac + rng.normal(0.0, 25.0), 810.0, 2320.0),
            std::clamp(2400.0 + 900.0 * frac + rng.normal(0.0, 35.0), 2340.0, 3450.0)};
        spec.pitch_hz = std::clamp(95.0 + 150.0 * frac + rng.normal(0.0, 3.0), 85.0, 290.0);
        spec.seed = rng.fork_seed();
        spec.validate();
        specs.push_back(spec);
    }
    return specs;
}

namespace {

/// One vowel-like stretch: relative formant perturbations and mixing weights
/// shared across speakers, so content carries no speaker information.
struct Segment {
    double duration_s;
    std::array<double, 3> formant_scale;
    std::array<double, 3> weight;
    double pitch_scale;
};

std::vector<Segment> draw_content(double utterance_len_s, Rng& rng) {
    std::vector<Segment> segments;
    double t = 0.0;
    while (t < utterance_len_s) {
        Segment seg;
        seg.duration_s = rng.uniform(0.12, 0.30);
        double wsum = 0.0;
        for (int k = 0; k < 3; ++k) {
            seg.formant_scale[k] = rng.uniform(0.92, 1.08);
            seg.weight[k] = rng.uniform(0.25, 1.0);
            wsum += seg.weight[k];
        }
        for (int k = 0; k < 3; ++k) seg.weight[k] /= wsum;
        seg.pitch_scale = rng.uniform(0.97, 1.03);
        segments.push_back(seg);
        t += seg.duration_s;
    }
    return segments;
}

Waveform render_utterance(const SyntheticSpeakerSpec& spec,
                          const std::vector<Segment>& content, double utterance_len_s,
                          Rng& phase_rng) {
    const int total = static_cast<int>(std::lround(utterance_len_s * kSampleRate));
    Waveform wav;
    wav.samples.assign(total, 0.0);

    int offset = 0;
    for (const auto& seg : content) {
        if (offset >= total) break;
        const int seg_len =
            std::min(total - offset, static_cast<int>(std::lround(seg.duration_s * kSampleRate)));
        const double f0 = spec.pitch_hz * seg.pitch_scale;
        const int n_harmonics = static_cast<int>(7600.0 / f0);

        // Harmonic amplitudes shaped by the speaker's (perturbed) formants.
        std::vector<double> amp(n_harmonics + 1, 0.0);
        std::vector<double> phase(n_harmonics + 1, 0.0);
        for (int h = 1; h <= n_harmonics; ++h) {
            const double f = h * f0;
            double a = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double center = spec.formant_centers_hz[k] * seg.formant_scale[k];
                const double bw = 90.0 + 50.0 * k;
                const double d = (f - center) / bw;
                a += seg.weight[k] * std::exp(-d * d);
            }
            amp[h] = a / std::pow(static_cast<double>(h), 0.3);
            phase[h] = phase_rng.uniform(0.0, 2.0 * M_PI);
        }

        const int edge = std::min(seg_len / 4, kSampleRate / 200);  // 5 ms fades
        for (int n = 0; n < seg_len; ++n) {
            double s = 0.0;
            for (int h = 1; h <= n_harmonics; ++h)
                s += amp[h] * std::sin(2.0 * M_PI * h * f0 * n / kSampleRate + phase[h]);
            double env = 1.0;
            if (n < edge) env = 0.5 - 0.5 * std::cos(M_PI * n / edge);
            if (seg_len - 1 - n < edge)
                env = std::min(env, 0.5 - 0.5 * std::cos(M_PI * (seg_len - 1 - n) / edge));
            wav.samples[offset + n] = s * env;
        }
        offset += seg_len;
    }

    double peak = 0.0;
    for (double s : wav.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.0)
        for (double& s : wav.samples) s *= 0.8 / peak;
    return wav;
}

}  // namespace

CorpusManifest generate_synthetic_corpus(const std::filesystem::path& out_dir,
                                         int num_speakers, int utterances_per_speaker,
                                         double utterance_len_s, std::uint64_t seed) {
    if (num_speakers < 2) throw ArgumentError("generate_synthetic_corpus: need >= 2 speakers");
    if (utterances_per_speaker < 2)
        throw ArgumentError("generate_synthetic_corpus: need >= 2 utterances per speaker");
    if (utterance_len_s < 2.0)
        throw ArgumentError("generate_synthetic_corpus: utterances must be >= 2 s");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create corpus directory: " + out_dir.string());

    const auto specs = make_speaker_specs(num_speakers, seed);
    CorpusManifest manifest;
    manifest.base_dir = out_dir;

    for (int s = 0; s < num_speakers; ++s) {
        const auto& spec = specs[s];
        manifest.speakers.push_back(spec.speaker_id);

        // 9:1 seeded-random split; tiny speakers keep everything in train.
        const int n_test = utterances_per_speaker / 10;
        std::vector<int> order(utterances_per_speaker);
        std::iota(order.begin(), order.end(), 0);
        Rng split_rng(fnv1a_str("split:" + spec.speaker_id) ^ seed);
        for (int i = utterances_per_speaker - 1; i > 0; --i)
            std::swap(order[i], order[split_rng.below(i + 1)]);
        std::set<int> test_set(order.begin(), order.begin() + n_test);

        for (int u = 0; u < utterances_per_speaker; ++u) {
            // Content seeding is independent of the speaker's voice parameters.
            Rng content_rng(fnv1a_str("content") ^ seed ^
                            (static_cast<std::uint64_t>(s) << 32 | u));
            const auto content = draw_content(utterance_len_s, content_rng);
            Rng phase_rng(fnv1a_str("phase") ^ spec.seed ^ u);
            const Waveform wav = render_utterance(spec, content, utterance_len_s, phase_rng);

            char name[48];
            std::snprintf(name, sizeof(name), "%s_utt%03d.wav", spec.speaker_id.c_str(), u);
            write_wav(out_dir / name, wav);

            UtteranceRecord rec;
            rec.speaker_id = spec.speaker_id;
            rec.audio_path = name;
            rec.split = test_set.count(u) ? Split::test : Split::train;
            rec.duration_s = wav.duration_s();
            manifest.records.push_back(rec);
        }
    }
    manifest.validate();
    save_manifest(out_dir / "manifest.jsonl", manifest);
    return manifest;
}

void save_manifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    for (const auto& rec : manifest.records) {
        json j;
        j["speaker_id"] = rec.speaker_id;
        j["audio_path"] = rec.audio_path;
        j["split"] = to_string(rec.split);
        j["duration_s"] = rec.duration_s;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("short write to manifest: " + path.string());
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path.string());

    CorpusManifest manifest;
    manifest.base_dir = path.parent_path();
    std::set<std::string> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("manifest: ") + e.what(), line_no);
        }
        for (const char* key : {"speaker_id", "audio_path", "split", "duration_s"})
            if (!j.contains(key))
                throw ParseError(std::string("manifest record missing ") + key, line_no);
        UtteranceRecord rec;
        try {
            rec.speaker_id = j["speaker_id"].get<std::string>();
            rec.audio_path = j["audio_path"].get<std::string>();
            rec.split = split_from_string(j["split"].get<std::string>());
            rec.duration_s = j["duration_s"].get<double>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("manifest field type: ") + e.what(), line_no);
        }
        if (rec.speaker_id.empty()) throw ParseError("empty speaker_id", line_no);
        if (!seen.count(rec.speaker_id)) {
            seen.insert(rec.speaker_id);
            manifest.speakers.push_back(rec.speaker_id);
        }
        manifest.records.push_back(rec);
    }
    manifest.validate();
    return manifest;
}

std::pair<UtteranceRecord, UtteranceRecord> sample_training_pair(
    const CorpusManifest& manifest, Rng& rng) {
    if (manifest.records.empty() || manifest.speakers.empty())
        throw ArgumentError("sample_training_pair: empty manifest");
    const auto& speaker =
        manifest.speakers[rng.below(manifest.speakers.size())];
    const auto train = manifest.records_for(speaker, Split::train);
    if (train.size() < 1)
        throw ArgumentError("sample_training_pair: speaker without train utterances");
    const UtteranceRecord& first = *train[rng.below(train.size())];
    const UtteranceRecord& second = *train[rng.below(train.size())];
    return {first, second};
}

}  // namespace autovc
