#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "autovc/rng.hpp"

namespace autovc {

enum class Split { train, test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct UtteranceRecord {
    std::string speaker_id;
    std::string audio_path;  // stored verbatim; may be relative to the manifest
    Split split = Split::train;
    double duration_s = 0.0;

    bool operator==(const UtteranceRecord&) const = default;
};

/// Speaker-labeled utterance index. `base_dir` is where relative audio paths
/// resolve from; it is set by load_manifest and not serialized.
struct CorpusManifest {
    std::vector<UtteranceRecord> records;
    std::vector<std::string> speakers;  // distinct, in order of first appearance
    std::filesystem::path base_dir;

    /// Every record's speaker listed, every speaker with >= 2 train
    /// utterances. Throws ValidationError otherwise.
    void validate() const;

    std::vector<const UtteranceRecord*> records_for(const std::string& speaker_id,
                                                    Split split) const;
    std::filesystem::path resolve(const UtteranceRecord& rec) const;

    /// Copy restricted to the given speakers (used for hold-out experiments).
    CorpusManifest subset(const std::vector<std::string>& keep) const;
};

/// Parameters of one synthetic voice: three formant resonances and a pitch.
struct SyntheticSpeakerSpec {
    std::string speaker_id;
    std::array<double, 3> formant_centers_hz{};
    double pitch_hz = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Deterministic speaker specs for a corpus of `num_speakers` voices, spread
/// across the formant/pitch ranges so the voices are well separated.
std::vector<SyntheticSpeakerSpec> make_speaker_specs(int num_speakers,
                                                     std::uint64_t seed);

/// Generates a multi-speaker corpus of vowel-like utterances as 16 kHz mono
/// PCM WAV files under out_dir, plus a manifest.jsonl. The segment sequence
/// (the "content") is drawn from a distribution shared by all speakers; only
/// the formant/pitch coloring is speaker-specific. Splits are 9:1 per speaker
/// (seeded-random; small speakers keep everything in train).
CorpusManifest generate_synthetic_corpus(const std::filesystem::path& out_dir,
                                         int num_speakers, int utterances_per_speaker,
                                         double utterance_len_s, std::uint64_t seed);

void save_manifest(const std::filesystem::path& path, const CorpusManifest& manifest);

/// Parses a JSON-lines manifest and validates it. Parse failures name the
/// line; an empty file or an under-provisioned speaker is a validation error.
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Draws (X1, X1') from one uniformly chosen speaker's train utterances.
/// The second record may equal the first.
std::pair<UtteranceRecord, UtteranceRecord> sample_training_pair(
    const CorpusManifest& manifest, Rng& rng);

}  // namespace autovc
