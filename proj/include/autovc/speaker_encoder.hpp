#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "autovc/corpus.hpp"
#include "autovc/features.hpp"
#include "autovc/nn.hpp"

namespace autovc {

/// Unit-norm voice signature vector.
struct SpeakerEmbedding {
    Eigen::VectorXd values;

    long dim() const { return values.size(); }
    void validate() const;  // checks unit norm to 1e-6
};

/// Batch of embeddings laid out speaker-major: column (j * m_utterances + i)
/// is utterance i of speaker j.
struct GE2EBatch {
    long n_speakers = 0;
    long m_utterances = 0;
    Eigen::MatrixXd embeddings;  // dim x (n_speakers * m_utterances)

    void validate() const;
};

/// Softmax-version GE2E loss. Own-speaker centroids exclude the utterance
/// itself; other centroids are plain means. Cosines are computed on the
/// given vectors as-is (they need not be unit norm), so the loss is
/// well-defined under finite-difference perturbations.
double ge2e_softmax_loss(const GE2EBatch& batch, double w, double b);

/// Graph-building version used by training and the gradient tests.
/// `embeddings` holds one (dim x 1) node per utterance, speaker-major.
ag::Var ge2e_loss_graph(const std::vector<ag::Var>& embeddings, long n_speakers,
                        long m_utterances, ag::Var w, ag::Var b);

/// Mean then re-normalize. Throws ValidationError when the mean is
/// degenerate (norm < 1e-8).
SpeakerEmbedding average_embeddings(const std::vector<SpeakerEmbedding>& list);

/// One-hot vector for the conventional many-to-many variant.
Eigen::VectorXd one_hot_embedding(int speaker_index, int num_speakers);

struct SpeakerEncoderDims {
    long n_mels = 80;
    long cell = 768;
    long embed_dim = 256;
};

/// Two stacked LSTMs over the mel frames; the last step's output is
/// projected and L2-normalized.
class SpeakerEncoder {
public:
    SpeakerEncoder() = default;
    SpeakerEncoder(const SpeakerEncoderDims& dims, std::uint64_t seed);

    SpeakerEncoderDims dims;
    nn::Lstm lstm1, lstm2;
    nn::Linear proj;
    nn::Parameter ge2e_w, ge2e_b;

    /// All per-utterance embeddings for a batch of equal-length mel crops;
    /// returns one normalized (embed_dim x 1) node per crop.
    std::vector<ag::Var> embed_batch_graph(nn::Binding& ctx,
                                           const std::vector<Eigen::MatrixXd>& mels);

    /// Evaluation-mode embedding of one utterance.
    SpeakerEmbedding embed_utterance(const MelSpectrogram& mel);

    std::vector<nn::Parameter*> parameters();  // includes the GE2E scale/bias

    /// Stable fingerprint of the current weights (freeze-contract tests).
    std::uint64_t weights_hash() const;
};

struct SpeakerTrainConfig {
    int speakers_per_batch = 4;
    int utterances_per_speaker = 5;
    int segment_frames = 125;  // about 2 s at 62.5 Hz
    int steps = 300;
    nn::AdamConfig adam;
    std::uint64_t seed = 1;
};

struct SpeakerTrainStats {
    std::vector<double> loss_per_step;
};

/// GE2E pre-training on a manifest's train split.
SpeakerTrainStats train_speaker_encoder(SpeakerEncoder& encoder,
                                        const CorpusManifest& manifest,
                                        const FeatureConfig& feat_cfg,
                                        const SpeakerTrainConfig& cfg);

/// Speaker-embedding sidecar files (JSON: speaker_id + embedding values).
void save_embedding_sidecar(const std::filesystem::path& path,
                            const std::string& speaker_id,
                            const SpeakerEmbedding& embedding);
std::pair<std::string, SpeakerEmbedding> load_embedding_sidecar(
    const std::filesystem::path& path);

}  // namespace autovc
