#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttpc/corpus.hpp"
#include "ttpc/doc2vec.hpp"
#include "ttpc/mlabel.hpp"
#include "ttpc/pipeline_config.hpp"
#include "ttpc/textprep.hpp"
#include "ttpc/vectorize.hpp"

namespace ttpc {

// On-disk archive revision; load_pipeline refuses other versions by name.
inline constexpr int kArchiveFormatVersion = 1;

// Outcome of classifying one text. `scores` is aligned with the pipeline's
// label space (label_space().labels()), independent of which labels were
// predicted. When nothing is left of the text after IoC replacement,
// tokenization and normalization, the pipeline cannot say anything: labels
// and scores are empty and empty_after_normalization is set.
struct PipelinePrediction {
    std::vector<std::string> labels;
    std::vector<double> scores;
    bool empty_after_normalization = false;
};

// A fitted end-to-end classifier: normalization settings, fitted vectorizer
// state, and the fitted multi-label model, plus enough provenance (corpus
// digest, preprocessing versions, creation time) to tie an archive back to
// what produced it. Immutable after fit; concurrent predict() calls are safe.
class TrainedPipeline {
  public:
    const PipelineConfig& config() const { return config_; }
    const MultiLabelModel& model() const { return *model_; }
    const LabelSpace& label_space() const { return model_->label_space(); }

    // SHA-256 of the canonical JSONL serialization of the training corpus.
    const std::string& corpus_digest() const { return corpus_digest_; }
    // Caller-supplied timestamp, stored verbatim (injected so archives can
    // be byte-stable).
    const std::string& created_at() const { return created_at_; }
    const std::string& ioc_table_version() const { return ioc_version_; }
    int textprep_version() const { return textprep_version_; }

    // Fitted vectorizer state. vocabulary() is meaningful for onehot/tf/
    // tfidf, idf() for tfidf, embedding() for doc2vec.
    const Vocabulary& vocabulary() const { return vocabulary_; }
    const IdfTable& idf() const { return idf_; }
    const EmbeddingModel& embedding() const { return embedding_; }

    // Applies the exact training-time preprocessing to `text` and classifies
    // the result.
    PipelinePrediction predict(const std::string& text) const;

    friend TrainedPipeline fit_pipeline(const PipelineConfig&,
                                        const std::vector<LabeledSample>&,
                                        const TextResources&,
                                        const std::string&);
    friend TrainedPipeline load_pipeline(const std::string&,
                                         const TextResources&);

  private:
    TrainedPipeline() = default;

    FeatureVector vectorize(const std::vector<std::string>& tokens) const;

    PipelineConfig config_;
    TextResources resources_;
    Vocabulary vocabulary_;
    IdfTable idf_;
    EmbeddingModel embedding_;
    std::optional<MultiLabelModel> model_;
    std::string corpus_digest_;
    std::string created_at_;
    std::string ioc_version_;
    int textprep_version_ = kTextprepVersion;
};

// Fits the configured pipeline on the corpus: prepare_text on every sample,
// vectorizer fit (vocabulary with min_df=2, idf, or embedding training),
// then the multi-label transform over the label kind named by the config.
// The label space is the union of labels present in the corpus. `created_at`
// is recorded verbatim; fixing it (and the config seed) makes the saved
// archive byte-reproducible. Throws IncompatibleConfigError for forbidden
// configurations and DataError for an empty or unlabeled corpus.
TrainedPipeline fit_pipeline(
    const PipelineConfig& config, const std::vector<LabeledSample>& corpus,
    const TextResources& resources = TextResources::builtin(),
    const std::string& created_at = "1970-01-01T00:00:00Z");

// Single-file JSON archive. Doubles survive the round trip exactly, so
// load(save(tp)) predicts bit-identically.
void save_pipeline(const TrainedPipeline& pipeline, const std::string& path);

// The archive bytes save_pipeline would write. Because every fitted value is
// serialized, equal strings mean equal fitted state; digesting them detects
// any influence a sample has on a fit.
std::string pipeline_archive_string(const TrainedPipeline& pipeline);
TrainedPipeline load_pipeline(
    const std::string& path,
    const TextResources& resources = TextResources::builtin());

}  // namespace ttpc
