#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttpc/learners.hpp"
#include "ttpc/mlabel.hpp"
#include "ttpc/textprep.hpp"

namespace ttpc {

// The four document-vectorization schemes selectable in a pipeline.
enum class VectorizerKind { onehot, tf, tfidf, doc2vec };

std::string to_string(VectorizerKind kind);
VectorizerKind vectorizer_kind_from_string(const std::string& name);
const std::vector<VectorizerKind>& all_vectorizer_kinds();

// One point in the pipeline search space: how text is normalized and
// vectorized, how the multi-label problem is transformed, and which base
// classifier learns each subproblem.
struct PipelineConfig {
    NormalizerMode normalizer = NormalizerMode::stem;
    VectorizerKind vectorizer = VectorizerKind::onehot;
    MultiLabelStrategy transformation = MultiLabelStrategy::binary_relevance;
    ClassifierKind classifier = ClassifierKind::multinomial_nb;
    LabelSpaceKind label_kind = LabelSpaceKind::tactics;
    std::uint64_t seed = 0;

    // Throws IncompatibleConfigError for combinations that cannot work:
    // count-based naive Bayes on signed embedding coordinates.
    void validate() const;

    // Stable identifier "normalizer+vectorizer+transformation+classifier",
    // used to key report rows.
    std::string key() const;
};

// True for the combinations validate() rejects.
bool is_forbidden_combination(VectorizerKind vectorizer,
                              ClassifierKind classifier);

}  // namespace ttpc
