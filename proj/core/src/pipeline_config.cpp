#include "ttpc/pipeline_config.hpp"

#include "ttpc/errors.hpp"

namespace ttpc {

std::string to_string(VectorizerKind kind) {
    switch (kind) {
        case VectorizerKind::onehot: return "onehot";
        case VectorizerKind::tf: return "tf";
        case VectorizerKind::tfidf: return "tfidf";
        case VectorizerKind::doc2vec: return "doc2vec";
    }
    throw InternalError("unhandled vectorizer kind");
}

VectorizerKind vectorizer_kind_from_string(const std::string& name) {
    for (VectorizerKind kind : all_vectorizer_kinds()) {
        if (to_string(kind) == name) return kind;
    }
    throw UsageError("unknown vectorizer '" + name +
                     "' (expected onehot, tf, tfidf, or doc2vec)");
}

const std::vector<VectorizerKind>& all_vectorizer_kinds() {
    static const std::vector<VectorizerKind> kAll = {
        VectorizerKind::onehot,
        VectorizerKind::tf,
        VectorizerKind::tfidf,
        VectorizerKind::doc2vec,
    };
    return kAll;
}

bool is_forbidden_combination(VectorizerKind vectorizer,
                              ClassifierKind classifier) {
    return vectorizer == VectorizerKind::doc2vec &&
           (classifier == ClassifierKind::multinomial_nb ||
            classifier == ClassifierKind::complement_nb);
}

void PipelineConfig::validate() const {
    if (is_forbidden_combination(vectorizer, classifier)) {
        throw IncompatibleConfigError(
            "classifier " + to_string(classifier) +
            " requires nonnegative count features; the " +
            to_string(vectorizer) +
            " vectorizer produces signed embedding coordinates");
    }
}

std::string PipelineConfig::key() const {
    return std::string(to_string(normalizer)) + "+" + to_string(vectorizer) +
           "+" + to_string(transformation) + "+" + to_string(classifier);
}

}  // namespace ttpc
