#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttpc/feature.hpp"

namespace ttpc {

struct Doc2VecParams {
    std::size_t dim = 100;
    std::size_t window = 5;  // recorded for reports; unused by pure PV-DBOW updates
    std::size_t epochs = 40;
    std::size_t negative = 5;
    double alpha = 0.025;
    double min_alpha = 1e-4;
    std::size_t infer_steps = 100;
    std::uint64_t seed = 1;
};

// Paragraph vectors in the PV-DBOW variant, trained with negative sampling.
// Training is single-threaded and strictly ordered, so a seed fixes every
// byte of the model. Inference freezes the word (output) matrix and fits a
// fresh document vector.
class EmbeddingModel {
public:
    EmbeddingModel() = default;

    static EmbeddingModel train(const TokenDocs& docs, const Doc2VecParams& params);

    // Optimizes a vector for an unseen document. Empty input is an error;
    // a document with no in-vocabulary tokens embeds as the zero vector.
    FeatureVector infer(const std::vector<std::string>& tokens, std::size_t steps,
                        std::uint64_t seed) const;

    std::size_t dimension() const { return params_.dim; }
    std::size_t n_docs() const { return doc_vectors_.size() / std::max<std::size_t>(1, params_.dim); }
    const Doc2VecParams& params() const { return params_; }

    FeatureVector doc_vector(std::size_t doc) const;

    // Serialization accessors: vocabulary terms (frequency-descending order),
    // their counts, and the flattened matrices.
    const std::vector<std::string>& vocab_terms() const { return terms_; }
    const std::vector<std::uint64_t>& vocab_counts() const { return counts_; }
    const std::vector<double>& doc_matrix() const { return doc_vectors_; }
    const std::vector<double>& word_matrix() const { return word_vectors_; }

    static EmbeddingModel from_parts(Doc2VecParams params, std::vector<std::string> terms,
                                     std::vector<std::uint64_t> counts,
                                     std::vector<double> doc_matrix,
                                     std::vector<double> word_matrix);

private:
    Doc2VecParams params_;
    std::vector<std::string> terms_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<double> doc_vectors_;   // n_docs x dim, row-major
    std::vector<double> word_vectors_;  // |vocab| x dim, row-major (output layer)
    std::vector<std::uint32_t> negative_table_;

    void build_negative_table();
};

}  // namespace ttpc
