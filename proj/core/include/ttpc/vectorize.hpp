#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttpc/feature.hpp"

namespace ttpc {

// Term dictionary shared by the one-hot, term-frequency and TF-IDF
// vectorizers. Terms are sorted lexicographically; terms whose document
// frequency fell below min_df are dropped at build time.
class Vocabulary {
public:
    Vocabulary() = default;

    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::uint32_t>& df() const { return df_; }
    std::size_t n_docs() const { return n_docs_; }
    std::size_t size() const { return terms_.size(); }

    // Index of a term, or -1 when out of vocabulary.
    std::int64_t index_of(const std::string& term) const;

    // Reassembles a vocabulary from serialized parts (terms must be sorted).
    static Vocabulary from_parts(std::vector<std::string> terms, std::vector<std::uint32_t> df,
                                 std::size_t n_docs);

    friend Vocabulary build_vocabulary(const TokenDocs& docs, std::size_t min_df);

private:
    std::vector<std::string> terms_;
    std::vector<std::uint32_t> df_;
    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// Counts document frequencies over the training documents and keeps terms
// with df >= min_df. Errors on an empty corpus or a corpus with no tokens.
Vocabulary build_vocabulary(const TokenDocs& docs, std::size_t min_df);

// 1.0 for every vocabulary term present in the document.
FeatureVector vectorize_onehot(const std::vector<std::string>& tokens, const Vocabulary& vocab);

// Raw occurrence counts per vocabulary term.
FeatureVector vectorize_tf(const std::vector<std::string>& tokens, const Vocabulary& vocab);

// Smoothed inverse document frequencies: idf(t) = ln((1+N)/(1+df(t))) + 1.
class IdfTable {
public:
    IdfTable() = default;
    explicit IdfTable(std::vector<double> idf) : idf_(std::move(idf)) {}

    const std::vector<double>& values() const { return idf_; }
    std::size_t size() const { return idf_.size(); }

private:
    std::vector<double> idf_;
};

// Fits idf values for the vocabulary terms over the training documents.
IdfTable fit_tfidf(const TokenDocs& docs, const Vocabulary& vocab);

// tf(t, d) * idf(t), L2-normalized per document; the all-zero vector is
// returned untouched.
FeatureVector vectorize_tfidf(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              const IdfTable& idf);

}  // namespace ttpc
