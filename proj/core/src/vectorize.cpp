#include "ttpc/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "ttpc/errors.hpp"

namespace ttpc {

std::int64_t Vocabulary::index_of(const std::string& term) const {
    auto it = index_.find(term);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms, std::vector<std::uint32_t> df,
                                  std::size_t n_docs) {
    if (terms.size() != df.size())
        throw DataError("vocabulary terms and document frequencies differ in length");
    if (!std::is_sorted(terms.begin(), terms.end()))
        throw DataError("vocabulary terms are not sorted");
    Vocabulary v;
    v.terms_ = std::move(terms);
    v.df_ = std::move(df);
    v.n_docs_ = n_docs;
    for (std::size_t i = 0; i < v.terms_.size(); ++i)
        v.index_.emplace(v.terms_[i], static_cast<std::uint32_t>(i));
    return v;
}

Vocabulary build_vocabulary(const TokenDocs& docs, std::size_t min_df) {
    if (min_df < 1) throw UsageError("min_df must be at least 1");
    if (docs.empty()) throw DataError("cannot build a vocabulary from an empty corpus");

    std::map<std::string, std::uint32_t> df;  // ordered: terms come out sorted
    bool any_tokens = false;
    for (const auto& doc : docs) {
        if (doc.empty()) continue;
        any_tokens = true;
        std::unordered_set<std::string> seen;
        for (const auto& t : doc) seen.insert(t);
        for (const auto& t : seen) ++df[t];
    }
    if (!any_tokens) throw DataError("cannot build a vocabulary from a corpus with no tokens");

    Vocabulary v;
    v.n_docs_ = docs.size();
    for (const auto& [term, count] : df) {
        if (count < min_df) continue;
        v.index_.emplace(term, static_cast<std::uint32_t>(v.terms_.size()));
        v.terms_.push_back(term);
        v.df_.push_back(count);
    }
    return v;
}

FeatureVector vectorize_tf(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const auto& t : tokens) {
        std::int64_t idx = vocab.index_of(t);
        if (idx >= 0) counts[static_cast<std::uint32_t>(idx)] += 1.0;
    }
    std::vector<std::pair<std::uint32_t, double>> entries(counts.begin(), counts.end());
    return FeatureVector::sparse(vocab.size(), std::move(entries));
}

FeatureVector vectorize_onehot(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    FeatureVector v = vectorize_tf(tokens, vocab);
    for (auto& [idx, val] : v.entries) {
        (void)idx;
        val = 1.0;
    }
    return v;
}

IdfTable fit_tfidf(const TokenDocs& docs, const Vocabulary& vocab) {
    if (docs.empty()) throw DataError("cannot fit idf values on an empty corpus");
    std::vector<std::uint32_t> df(vocab.size(), 0);
    for (const auto& doc : docs) {
        std::unordered_set<std::int64_t> seen;
        for (const auto& t : doc) {
            std::int64_t idx = vocab.index_of(t);
            if (idx >= 0) seen.insert(idx);
        }
        for (std::int64_t idx : seen) ++df[static_cast<std::size_t>(idx)];
    }
    const double n = static_cast<double>(docs.size());
    std::vector<double> idf(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i)
        idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
    return IdfTable(std::move(idf));
}

FeatureVector vectorize_tfidf(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              const IdfTable& idf) {
    if (idf.size() != vocab.size())
        throw DataError("idf table does not match the vocabulary it is used with");
    FeatureVector v = vectorize_tf(tokens, vocab);
    for (auto& [idx, val] : v.entries) val *= idf.values()[idx];
    v.l2_normalize();
    return v;
}

}  // namespace ttpc
