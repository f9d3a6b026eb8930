#include "ttpc/doc2vec.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ttpc/errors.hpp"

namespace ttpc {

namespace {

constexpr std::size_t kNegativeTableSize = 1u << 20;

// xorshift64*: small, fast, and the whole training run is a pure function of
// the seed. Never returns 0 state.
inline std::uint64_t next_rand(std::uint64_t& state) {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545F4914F6CDD1DULL;
}

inline double sigmoid(double x) {
    if (x > 50.0) return 1.0;
    if (x < -50.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

// Uniform in [-0.5/dim, 0.5/dim), the usual paragraph-vector initialization.
void random_init(double* v, std::size_t dim, std::uint64_t& state) {
    for (std::size_t k = 0; k < dim; ++k) {
        double u = static_cast<double>(next_rand(state) >> 11) / 9007199254740992.0;  // [0,1)
        v[k] = (u - 0.5) / static_cast<double>(dim);
    }
}

}  // namespace

void EmbeddingModel::build_negative_table() {
    negative_table_.assign(kNegativeTableSize, 0);
    double z = 0.0;
    for (std::uint64_t c : counts_) z += std::pow(static_cast<double>(c), 0.75);
    std::size_t i = 0;
    double cumulative = std::pow(static_cast<double>(counts_[0]), 0.75) / z;
    for (std::size_t a = 0; a < kNegativeTableSize; ++a) {
        negative_table_[a] = static_cast<std::uint32_t>(i);
        if (static_cast<double>(a + 1) / kNegativeTableSize > cumulative && i + 1 < counts_.size()) {
            ++i;
            cumulative += std::pow(static_cast<double>(counts_[i]), 0.75) / z;
        }
    }
}

namespace {

// One positive + `negative` sampled updates against the output matrix.
// `words` rows are only written when update_words is set (training); during
// inference the matrix stays frozen and only the new document vector moves.
void sgns_update(double* v, std::uint32_t word, double lr, std::uint64_t& rng_state,
                 double* words, bool update_words, std::size_t dim, std::size_t negative,
                 const std::vector<std::uint32_t>& table, std::vector<double>& scratch) {
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (std::size_t n = 0; n <= negative; ++n) {
        std::uint32_t target;
        double label;
        if (n == 0) {
            target = word;
            label = 1.0;
        } else {
            target = table[next_rand(rng_state) % kNegativeTableSize];
            if (target == word) continue;
            label = 0.0;
        }
        double* u = words + static_cast<std::size_t>(target) * dim;
        double f = 0.0;
        for (std::size_t k = 0; k < dim; ++k) f += v[k] * u[k];
        const double g = (label - sigmoid(f)) * lr;
        for (std::size_t k = 0; k < dim; ++k) scratch[k] += g * u[k];
        if (update_words)
            for (std::size_t k = 0; k < dim; ++k) u[k] += g * v[k];
    }
    for (std::size_t k = 0; k < dim; ++k) v[k] += scratch[k];
}

}  // namespace

EmbeddingModel EmbeddingModel::train(const TokenDocs& docs, const Doc2VecParams& params) {
    if (docs.empty()) throw DataError("cannot train embeddings on an empty corpus");
    if (params.dim < 2) throw UsageError("embedding dimension must be at least 2");

    EmbeddingModel m;
    m.params_ = params;

    // Vocabulary ordered by frequency (descending), ties alphabetical, so the
    // negative-sampling table is a pure function of the corpus.
    std::map<std::string, std::uint64_t> raw_counts;
    std::uint64_t total_tokens = 0;
    for (const auto& doc : docs) {
        for (const auto& t : doc) {
            ++raw_counts[t];
            ++total_tokens;
        }
    }
    if (total_tokens == 0) throw DataError("cannot train embeddings on a corpus with no tokens");

    std::vector<std::pair<std::string, std::uint64_t>> ordered(raw_counts.begin(),
                                                               raw_counts.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    m.terms_.reserve(ordered.size());
    m.counts_.reserve(ordered.size());
    for (auto& [term, count] : ordered) {
        m.index_.emplace(term, static_cast<std::uint32_t>(m.terms_.size()));
        m.terms_.push_back(std::move(term));
        m.counts_.push_back(count);
    }
    m.build_negative_table();

    const std::size_t dim = params.dim;
    std::uint64_t rng = params.seed ? params.seed : 0x9E3779B97F4A7C15ULL;
    m.doc_vectors_.resize(docs.size() * dim);
    for (std::size_t d = 0; d < docs.size(); ++d)
        random_init(m.doc_vectors_.data() + d * dim, dim, rng);
    m.word_vectors_.assign(m.terms_.size() * dim, 0.0);  // output layer starts at zero

    const std::uint64_t total_updates =
        static_cast<std::uint64_t>(params.epochs) * total_tokens;
    std::uint64_t done = 0;
    std::vector<double> scratch(dim);
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            double* v = m.doc_vectors_.data() + d * dim;
            for (const auto& t : docs[d]) {
                const double progress =
                    static_cast<double>(done) / static_cast<double>(total_updates);
                const double lr =
                    std::max(params.min_alpha, params.alpha * (1.0 - progress));
                sgns_update(v, m.index_.at(t), lr, rng, m.word_vectors_.data(),
                            /*update_words=*/true, dim, params.negative, m.negative_table_,
                            scratch);
                ++done;
            }
        }
    }
    return m;
}

FeatureVector EmbeddingModel::infer(const std::vector<std::string>& tokens, std::size_t steps,
                                    std::uint64_t seed) const {
    if (tokens.empty()) throw DataError("cannot embed empty document");
    const std::size_t dim = params_.dim;

    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto it = index_.find(t);
        if (it != index_.end()) ids.push_back(it->second);
    }
    // Nothing the model knows about: embed as the origin rather than random noise.
    if (ids.empty()) return FeatureVector::dense(std::vector<double>(dim, 0.0));

    std::uint64_t rng = seed ? seed : 0x9E3779B97F4A7C15ULL;
    std::vector<double> v(dim);
    random_init(v.data(), dim, rng);

    const std::uint64_t total_updates = static_cast<std::uint64_t>(steps) * ids.size();
    std::uint64_t done = 0;
    std::vector<double> scratch(dim);
    // This object is not const, only the reference is; with update_words off
    // no word row is ever written through the pointer.
    double* words = const_cast<double*>(word_vectors_.data());
    for (std::size_t step = 0; step < steps; ++step) {
        for (std::uint32_t id : ids) {
            const double progress =
                static_cast<double>(done) / static_cast<double>(total_updates);
            const double lr = std::max(params_.min_alpha, params_.alpha * (1.0 - progress));
            sgns_update(v.data(), id, lr, rng, words, /*update_words=*/false, dim,
                        params_.negative, negative_table_, scratch);
            ++done;
        }
    }
    return FeatureVector::dense(std::move(v));
}

FeatureVector EmbeddingModel::doc_vector(std::size_t doc) const {
    const std::size_t dim = params_.dim;
    if ((doc + 1) * dim > doc_vectors_.size())
        throw InternalError("document index out of range for embedding model");
    return FeatureVector::dense(std::vector<double>(doc_vectors_.begin() + doc * dim,
                                                    doc_vectors_.begin() + (doc + 1) * dim));
}

EmbeddingModel EmbeddingModel::from_parts(Doc2VecParams params, std::vector<std::string> terms,
                                          std::vector<std::uint64_t> counts,
                                          std::vector<double> doc_matrix,
                                          std::vector<double> word_matrix) {
    if (terms.size() != counts.size())
        throw DataError("embedding vocabulary terms and counts differ in length");
    if (word_matrix.size() != terms.size() * params.dim)
        throw DataError("embedding word matrix has the wrong shape");
    if (params.dim == 0 || doc_matrix.size() % params.dim != 0)
        throw DataError("embedding document matrix has the wrong shape");
    EmbeddingModel m;
    m.params_ = params;
    m.terms_ = std::move(terms);
    m.counts_ = std::move(counts);
    for (std::size_t i = 0; i < m.terms_.size(); ++i)
        m.index_.emplace(m.terms_[i], static_cast<std::uint32_t>(i));
    m.doc_vectors_ = std::move(doc_matrix);
    m.word_vectors_ = std::move(word_matrix);
    if (!m.counts_.empty()) m.build_negative_table();
    return m;
}

}  // namespace ttpc
