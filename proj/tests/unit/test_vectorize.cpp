#include "ttpc/vectorize.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "ttpc/errors.hpp"

using ttpc::build_vocabulary;
using ttpc::FeatureVector;
using ttpc::IdfTable;
using ttpc::TokenDocs;
using ttpc::Vocabulary;

namespace {

const TokenDocs kSmallCorpus = {{"a", "b"}, {"b", "c"}, {"b"}};

}  // namespace

TEST_CASE("vocabulary keeps terms at or above min_df, sorted") {
    Vocabulary v2 = build_vocabulary(kSmallCorpus, 2);
    CHECK_EQ(v2.terms(), std::vector<std::string>{"b"});
    CHECK_EQ(v2.df(), std::vector<std::uint32_t>{3});
    CHECK_EQ(v2.n_docs(), 3);

    Vocabulary v1 = build_vocabulary(kSmallCorpus, 1);
    CHECK_EQ(v1.terms(), std::vector<std::string>{"a", "b", "c"});
    CHECK_EQ(v1.index_of("a"), 0);
    CHECK_EQ(v1.index_of("c"), 2);
    CHECK_EQ(v1.index_of("zzz"), -1);
}

TEST_CASE("vocabulary construction rejects corpora with nothing to count") {
    CHECK_THROWS_AS(build_vocabulary({}, 1), ttpc::DataError);
    CHECK_THROWS_AS(build_vocabulary({{}}, 1), ttpc::DataError);
}

TEST_CASE("one-hot marks presence, ignoring counts and unknown terms") {
    Vocabulary v = build_vocabulary(kSmallCorpus, 1);
    FeatureVector got = ttpc::vectorize_onehot({"b", "b", "c"}, v);
    CHECK_EQ(got.entries,
             std::vector<std::pair<std::uint32_t, double>>{{1, 1.0}, {2, 1.0}});
    CHECK_EQ(got.dimension, 3);
    CHECK(ttpc::vectorize_onehot({}, v).entries.empty());
    CHECK(ttpc::vectorize_onehot({"z"}, v).entries.empty());
}

TEST_CASE("term frequency counts occurrences") {
    Vocabulary v = build_vocabulary(kSmallCorpus, 1);
    FeatureVector got = ttpc::vectorize_tf({"b", "b", "c"}, v);
    CHECK_EQ(got.entries,
             std::vector<std::pair<std::uint32_t, double>>{{1, 2.0}, {2, 1.0}});
    CHECK_EQ(ttpc::vectorize_tf({"a"}, v).entries,
             std::vector<std::pair<std::uint32_t, double>>{{0, 1.0}});

    // doubling a document doubles every count
    std::vector<std::string> doc = {"a", "b", "b"};
    std::vector<std::string> twice = doc;
    twice.insert(twice.end(), doc.begin(), doc.end());
    FeatureVector one = ttpc::vectorize_tf(doc, v);
    FeatureVector two = ttpc::vectorize_tf(twice, v);
    REQUIRE_EQ(one.entries.size(), two.entries.size());
    for (std::size_t i = 0; i < one.entries.size(); ++i) {
        CHECK_EQ(two.entries[i].first, one.entries[i].first);
        CHECK_EQ(two.entries[i].second, 2.0 * one.entries[i].second);
    }
}

TEST_CASE("one-hot equals the sign of term frequency") {
    Vocabulary v = build_vocabulary(kSmallCorpus, 1);
    const std::vector<std::vector<std::string>> docs = {
        {"a", "a", "a", "b"}, {"c"}, {"b", "c", "b", "a", "c"}, {}};
    for (const auto& doc : docs) {
        FeatureVector tf = ttpc::vectorize_tf(doc, v);
        FeatureVector oh = ttpc::vectorize_onehot(doc, v);
        REQUIRE_EQ(tf.entries.size(), oh.entries.size());
        for (std::size_t i = 0; i < tf.entries.size(); ++i) {
            CHECK_EQ(oh.entries[i].first, tf.entries[i].first);
            CHECK(tf.entries[i].second >= oh.entries[i].second);
            CHECK_EQ(oh.entries[i].second, 1.0);
        }
    }
}

TEST_CASE("idf follows the smoothed formula") {
    // corpus D1=[a,b], D2=[b]: idf(a)=ln(3/2)+1, idf(b)=ln(3/3)+1
    TokenDocs corpus = {{"a", "b"}, {"b"}};
    Vocabulary v = build_vocabulary(corpus, 1);
    IdfTable idf = ttpc::fit_tfidf(corpus, v);
    REQUIRE_EQ(idf.size(), 2);
    CHECK_EQ(idf.values()[0], doctest::Approx(1.4054651081081646).epsilon(1e-12));
    CHECK_EQ(idf.values()[1], 1.0);  // ln(1) contributes exactly nothing

    FeatureVector d1 = ttpc::vectorize_tfidf({"a", "b"}, v, idf);
    REQUIRE_EQ(d1.entries.size(), 2);
    // proportions survive the L2 normalization
    CHECK_EQ(d1.entries[0].second / d1.entries[1].second,
             doctest::Approx(1.4054651081081646).epsilon(1e-12));
    CHECK_EQ(d1.l2_norm(), doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a term present in every document gets idf exactly 1") {
    TokenDocs corpus = {{"x", "y"}, {"x"}, {"x", "z"}};
    Vocabulary v = build_vocabulary(corpus, 1);
    IdfTable idf = ttpc::fit_tfidf(corpus, v);
    CHECK_EQ(idf.values()[static_cast<std::size_t>(v.index_of("x"))], 1.0);
}

TEST_CASE("tfidf agrees with a brute-force recomputation") {
    TokenDocs corpus = {{"alpha", "beta", "beta"},
                        {"beta", "gamma"},
                        {"alpha", "gamma", "gamma", "delta"},
                        {"delta", "alpha"}};
    Vocabulary v = build_vocabulary(corpus, 1);
    IdfTable idf = ttpc::fit_tfidf(corpus, v);
    for (const auto& doc : corpus) {
        FeatureVector got = ttpc::vectorize_tfidf(doc, v, idf);

        // independent recomputation straight from the definitions
        std::vector<double> want(v.size(), 0.0);
        for (const auto& t : doc) {
            auto idx = v.index_of(t);
            if (idx >= 0) want[static_cast<std::size_t>(idx)] += 1.0;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::size_t df = 0;
            for (const auto& d : corpus) {
                bool has = false;
                for (const auto& t : d) has = has || t == v.terms()[i];
                df += has ? 1 : 0;
            }
            double idf_i =
                std::log((1.0 + corpus.size()) / (1.0 + static_cast<double>(df))) + 1.0;
            want[i] *= idf_i;
        }
        double norm = 0.0;
        for (double x : want) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < want.size(); ++i) {
            double w = norm > 0 ? want[i] / norm : want[i];
            CHECK_EQ(got.at(i), doctest::Approx(w).epsilon(1e-12));
        }
    }
}

TEST_CASE("all-zero documents come back unnormalized") {
    Vocabulary v = build_vocabulary(kSmallCorpus, 1);
    IdfTable idf = ttpc::fit_tfidf(kSmallCorpus, v);
    FeatureVector zero = ttpc::vectorize_tfidf({"unseen", "words"}, v, idf);
    CHECK(zero.entries.empty());
    CHECK_EQ(zero.l2_norm(), 0.0);
}

TEST_CASE("vocabulary reassembles from serialized parts") {
    Vocabulary v = Vocabulary::from_parts({"alpha", "beta"}, {2, 3}, 4);
    CHECK_EQ(v.index_of("beta"), 1);
    CHECK_EQ(v.n_docs(), 4);
    CHECK_THROWS_AS(Vocabulary::from_parts({"b", "a"}, {1, 1}, 2), ttpc::DataError);
    CHECK_THROWS_AS(Vocabulary::from_parts({"a"}, {1, 1}, 2), ttpc::DataError);
}
