#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ttpc {

// Normalized documents as token lists; the common currency between the text
// preparation stage and everything that fits on it.
using TokenDocs = std::vector<std::vector<std::string>>;

// A single document's features. Count-based vectorizers produce sparse
// vectors (sorted index/value pairs); embeddings produce dense ones.
struct FeatureVector {
    enum class Kind { sparse, dense };

    Kind kind = Kind::sparse;
    std::size_t dimension = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;  // sparse, sorted by index
    std::vector<double> values;                             // dense, length == dimension

    static FeatureVector sparse(std::size_t dimension,
                                std::vector<std::pair<std::uint32_t, double>> entries);
    static FeatureVector dense(std::vector<double> values);

    // Value at index i regardless of representation (0.0 for absent sparse entries).
    double at(std::size_t i) const;

    // Dot product against a dense weight vector of length >= dimension.
    double dot(const std::vector<double>& w) const;

    double l2_norm() const;

    // Scales to unit Euclidean length; the zero vector is left untouched.
    void l2_normalize();

    std::vector<double> to_dense() const;

    std::size_t nonzero_count() const;

    bool operator==(const FeatureVector& other) const;
};

}  // namespace ttpc
