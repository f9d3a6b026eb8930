#include "ttpc/feature.hpp"

#include <algorithm>
#include <cmath>

#include "ttpc/errors.hpp"

namespace ttpc {

FeatureVector FeatureVector::sparse(std::size_t dimension,
                                    std::vector<std::pair<std::uint32_t, double>> entries) {
    FeatureVector v;
    v.kind = Kind::sparse;
    v.dimension = dimension;
    v.entries = std::move(entries);
    std::sort(v.entries.begin(), v.entries.end());
    for (const auto& [idx, val] : v.entries) {
        if (idx >= dimension) throw InternalError("sparse index out of range");
        if (!std::isfinite(val)) throw InternalError("non-finite feature value");
    }
    return v;
}

FeatureVector FeatureVector::dense(std::vector<double> values) {
    FeatureVector v;
    v.kind = Kind::dense;
    v.dimension = values.size();
    v.values = std::move(values);
    return v;
}

double FeatureVector::at(std::size_t i) const {
    if (kind == Kind::dense) return i < values.size() ? values[i] : 0.0;
    auto it = std::lower_bound(entries.begin(), entries.end(),
                               std::make_pair(static_cast<std::uint32_t>(i), 0.0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != entries.end() && it->first == i) return it->second;
    return 0.0;
}

double FeatureVector::dot(const std::vector<double>& w) const {
    double sum = 0.0;
    if (kind == Kind::dense) {
        for (std::size_t i = 0; i < values.size(); ++i) sum += values[i] * w[i];
    } else {
        for (const auto& [idx, val] : entries) sum += val * w[idx];
    }
    return sum;
}

double FeatureVector::l2_norm() const {
    double sq = 0.0;
    if (kind == Kind::dense) {
        for (double v : values) sq += v * v;
    } else {
        for (const auto& [idx, val] : entries) {
            (void)idx;
            sq += val * val;
        }
    }
    return std::sqrt(sq);
}

void FeatureVector::l2_normalize() {
    double norm = l2_norm();
    if (norm == 0.0) return;
    if (kind == Kind::dense) {
        for (double& v : values) v /= norm;
    } else {
        for (auto& [idx, val] : entries) {
            (void)idx;
            val /= norm;
        }
    }
}

std::vector<double> FeatureVector::to_dense() const {
    if (kind == Kind::dense) return values;
    std::vector<double> out(dimension, 0.0);
    for (const auto& [idx, val] : entries) out[idx] = val;
    return out;
}

std::size_t FeatureVector::nonzero_count() const {
    if (kind == Kind::sparse) return entries.size();
    std::size_t n = 0;
    for (double v : values)
        if (v != 0.0) ++n;
    return n;
}

bool FeatureVector::operator==(const FeatureVector& other) const {
    return kind == other.kind && dimension == other.dimension && entries == other.entries &&
           values == other.values;
}

}  // namespace ttpc
