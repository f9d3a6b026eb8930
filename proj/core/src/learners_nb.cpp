#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ttpc/errors.hpp"
#include "ttpc/learners.hpp"
#include "learners_detail.hpp"

namespace ttpc {

namespace {

// Per-class feature sums and totals, accumulated in sample order.
struct ClassCounts {
    std::vector<std::vector<double>> feature;  // [class][feature]
    std::vector<double> total;                 // [class]
};

ClassCounts accumulate_counts(const std::vector<FeatureVector>& X,
                              const detail::LabelIndex& index, std::size_t dim) {
    ClassCounts counts;
    counts.feature.assign(index.classes.size(), std::vector<double>(dim, 0.0));
    counts.total.assign(index.classes.size(), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        std::size_t c = index.y_index[i];
        if (X[i].kind == FeatureVector::Kind::sparse) {
            for (const auto& [idx, value] : X[i].entries) {
                counts.feature[c][idx] += value;
                counts.total[c] += value;
            }
        } else {
            for (std::size_t j = 0; j < X[i].values.size(); ++j) {
                counts.feature[c][j] += X[i].values[j];
                counts.total[c] += X[i].values[j];
            }
        }
    }
    return counts;
}

std::vector<double> log_priors(const detail::LabelIndex& index) {
    std::vector<double> priors;
    priors.reserve(index.counts.size());
    const double n = static_cast<double>(index.y_index.size());
    for (std::size_t count : index.counts) {
        priors.push_back(std::log(static_cast<double>(count) / n));
    }
    return priors;
}

}  // namespace

FittedMultinomialNB fit_multinomial_nb(const std::vector<FeatureVector>& X,
                                       const std::vector<std::string>& y,
                                       double alpha) {
    std::size_t dim = detail::check_design_matrix(X, y);
    detail::require_nonnegative(X, "multinomial_nb");
    detail::LabelIndex index = detail::index_labels(y);
    ClassCounts counts = accumulate_counts(X, index, dim);

    FittedMultinomialNB fitted;
    fitted.classes = index.classes;
    fitted.log_prior = log_priors(index);
    fitted.feature_log_prob.assign(index.classes.size(),
                                   std::vector<double>(dim, 0.0));
    const double d = static_cast<double>(dim);
    for (std::size_t c = 0; c < index.classes.size(); ++c) {
        double denom = std::log(counts.total[c] + alpha * d);
        for (std::size_t t = 0; t < dim; ++t) {
            fitted.feature_log_prob[c][t] =
                std::log(counts.feature[c][t] + alpha) - denom;
        }
    }
    return fitted;
}

FittedComplementNB fit_complement_nb(const std::vector<FeatureVector>& X,
                                     const std::vector<std::string>& y,
                                     double alpha) {
    std::size_t dim = detail::check_design_matrix(X, y);
    detail::require_nonnegative(X, "complement_nb");
    detail::LabelIndex index = detail::index_labels(y);
    ClassCounts counts = accumulate_counts(X, index, dim);

    std::vector<double> all_features(dim, 0.0);
    double all_total = 0.0;
    for (std::size_t c = 0; c < index.classes.size(); ++c) {
        for (std::size_t t = 0; t < dim; ++t) all_features[t] += counts.feature[c][t];
        all_total += counts.total[c];
    }

    FittedComplementNB fitted;
    fitted.classes = index.classes;
    fitted.log_prior = log_priors(index);
    fitted.weight.assign(index.classes.size(), std::vector<double>(dim, 0.0));
    const double d = static_cast<double>(dim);
    for (std::size_t c = 0; c < index.classes.size(); ++c) {
        double comp_total = all_total - counts.total[c];
        double denom = std::log(comp_total + alpha * d);
        double norm_sq = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            double wt = -(std::log(all_features[t] - counts.feature[c][t] + alpha) -
                          denom);
            fitted.weight[c][t] = wt;
            norm_sq += wt * wt;
        }
        double norm = std::sqrt(norm_sq);
        if (norm > 0.0) {
            for (std::size_t t = 0; t < dim; ++t) fitted.weight[c][t] /= norm;
        }
    }
    return fitted;
}

FittedGaussianNB fit_gaussian_nb(const std::vector<FeatureVector>& X,
                                 const std::vector<std::string>& y,
                                 double var_smoothing) {
    std::size_t dim = detail::check_design_matrix(X, y);
    detail::LabelIndex index = detail::index_labels(y);
    const std::size_t n_classes = index.classes.size();
    const std::size_t n = X.size();

    std::vector<std::vector<double>> dense;
    dense.reserve(n);
    for (const FeatureVector& row : X) dense.push_back(row.to_dense());

    FittedGaussianNB fitted;
    fitted.classes = index.classes;
    fitted.log_prior = log_priors(index);
    fitted.theta.assign(n_classes, std::vector<double>(dim, 0.0));
    fitted.variance.assign(n_classes, std::vector<double>(dim, 0.0));

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = index.y_index[i];
        for (std::size_t j = 0; j < dim; ++j) fitted.theta[c][j] += dense[i][j];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t j = 0; j < dim; ++j) {
            fitted.theta[c][j] /= static_cast<double>(index.counts[c]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = index.y_index[i];
        for (std::size_t j = 0; j < dim; ++j) {
            double diff = dense[i][j] - fitted.theta[c][j];
            fitted.variance[c][j] += diff * diff;
        }
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t j = 0; j < dim; ++j) {
            fitted.variance[c][j] /= static_cast<double>(index.counts[c]);
        }
    }

    // Floor every variance at var_smoothing times the largest per-feature
    // variance of the full training matrix (the plain factor when the data
    // has no variance at all), so degenerate classes stay usable.
    double max_variance = 0.0;
    {
        std::vector<double> mean(dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) mean[j] += dense[i][j];
        }
        for (std::size_t j = 0; j < dim; ++j) mean[j] /= static_cast<double>(n);
        std::vector<double> var(dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                double diff = dense[i][j] - mean[j];
                var[j] += diff * diff;
            }
        }
        for (std::size_t j = 0; j < dim; ++j) {
            max_variance = std::max(max_variance, var[j] / static_cast<double>(n));
        }
    }
    const double floor =
        max_variance > 0.0 ? var_smoothing * max_variance : var_smoothing;
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t j = 0; j < dim; ++j) {
            fitted.variance[c][j] = std::max(fitted.variance[c][j], floor);
        }
    }
    return fitted;
}

}  // namespace ttpc
