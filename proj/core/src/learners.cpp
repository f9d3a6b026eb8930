#include "ttpc/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "ttpc/errors.hpp"
#include "learners_detail.hpp"

namespace ttpc {

namespace detail {

LabelIndex index_labels(const std::vector<std::string>& y) {
    if (y.empty()) {
        throw DataError("cannot fit a classifier on an empty label vector");
    }
    std::map<std::string, std::size_t> order;
    for (const auto& label : y) order.emplace(label, 0);
    LabelIndex out;
    out.classes.reserve(order.size());
    for (auto& [label, idx] : order) {
        idx = out.classes.size();
        out.classes.push_back(label);
    }
    out.counts.assign(out.classes.size(), 0);
    out.y_index.reserve(y.size());
    for (const auto& label : y) {
        std::size_t idx = order.at(label);
        out.y_index.push_back(idx);
        ++out.counts[idx];
    }
    return out;
}

std::size_t check_design_matrix(const std::vector<FeatureVector>& X,
                                const std::vector<std::string>& y) {
    if (X.empty()) {
        throw DataError("cannot fit a classifier on an empty feature matrix");
    }
    if (X.size() != y.size()) {
        std::ostringstream msg;
        msg << "feature matrix has " << X.size() << " rows but " << y.size()
            << " labels";
        throw DataError(msg.str());
    }
    std::size_t dim = X.front().dimension;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].dimension != dim) {
            std::ostringstream msg;
            msg << "row " << i << " has dimension " << X[i].dimension
                << ", expected " << dim;
            throw DataError(msg.str());
        }
        const bool sparse = X[i].kind == FeatureVector::Kind::sparse;
        if (sparse) {
            for (const auto& [idx, value] : X[i].entries) {
                if (!std::isfinite(value)) {
                    std::ostringstream msg;
                    msg << "row " << i << " feature " << idx << " is not finite";
                    throw DataError(msg.str());
                }
            }
        } else {
            for (std::size_t j = 0; j < X[i].values.size(); ++j) {
                if (!std::isfinite(X[i].values[j])) {
                    std::ostringstream msg;
                    msg << "row " << i << " feature " << j << " is not finite";
                    throw DataError(msg.str());
                }
            }
        }
    }
    if (dim == 0) {
        throw DataError("feature matrix has dimension 0");
    }
    return dim;
}

void require_nonnegative(const std::vector<FeatureVector>& X,
                         const std::string& kind_name) {
    for (std::size_t i = 0; i < X.size(); ++i) {
        const bool sparse = X[i].kind == FeatureVector::Kind::sparse;
        const auto fail = [&](std::size_t feature, double value) {
            std::ostringstream msg;
            msg << kind_name << " requires non-negative features (counts or "
                << "tf-idf weights), but row " << i << " feature " << feature
                << " is " << value << "; embedding vectors are not compatible "
                << "with this classifier";
            throw IncompatibleConfigError(msg.str());
        };
        if (sparse) {
            for (const auto& [idx, value] : X[i].entries) {
                if (value < 0.0) fail(idx, value);
            }
        } else {
            for (std::size_t j = 0; j < X[i].values.size(); ++j) {
                if (X[i].values[j] < 0.0) fail(j, X[i].values[j]);
            }
        }
    }
}

std::vector<double> signed_targets(const LabelIndex& index) {
    std::vector<double> y;
    y.reserve(index.y_index.size());
    for (std::size_t c : index.y_index) y.push_back(c == 0 ? -1.0 : 1.0);
    return y;
}

}  // namespace detail

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::multinomial_nb: return "multinomial_nb";
        case ClassifierKind::complement_nb: return "complement_nb";
        case ClassifierKind::gaussian_nb: return "gaussian_nb";
        case ClassifierKind::svc_rbf: return "svc_rbf";
        case ClassifierKind::linear_svc: return "linear_svc";
        case ClassifierKind::sgd_hinge: return "sgd_hinge";
        case ClassifierKind::dummy_most_frequent: return "dummy_most_frequent";
    }
    throw InternalError("unhandled ClassifierKind");
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    for (ClassifierKind kind : all_classifier_kinds()) {
        if (to_string(kind) == name) return kind;
    }
    throw UsageError("unknown classifier '" + name +
                     "' (expected one of: multinomial_nb, complement_nb, "
                     "gaussian_nb, svc_rbf, linear_svc, sgd_hinge, "
                     "dummy_most_frequent)");
}

const std::vector<ClassifierKind>& all_classifier_kinds() {
    static const std::vector<ClassifierKind> kinds = {
        ClassifierKind::multinomial_nb,  ClassifierKind::complement_nb,
        ClassifierKind::gaussian_nb,     ClassifierKind::svc_rbf,
        ClassifierKind::linear_svc,      ClassifierKind::sgd_hinge,
        ClassifierKind::dummy_most_frequent,
    };
    return kinds;
}

void ClassifierConfig::validate() const {
    const auto bad = [](const std::string& what) {
        throw UsageError("invalid classifier configuration: " + what);
    };
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        bad("alpha must be a positive finite number");
    }
    if (!std::isfinite(var_smoothing) || var_smoothing <= 0.0) {
        bad("var_smoothing must be a positive finite number");
    }
    if (!std::isfinite(C) || C <= 0.0) {
        bad("C must be a positive finite number");
    }
    if (!std::isfinite(gamma) || gamma < 0.0) {
        bad("gamma must be positive, or 0 to use 1 / n_features");
    }
    if (epochs < 1) {
        bad("epochs must be at least 1");
    }
    if (!std::isfinite(eta0) || eta0 <= 0.0) {
        bad("eta0 must be a positive finite number");
    }
    if (!std::isfinite(decay) || decay < 0.0) {
        bad("decay must be non-negative and finite");
    }
}

FittedDummy fit_dummy(const std::vector<std::string>& y) {
    detail::LabelIndex index = detail::index_labels(y);
    FittedDummy fitted;
    fitted.classes = std::move(index.classes);
    fitted.frequency.reserve(index.counts.size());
    for (std::size_t count : index.counts) {
        fitted.frequency.push_back(static_cast<double>(count) /
                                   static_cast<double>(y.size()));
    }
    return fitted;
}

FittedClassifier::FittedClassifier(ClassifierConfig config, FittedModel model)
    : config_(config), model_(std::move(model)) {}

const std::vector<std::string>& FittedClassifier::classes() const {
    return std::visit([](const auto& m) -> const std::vector<std::string>& {
        return m.classes;
    }, model_);
}

namespace {

std::size_t model_dimension(const FittedModel& model) {
    struct Visitor {
        std::size_t operator()(const FittedDummy&) const { return 0; }
        std::size_t operator()(const FittedMultinomialNB& m) const {
            return m.feature_log_prob.empty() ? 0 : m.feature_log_prob.front().size();
        }
        std::size_t operator()(const FittedComplementNB& m) const {
            return m.weight.empty() ? 0 : m.weight.front().size();
        }
        std::size_t operator()(const FittedGaussianNB& m) const {
            return m.theta.empty() ? 0 : m.theta.front().size();
        }
        std::size_t operator()(const FittedLinearSVM& m) const { return m.w.size(); }
        std::size_t operator()(const FittedSvcRbf& m) const {
            return m.support_vectors.empty() ? 0 : m.support_vectors.front().size();
        }
    };
    return std::visit(Visitor{}, model);
}

void check_dimension(const FittedModel& model, const FeatureVector& x) {
    std::size_t expected = model_dimension(model);
    if (expected != 0 && x.dimension != expected) {
        std::ostringstream msg;
        msg << "feature vector has dimension " << x.dimension
            << " but the model was fitted with " << expected;
        throw DataError(msg.str());
    }
}

// Sum of x[t] * row[t]; exact for sparse x because absent entries are zero.
double weighted_sum(const FeatureVector& x, const std::vector<double>& row) {
    return x.dot(row);
}

double linear_decision(const FittedLinearSVM& m, const FeatureVector& x) {
    return x.dot(m.w) + m.b;
}

double rbf_decision(const FittedSvcRbf& m, const FeatureVector& x) {
    std::vector<double> dense = x.to_dense();
    double sum = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        const std::vector<double>& sv = m.support_vectors[i];
        double sq = 0.0;
        for (std::size_t j = 0; j < sv.size(); ++j) {
            double d = dense[j] - sv[j];
            sq += d * d;
        }
        sum += m.dual_coef[i] * std::exp(-m.gamma * sq);
    }
    return sum;
}

std::vector<double> model_scores(const FittedModel& model, const FeatureVector& x) {
    struct Visitor {
        const FeatureVector& x;
        std::vector<double> operator()(const FittedDummy& m) const {
            return m.frequency;
        }
        std::vector<double> operator()(const FittedMultinomialNB& m) const {
            std::vector<double> scores(m.classes.size());
            for (std::size_t c = 0; c < scores.size(); ++c) {
                scores[c] = m.log_prior[c] + weighted_sum(x, m.feature_log_prob[c]);
            }
            return scores;
        }
        std::vector<double> operator()(const FittedComplementNB& m) const {
            std::vector<double> scores(m.classes.size());
            for (std::size_t c = 0; c < scores.size(); ++c) {
                scores[c] = weighted_sum(x, m.weight[c]);
            }
            return scores;
        }
        std::vector<double> operator()(const FittedGaussianNB& m) const {
            static const double kLog2Pi = std::log(2.0 * 3.14159265358979323846);
            std::vector<double> dense = x.to_dense();
            std::vector<double> scores(m.classes.size());
            for (std::size_t c = 0; c < scores.size(); ++c) {
                double s = m.log_prior[c];
                for (std::size_t j = 0; j < dense.size(); ++j) {
                    double var = m.variance[c][j];
                    double diff = dense[j] - m.theta[c][j];
                    s -= 0.5 * (kLog2Pi + std::log(var)) + diff * diff / (2.0 * var);
                }
                scores[c] = s;
            }
            return scores;
        }
        std::vector<double> operator()(const FittedLinearSVM& m) const {
            double d = linear_decision(m, x);
            return {-d, d};
        }
        std::vector<double> operator()(const FittedSvcRbf& m) const {
            double d = rbf_decision(m, x);
            return {-d, d};
        }
    };
    return std::visit(Visitor{x}, model);
}

}  // namespace

std::size_t FittedClassifier::dimension() const { return model_dimension(model_); }

std::vector<double> FittedClassifier::scores(const FeatureVector& x) const {
    check_dimension(model_, x);
    if (x.kind == FeatureVector::Kind::sparse) {
        for (const auto& [idx, value] : x.entries) {
            if (!std::isfinite(value)) {
                throw DataError("feature vector contains a non-finite value");
            }
            (void)idx;
        }
    } else {
        for (double value : x.values) {
            if (!std::isfinite(value)) {
                throw DataError("feature vector contains a non-finite value");
            }
        }
    }
    return model_scores(model_, x);
}

std::string FittedClassifier::predict(const FeatureVector& x) const {
    const std::vector<std::string>& labels = classes();
    if (labels.size() == 1) return labels.front();
    std::vector<double> s = scores(x);
    std::size_t best = 0;
    if (const auto* cnb = std::get_if<FittedComplementNB>(&model_)) {
        // Exact score ties fall back to the larger prior, then class order.
        for (std::size_t c = 1; c < s.size(); ++c) {
            if (s[c] > s[best] ||
                (s[c] == s[best] && cnb->log_prior[c] > cnb->log_prior[best])) {
                best = c;
            }
        }
    } else {
        for (std::size_t c = 1; c < s.size(); ++c) {
            if (s[c] > s[best]) best = c;
        }
    }
    return labels[best];
}

double FittedClassifier::decision_value(const FeatureVector& x) const {
    if (classes().size() != 2) {
        throw InternalError(
            "decision_value requires a binary fit; this model has " +
            std::to_string(classes().size()) + " class(es)");
    }
    if (const auto* svm = std::get_if<FittedLinearSVM>(&model_)) {
        check_dimension(model_, x);
        return linear_decision(*svm, x);
    }
    if (const auto* rbf = std::get_if<FittedSvcRbf>(&model_)) {
        check_dimension(model_, x);
        return rbf_decision(*rbf, x);
    }
    std::vector<double> s = scores(x);
    return s[1] - s[0];
}

FittedClassifier fit_classifier(const ClassifierConfig& config,
                                const std::vector<FeatureVector>& X,
                                const std::vector<std::string>& y) {
    config.validate();
    std::size_t dim = detail::check_design_matrix(X, y);
    ClassifierConfig resolved = config;
    if (resolved.gamma == 0.0) {
        resolved.gamma = 1.0 / static_cast<double>(dim);
    }

    // Count-based Naive Bayes rejects negative features regardless of how
    // many distinct labels the fold happens to contain.
    if (config.kind == ClassifierKind::multinomial_nb ||
        config.kind == ClassifierKind::complement_nb) {
        detail::require_nonnegative(X, to_string(config.kind));
    }

    detail::LabelIndex index = detail::index_labels(y);
    if (index.classes.size() == 1) {
        // Constant training labels: every kind degenerates to a constant
        // classifier that always answers the one observed class.
        return FittedClassifier(resolved, fit_dummy(y));
    }

    switch (config.kind) {
        case ClassifierKind::dummy_most_frequent:
            return FittedClassifier(resolved, fit_dummy(y));
        case ClassifierKind::multinomial_nb:
            return FittedClassifier(resolved, fit_multinomial_nb(X, y, resolved.alpha));
        case ClassifierKind::complement_nb:
            return FittedClassifier(resolved, fit_complement_nb(X, y, resolved.alpha));
        case ClassifierKind::gaussian_nb:
            return FittedClassifier(resolved,
                                    fit_gaussian_nb(X, y, resolved.var_smoothing));
        case ClassifierKind::linear_svc: {
            if (index.classes.size() != 2) {
                throw DataError("linear_svc requires exactly two classes, got " +
                                std::to_string(index.classes.size()));
            }
            return FittedClassifier(resolved, fit_linear_svm_batch(X, y, resolved.C));
        }
        case ClassifierKind::sgd_hinge: {
            if (index.classes.size() != 2) {
                throw DataError("sgd_hinge requires exactly two classes, got " +
                                std::to_string(index.classes.size()));
            }
            return FittedClassifier(
                resolved, fit_linear_svm_sgd(X, y, resolved.C, resolved.epochs,
                                             resolved.eta0, resolved.decay,
                                             resolved.seed));
        }
        case ClassifierKind::svc_rbf: {
            if (index.classes.size() != 2) {
                throw DataError("svc_rbf requires exactly two classes, got " +
                                std::to_string(index.classes.size()));
            }
            return FittedClassifier(resolved,
                                    fit_svc_rbf(X, y, resolved.C, resolved.gamma));
        }
    }
    throw InternalError("unhandled ClassifierKind in fit_classifier");
}

}  // namespace ttpc
