#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ttpc/feature.hpp"

namespace ttpc {

// Supervised learners used as the base estimators of the multi-label
// transforms.  Every fit is deterministic: refitting with the same inputs and
// the same seed produces bit-identical models.  All fits run single-threaded;
// fitted models are immutable value types safe to share across threads.

enum class ClassifierKind {
    multinomial_nb,
    complement_nb,
    gaussian_nb,
    svc_rbf,
    linear_svc,   // batch subgradient solver
    sgd_hinge,    // stochastic subgradient solver
    dummy_most_frequent,
};

std::string to_string(ClassifierKind kind);
// Throws UsageError on an unknown name.
ClassifierKind classifier_kind_from_string(const std::string& name);
// All seven kinds, in declaration order (the order grid enumeration uses).
const std::vector<ClassifierKind>& all_classifier_kinds();

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::dummy_most_frequent;

    // Naive Bayes
    double alpha = 1.0;           // Lidstone smoothing (multinomial / complement)
    double var_smoothing = 1e-9;  // Gaussian variance floor factor

    // SVMs
    double C = 1.0;
    double gamma = 0.0;  // RBF width; 0 means "auto" = 1 / n_features

    // SGD schedule: eta_t = eta0 / (1 + t * decay), t counted over samples
    std::size_t epochs = 20;
    double eta0 = 0.1;
    double decay = 1e-3;
    std::uint64_t seed = 0;  // epoch shuffle seed for the SGD solver

    // Throws UsageError describing the first out-of-range hyperparameter.
    void validate() const;
};

// --- Fitted models ---------------------------------------------------------
//
// `classes` is always the sorted (lexicographic) list of distinct training
// labels.  Prediction ties resolve to the earliest class in that order.

struct FittedDummy {
    std::vector<std::string> classes;
    std::vector<double> frequency;  // per class, training share in [0, 1]
};

struct FittedMultinomialNB {
    std::vector<std::string> classes;
    std::vector<double> log_prior;
    std::vector<std::vector<double>> feature_log_prob;  // [class][feature]
};

struct FittedComplementNB {
    std::vector<std::string> classes;
    std::vector<double> log_prior;  // used only to break score ties
    std::vector<std::vector<double>> weight;  // L2-normalised complement weights
};

struct FittedGaussianNB {
    std::vector<std::string> classes;
    std::vector<double> log_prior;
    std::vector<std::vector<double>> theta;     // per-class feature means
    std::vector<std::vector<double>> variance;  // floored population variances
};

struct FittedLinearSVM {
    std::vector<std::string> classes;  // exactly two; classes[1] is the +1 side
    std::vector<double> w;
    double b = 0.0;
    std::size_t iterations = 0;
    double objective = 0.0;  // primal value 0.5*||w||^2 + C * sum hinge
};

struct FittedSvcRbf {
    std::vector<std::string> classes;  // exactly two; classes[1] is the +1 side
    double gamma = 0.0;
    std::vector<std::vector<double>> support_vectors;  // dense rows
    std::vector<double> dual_coef;                     // alpha_i * y_i per row
    double bias = 0.0;
};

using FittedModel = std::variant<FittedDummy, FittedMultinomialNB,
                                 FittedComplementNB, FittedGaussianNB,
                                 FittedLinearSVM, FittedSvcRbf>;

// A fitted classifier plus the (resolved) configuration that produced it.
// `config.gamma` holds the value actually used, never the 0 sentinel.
class FittedClassifier {
  public:
    FittedClassifier(ClassifierConfig config, FittedModel model);

    const ClassifierConfig& config() const { return config_; }
    const FittedModel& model() const { return model_; }

    // Sorted class labels of the training data (one entry when the training
    // labels were constant; such fits predict that class unconditionally).
    const std::vector<std::string>& classes() const;
    std::size_t dimension() const;  // expected feature count (0 = any, dummy)

    // Per-class unnormalised scores, aligned with classes().  Larger is
    // better.  NB families report log-joint scores, SVMs report the signed
    // decision value mirrored onto both classes, the dummy reports training
    // frequencies.
    std::vector<double> scores(const FeatureVector& x) const;

    // Argmax of scores() with the documented tie rules.
    std::string predict(const FeatureVector& x) const;

    // Signed margin toward classes()[1]; requires exactly two classes
    // (throws InternalError otherwise).  Zero is resolved by predict() to
    // classes()[0].
    double decision_value(const FeatureVector& x) const;

  private:
    ClassifierConfig config_;
    FittedModel model_;
};

// Fits `config.kind` on (X, y).  X rows may mix sparse and dense encodings
// but must agree on dimension.  Throws DataError for empty or ragged input,
// IncompatibleConfigError when a count-based Naive Bayes meets negative
// feature values (e.g. embedding vectors), and UsageError for bad
// hyperparameters.  Training labels with a single distinct value yield a
// constant classifier for every kind.
FittedClassifier fit_classifier(const ClassifierConfig& config,
                                const std::vector<FeatureVector>& X,
                                const std::vector<std::string>& y);

// --- Direct per-kind fits (the dispatcher above is the usual entry) --------

FittedDummy fit_dummy(const std::vector<std::string>& y);

FittedMultinomialNB fit_multinomial_nb(const std::vector<FeatureVector>& X,
                                       const std::vector<std::string>& y,
                                       double alpha);

FittedComplementNB fit_complement_nb(const std::vector<FeatureVector>& X,
                                     const std::vector<std::string>& y,
                                     double alpha);

FittedGaussianNB fit_gaussian_nb(const std::vector<FeatureVector>& X,
                                 const std::vector<std::string>& y,
                                 double var_smoothing);

// Deterministic batch solver: subgradient descent with a backtracking line
// search that only ever accepts strict decreases of the true primal
// objective, so the objective trace is monotone.  `objective_trace`, when
// non-null, receives the objective value after every accepted iteration.
FittedLinearSVM fit_linear_svm_batch(const std::vector<FeatureVector>& X,
                                     const std::vector<std::string>& y,
                                     double C,
                                     std::vector<double>* objective_trace = nullptr);

// Stochastic solver: per-sample hinge subgradient steps with learning rate
// eta0 / (1 + t * decay) and a seeded per-epoch shuffle.
FittedLinearSVM fit_linear_svm_sgd(const std::vector<FeatureVector>& X,
                                   const std::vector<std::string>& y, double C,
                                   std::size_t epochs, double eta0, double decay,
                                   std::uint64_t seed);

// Sequential minimal optimisation for the RBF-kernel SVM, run to a KKT
// tolerance of 1e-3 with deterministic working-set selection.
FittedSvcRbf fit_svc_rbf(const std::vector<FeatureVector>& X,
                         const std::vector<std::string>& y, double C,
                         double gamma);

}  // namespace ttpc
