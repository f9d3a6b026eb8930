// Linear SVM solvers (batch and stochastic) and the RBF-kernel SMO.
// The batch accuracy bound uses the analytic optimum of the separable
// fixture: the margin-maximising separator w=(2/3,0), b=-1 puts all four
// points at margin exactly 1, and a subgradient certificate (multipliers
// 1/9 on each point) proves J* = 0.5 * ||w||^2 = 2/9.

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "ttpc/errors.hpp"
#include "ttpc/feature.hpp"
#include "ttpc/learners.hpp"

using namespace ttpc;

namespace {

constexpr double kFixtureOptimum = 2.0 / 9.0;

struct SeparableFixture {
    std::vector<FeatureVector> X = {
        FeatureVector::dense({0.0, 0.0}),
        FeatureVector::dense({0.0, 1.0}),
        FeatureVector::dense({3.0, 0.0}),
        FeatureVector::dense({3.0, 1.0}),
    };
    std::vector<std::string> y = {"neg", "neg", "pos", "pos"};
};

struct XorFixture {
    std::vector<FeatureVector> X = {
        FeatureVector::dense({0.0, 0.0}),
        FeatureVector::dense({1.0, 1.0}),
        FeatureVector::dense({0.0, 1.0}),
        FeatureVector::dense({1.0, 0.0}),
    };
    std::vector<std::string> y = {"pos", "pos", "neg", "neg"};
};

std::size_t training_errors(const FittedClassifier& fc,
                            const std::vector<FeatureVector>& X,
                            const std::vector<std::string>& y) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (fc.predict(X[i]) != y[i]) ++errors;
    }
    return errors;
}

ClassifierConfig config_for(ClassifierKind kind) {
    ClassifierConfig config;
    config.kind = kind;
    return config;
}

}  // namespace

TEST_CASE("batch solver reaches the analytic optimum on the separable fixture") {
    SeparableFixture fx;
    std::vector<double> trace;
    FittedLinearSVM fitted = fit_linear_svm_batch(fx.X, fx.y, 1.0, &trace);

    // Within 1e-3 relative of the analytic optimum, and never below it
    // (the solver only ever evaluates feasible points).
    CHECK(fitted.objective <= kFixtureOptimum * (1.0 + 1e-3));
    CHECK(fitted.objective >= kFixtureOptimum - 1e-9);

    // The committed objective trace decreases strictly monotonically.
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i] < trace[i - 1]);
    }

    FittedClassifier fc(config_for(ClassifierKind::linear_svc), fitted);
    CHECK(training_errors(fc, fx.X, fx.y) == 0);
    CHECK(fc.predict(FeatureVector::dense({2.9, 0.5})) == "pos");
    CHECK(fc.decision_value(FeatureVector::dense({2.9, 0.5})) > 0.0);
}

TEST_CASE("batch solver objective scales with the calibrated problem") {
    SeparableFixture fx;
    const double s = 10.0;
    std::vector<FeatureVector> scaled;
    for (const FeatureVector& row : fx.X) {
        std::vector<double> values = row.to_dense();
        for (double& v : values) v *= s;
        scaled.push_back(FeatureVector::dense(values));
    }
    FittedLinearSVM fitted =
        fit_linear_svm_batch(scaled, fx.y, 1.0 / (s * s));
    const double expected = kFixtureOptimum / (s * s);
    CHECK(std::abs(fitted.objective - expected) <= expected * 1e-3);

    // Predicted signs on the (scaled) fixture match the original problem.
    FittedClassifier fc(config_for(ClassifierKind::linear_svc), fitted);
    CHECK(training_errors(fc, scaled, fx.y) == 0);
}

TEST_CASE("batch refits are bit-stable and reject degenerate label sets") {
    SeparableFixture fx;
    FittedLinearSVM a = fit_linear_svm_batch(fx.X, fx.y, 1.0);
    FittedLinearSVM b = fit_linear_svm_batch(fx.X, fx.y, 1.0);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);
    CHECK(a.objective == b.objective);

    CHECK_THROWS_AS(
        fit_linear_svm_batch(fx.X, {"one", "one", "one", "one"}, 1.0),
        DataError);
}

TEST_CASE("stochastic solver separates the fixture with default settings") {
    SeparableFixture fx;
    ClassifierConfig config = config_for(ClassifierKind::sgd_hinge);
    config.seed = 1;
    FittedClassifier fc = fit_classifier(config, fx.X, fx.y);
    CHECK(training_errors(fc, fx.X, fx.y) == 0);
    CHECK(fc.predict(FeatureVector::dense({2.9, 0.5})) == "pos");

    const auto& model = std::get<FittedLinearSVM>(fc.model());
    CHECK(std::isfinite(model.objective));
    CHECK(model.iterations == 20 * fx.X.size());  // default epochs, every sample

    // Same seed: bit-identical weights.  Different seed: a different path.
    FittedClassifier again = fit_classifier(config, fx.X, fx.y);
    CHECK(std::get<FittedLinearSVM>(again.model()).w == model.w);
    CHECK(std::get<FittedLinearSVM>(again.model()).b == model.b);

    ClassifierConfig other = config;
    other.seed = 2;
    FittedClassifier different = fit_classifier(other, fx.X, fx.y);
    CHECK(std::get<FittedLinearSVM>(different.model()).w != model.w);
    CHECK(training_errors(different, fx.X, fx.y) == 0);
}

TEST_CASE("stochastic solver reports divergence with diagnostics") {
    SeparableFixture fx;
    try {
        fit_linear_svm_sgd(fx.X, fx.y, 1.0, 20, 1e12, 1e-3, 0);
        FAIL("expected divergence");
    } catch (const InternalError& e) {
        std::string message = e.what();
        CHECK(message.find("diverged") != std::string::npos);
        CHECK(message.find("eta0") != std::string::npos);
    }
}

TEST_CASE("smo solves xor with a valid kkt state") {
    XorFixture fx;
    FittedSvcRbf fitted = fit_svc_rbf(fx.X, fx.y, 10.0, 1.0);
    ClassifierConfig config = config_for(ClassifierKind::svc_rbf);
    config.gamma = 1.0;
    FittedClassifier fc(config, fitted);

    // All four training points classified correctly.
    CHECK(training_errors(fc, fx.X, fx.y) == 0);

    // Duals respect the box, and dual_coef carries the label sign.
    const double C = 10.0;
    REQUIRE(!fitted.dual_coef.empty());
    double coef_sum = 0.0;
    for (double coef : fitted.dual_coef) {
        CHECK(std::abs(coef) <= C + 1e-9);
        CHECK(coef != 0.0);
        coef_sum += coef;
    }
    CHECK(std::abs(coef_sum) < 1e-9);  // equality constraint sum alpha_i y_i = 0

    // KKT conditions at tolerance 1e-3 for every training point.
    const double tol = 1e-3;
    for (std::size_t i = 0; i < fx.X.size(); ++i) {
        double yi = fx.y[i] == "pos" ? 1.0 : -1.0;
        double margin = yi * fc.decision_value(fx.X[i]);
        // Recover this point's alpha from dual_coef if it is a support vector.
        double alpha = 0.0;
        std::vector<double> dense = fx.X[i].to_dense();
        for (std::size_t k = 0; k < fitted.support_vectors.size(); ++k) {
            if (fitted.support_vectors[k] == dense) {
                alpha = std::abs(fitted.dual_coef[k]);
                break;
            }
        }
        if (alpha <= 0.0) {
            CHECK(margin >= 1.0 - tol);
        } else if (alpha >= C) {
            CHECK(margin <= 1.0 + tol);
        } else {
            CHECK(std::abs(margin - 1.0) <= tol);
        }
    }

    // A duplicate of a training point predicts that point's label.
    CHECK(fc.predict(FeatureVector::dense({0.0, 1.0})) == "neg");
    CHECK(fc.predict(FeatureVector::dense({1.0, 1.0})) == "pos");

    // Bit-stable refit.
    FittedSvcRbf again = fit_svc_rbf(fx.X, fx.y, 10.0, 1.0);
    CHECK(again.dual_coef == fitted.dual_coef);
    CHECK(again.bias == fitted.bias);
}

TEST_CASE("xor is not linearly separable") {
    XorFixture fx;
    FittedLinearSVM fitted = fit_linear_svm_batch(fx.X, fx.y, 10.0);
    FittedClassifier fc(config_for(ClassifierKind::linear_svc), fitted);
    CHECK(training_errors(fc, fx.X, fx.y) >= 1);
}

TEST_CASE("linear decision values agree between sparse and dense queries") {
    SeparableFixture fx;
    FittedLinearSVM fitted = fit_linear_svm_batch(fx.X, fx.y, 1.0);
    FittedClassifier fc(config_for(ClassifierKind::linear_svc), fitted);
    FeatureVector sparse_q = FeatureVector::sparse(2, {{0, 3.0}, {1, 1.0}});
    FeatureVector dense_q = FeatureVector::dense({3.0, 1.0});
    CHECK(std::abs(fc.decision_value(sparse_q) - fc.decision_value(dense_q)) <
          1e-9);

    // Fitting from sparse rows matches fitting from dense rows.
    std::vector<FeatureVector> sparse_X = {
        FeatureVector::sparse(2, {}),
        FeatureVector::sparse(2, {{1, 1.0}}),
        FeatureVector::sparse(2, {{0, 3.0}}),
        FeatureVector::sparse(2, {{0, 3.0}, {1, 1.0}}),
    };
    FittedLinearSVM from_sparse = fit_linear_svm_batch(sparse_X, fx.y, 1.0);
    for (std::size_t j = 0; j < fitted.w.size(); ++j) {
        CHECK(std::abs(from_sparse.w[j] - fitted.w[j]) < 1e-9);
    }
    CHECK(std::abs(from_sparse.b - fitted.b) < 1e-9);
}

TEST_CASE("dispatcher resolves auto gamma and keeps xor solvable") {
    XorFixture fx;
    ClassifierConfig config = config_for(ClassifierKind::svc_rbf);
    config.gamma = 0.0;  // auto
    FittedClassifier fc = fit_classifier(config, fx.X, fx.y);
    CHECK(fc.config().gamma == 0.5);  // 1 / n_features with d = 2
    CHECK(training_errors(fc, fx.X, fx.y) == 0);
}

TEST_CASE("single-class input yields a constant classifier via the dispatcher") {
    SeparableFixture fx;
    for (ClassifierKind kind : {ClassifierKind::linear_svc,
                                ClassifierKind::sgd_hinge,
                                ClassifierKind::svc_rbf}) {
        FittedClassifier fc = fit_classifier(
            config_for(kind), fx.X, {"same", "same", "same", "same"});
        CHECK(fc.classes() == std::vector<std::string>{"same"});
        CHECK(fc.predict(fx.X[0]) == "same");
        CHECK(fc.predict(FeatureVector::dense({42.0, -7.0})) == "same");
    }
}
