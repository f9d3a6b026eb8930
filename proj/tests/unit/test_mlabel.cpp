#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "ttpc/errors.hpp"
#include "ttpc/mlabel.hpp"

using namespace ttpc;

namespace {

FeatureVector pt(double a, double b) { return FeatureVector::dense({a, b}); }

// Four corners: label L1 marks the right half (x1 >= 1.5), L2 the top half
// (x2 >= 0.5).  Each per-label subproblem is separable with a unique hinge
// optimum that puts every point at margin exactly 1, so a solver within the
// documented objective tolerance must reproduce the training labels.
struct Corners {
    std::vector<FeatureVector> X = {pt(0, 0), pt(0, 1), pt(3, 0), pt(3, 1)};
    LabelMatrix Y = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    LabelSpace space = LabelSpace::create({"L1", "L2"}, LabelSpaceKind::tactics);
    std::vector<std::vector<std::string>> expected = {
        {}, {"L2"}, {"L1"}, {"L1", "L2"}};
};

// Corners with a third label equal to NOT L1, keeping every column
// non-constant so chain members stay real classifiers.
struct Corners3 {
    std::vector<FeatureVector> X = {pt(0, 0), pt(0, 1), pt(3, 0), pt(3, 1)};
    LabelMatrix Y = {{0, 0, 1}, {0, 1, 1}, {1, 0, 0}, {1, 1, 0}};
    LabelSpace space =
        LabelSpace::create({"L1", "L2", "L3"}, LabelSpaceKind::tactics);
};

ClassifierConfig base_of(ClassifierKind kind) {
    ClassifierConfig config;
    config.kind = kind;
    return config;
}

const ClassifierConfig kLinear = base_of(ClassifierKind::linear_svc);

}  // namespace

TEST_CASE("label space sorts its labels and rejects bad input") {
    const LabelSpace space = LabelSpace::create(
        {"TA0011", "TA0001", "TA0005"}, LabelSpaceKind::tactics);
    CHECK(space.labels() ==
          std::vector<std::string>{"TA0001", "TA0005", "TA0011"});
    CHECK(space.size() == 3);
    CHECK(space.kind() == LabelSpaceKind::tactics);
    CHECK(space.index_of("TA0005") == 1);
    CHECK(space.index_of("TA0099") == -1);

    CHECK_THROWS_AS(LabelSpace::create({"T1059", "T1059"},
                                       LabelSpaceKind::techniques),
                    DataError);
    CHECK_THROWS_AS(LabelSpace::create({}, LabelSpaceKind::tactics), DataError);

    CHECK(to_string(LabelSpaceKind::techniques) == "techniques");
    CHECK(label_space_kind_from_string("tactics") == LabelSpaceKind::tactics);
    CHECK_THROWS_AS(label_space_kind_from_string("groups"), UsageError);
}

TEST_CASE("strategy names round-trip") {
    CHECK(all_multilabel_strategies().size() == 3);
    for (MultiLabelStrategy strategy : all_multilabel_strategies()) {
        CHECK(multilabel_strategy_from_string(to_string(strategy)) == strategy);
    }
    CHECK(to_string(MultiLabelStrategy::label_powerset) == "label_powerset");
    CHECK_THROWS_AS(multilabel_strategy_from_string("ranking"), UsageError);
}

TEST_CASE("binary relevance fits one member per label and reproduces "
          "separable training labels") {
    const Corners fx;
    const MultiLabelModel model =
        fit_binary_relevance(fx.X, fx.Y, fx.space, kLinear, 0);

    CHECK(model.strategy() == MultiLabelStrategy::binary_relevance);
    CHECK(model.members().size() == 2);
    CHECK(model.chain_order().empty());
    for (std::size_t i = 0; i < fx.X.size(); ++i) {
        CHECK(model.predict(fx.X[i]) == fx.expected[i]);
    }
    // Held-out points on either side of both boundaries.
    CHECK(model.predict(pt(2.9, 0.9)) ==
          std::vector<std::string>{"L1", "L2"});
    CHECK(model.predict(pt(0.1, 0.1)).empty());
}

TEST_CASE("a label with no positive examples is never predicted") {
    const Corners fx;
    LabelMatrix Y = fx.Y;
    for (auto& row : Y) row.push_back(0);
    const LabelSpace space =
        LabelSpace::create({"L1", "L2", "L3"}, LabelSpaceKind::tactics);

    const MultiLabelModel model = fit_binary_relevance(fx.X, Y, space, kLinear, 0);
    CHECK(model.members().size() == 3);
    CHECK(model.members()[2].classes() == std::vector<std::string>{"0"});

    const std::vector<FeatureVector> probes = {
        fx.X[0], fx.X[1], fx.X[2], fx.X[3], pt(2.9, 0.5), pt(-1, -1)};
    for (const auto& x : probes) {
        const auto predicted = model.predict(x);
        CHECK(std::find(predicted.begin(), predicted.end(), "L3") ==
              predicted.end());
    }
}

TEST_CASE("removing one label leaves the other members' fits bit-identical") {
    const Corners3 fx;
    ClassifierConfig sgd = base_of(ClassifierKind::sgd_hinge);
    sgd.seed = 42;  // overridden per member; kept to show it does not matter

    const MultiLabelModel full =
        fit_binary_relevance(fx.X, fx.Y, fx.space, sgd, 42);
    LabelMatrix Y2;
    for (const auto& row : fx.Y) Y2.push_back({row[0], row[2]});
    const LabelSpace space2 =
        LabelSpace::create({"L1", "L3"}, LabelSpaceKind::tactics);
    const MultiLabelModel reduced =
        fit_binary_relevance(fx.X, Y2, space2, sgd, 42);

    // Member seeds derive from label names, so the shared labels' SGD fits
    // must be bitwise identical, not merely close.
    const std::pair<std::size_t, std::size_t> shared[] = {{0, 0}, {2, 1}};
    for (const auto& [full_idx, reduced_idx] : shared) {
        const auto& a =
            std::get<FittedLinearSVM>(full.members()[full_idx].model());
        const auto& b =
            std::get<FittedLinearSVM>(reduced.members()[reduced_idx].model());
        CHECK(a.w == b.w);
        CHECK(a.b == b.b);
    }
    const std::vector<FeatureVector> probes = {fx.X[0], fx.X[3], pt(2.9, 0.5),
                                               pt(0.4, 0.8)};
    const auto contains = [](const std::vector<std::string>& set,
                             const char* label) {
        return std::find(set.begin(), set.end(), label) != set.end();
    };
    for (const auto& x : probes) {
        const auto full_pred = full.predict(x);
        const auto reduced_pred = reduced.predict(x);
        CHECK(contains(full_pred, "L1") == contains(reduced_pred, "L1"));
        CHECK(contains(full_pred, "L3") == contains(reduced_pred, "L3"));
    }
}

TEST_CASE("classifier chain augments each link with the earlier labels") {
    const Corners3 fx;
    const MultiLabelModel model =
        fit_classifier_chain(fx.X, fx.Y, fx.space, kLinear, 0);

    CHECK(model.strategy() == MultiLabelStrategy::classifier_chain);
    CHECK(model.chain_order() ==
          std::vector<std::string>{"L1", "L2", "L3"});
    REQUIRE(model.members().size() == 3);
    CHECK(model.members()[0].dimension() == 2);
    CHECK(model.members()[1].dimension() == 3);
    CHECK(model.members()[2].dimension() == 4);
}

TEST_CASE("chain over a single label equals binary relevance") {
    const Corners fx;
    LabelMatrix Y1;
    for (const auto& row : fx.Y) Y1.push_back({row[0]});
    const LabelSpace space = LabelSpace::create({"L1"}, LabelSpaceKind::tactics);
    ClassifierConfig sgd = base_of(ClassifierKind::sgd_hinge);

    const MultiLabelModel br = fit_binary_relevance(fx.X, Y1, space, sgd, 7);
    const MultiLabelModel chain = fit_classifier_chain(fx.X, Y1, space, sgd, 7);

    const auto& w_br = std::get<FittedLinearSVM>(br.members()[0].model());
    const auto& w_ch = std::get<FittedLinearSVM>(chain.members()[0].model());
    CHECK(w_br.w == w_ch.w);
    CHECK(w_br.b == w_ch.b);
    for (const auto& x : {fx.X[0], fx.X[1], fx.X[2], fx.X[3], pt(2.9, 0.5),
                          pt(1.4, 0.2)}) {
        CHECK(br.predict(x) == chain.predict(x));
    }
}

TEST_CASE("chain propagates predicted labels to downstream members") {
    // Label B equals label A, so the chain's second member can lean on the
    // augmented column and must agree with the first on every query.
    const std::vector<FeatureVector> X = {pt(0, 0), pt(0, 1), pt(3, 0),
                                          pt(3, 1)};
    const LabelMatrix Y = {{0, 0}, {0, 0}, {1, 1}, {1, 1}};
    const LabelSpace space = LabelSpace::create({"A", "B"}, LabelSpaceKind::tactics);

    const MultiLabelModel model = fit_classifier_chain(X, Y, space, kLinear, 0);
    CHECK(model.members()[1].dimension() == 3);

    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto predicted = model.predict(X[i]);
        if (Y[i][0] != 0) {
            CHECK(predicted == std::vector<std::string>{"A", "B"});
        } else {
            CHECK(predicted.empty());
        }
    }
    CHECK(model.predict(pt(2.9, 0.5)) == std::vector<std::string>{"A", "B"});
    CHECK(model.predict(pt(0.1, 0.5)).empty());
}

TEST_CASE("chain order is validated and honoured") {
    const Corners fx;
    CHECK_THROWS_AS(
        fit_classifier_chain(fx.X, fx.Y, fx.space, kLinear, 0, {"L1"}),
        UsageError);
    CHECK_THROWS_AS(fit_classifier_chain(fx.X, fx.Y, fx.space, kLinear, 0,
                                         {"L1", "L9"}),
                    UsageError);
    CHECK_THROWS_AS(fit_classifier_chain(fx.X, fx.Y, fx.space, kLinear, 0,
                                         {"L1", "L1"}),
                    UsageError);

    const MultiLabelModel model =
        fit_classifier_chain(fx.X, fx.Y, fx.space, kLinear, 0, {"L2", "L1"});
    CHECK(model.chain_order() == std::vector<std::string>{"L2", "L1"});
    CHECK(model.members()[0].dimension() == 2);
    CHECK(model.members()[1].dimension() == 3);
    for (std::size_t i = 0; i < fx.X.size(); ++i) {
        CHECK(model.predict(fx.X[i]) == fx.expected[i]);
    }
}

TEST_CASE("label powerset turns distinct combinations into classes") {
    // Left column always {A}, right column always {A, B}: two combinations.
    const std::vector<FeatureVector> X = {pt(0, 0), pt(0, 1), pt(3, 0),
                                          pt(3, 1)};
    const LabelMatrix Y = {{1, 0}, {1, 0}, {1, 1}, {1, 1}};
    const LabelSpace space = LabelSpace::create({"A", "B"}, LabelSpaceKind::techniques);

    const MultiLabelModel model = fit_label_powerset(X, Y, space, kLinear, 0);
    CHECK(model.strategy() == MultiLabelStrategy::label_powerset);
    REQUIRE(model.combinations() ==
            std::vector<std::vector<std::string>>{{"A"}, {"A", "B"}});
    CHECK(model.members().size() == 2);

    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto predicted = model.predict(X[i]);
        CHECK(predicted == (Y[i][1] != 0
                                ? std::vector<std::string>{"A", "B"}
                                : std::vector<std::string>{"A"}));
    }
    // Closed world: any query, however far from training, maps onto one of
    // the training combinations.
    for (const auto& x : {pt(-50, -50), pt(50, 50), pt(1.5, 0.5), pt(0, 99)}) {
        const auto predicted = model.predict(x);
        const bool known = predicted == std::vector<std::string>{"A"} ||
                           predicted == std::vector<std::string>{"A", "B"};
        CHECK(known);
    }
}

TEST_CASE("label powerset reproduces disjoint clusters and may predict the "
          "empty set") {
    const std::vector<FeatureVector> X = {pt(0, 0),   pt(0.2, 0), pt(5, 5),
                                          pt(5, 4.8), pt(0, 5),   pt(0.2, 5)};
    const LabelMatrix Y = {{0, 0}, {0, 0}, {1, 0}, {1, 0}, {1, 1}, {1, 1}};
    const LabelSpace space = LabelSpace::create({"A", "B"}, LabelSpaceKind::tactics);

    const MultiLabelModel model = fit_label_powerset(X, Y, space, kLinear, 0);
    REQUIRE(model.combinations() ==
            std::vector<std::vector<std::string>>{{}, {"A"}, {"A", "B"}});
    for (std::size_t i = 0; i < X.size(); ++i) {
        std::vector<std::string> expected;
        if (Y[i][0] != 0) expected.push_back("A");
        if (Y[i][1] != 0) expected.push_back("B");
        CHECK(model.predict(X[i]) == expected);
    }
    CHECK(model.predict(pt(0.1, 0.1)).empty());
    CHECK(model.predict(pt(5, 4.9)) == std::vector<std::string>{"A"});
    CHECK(model.predict(pt(0.1, 4.9)) == std::vector<std::string>{"A", "B"});
}

TEST_CASE("label powerset rejects too many combinations") {
    const std::vector<FeatureVector> X = {pt(0, 0), pt(0, 1), pt(3, 0)};
    const LabelMatrix Y = {{0, 0}, {1, 0}, {1, 1}};
    const LabelSpace space = LabelSpace::create({"A", "B"}, LabelSpaceKind::tactics);

    CHECK_NOTHROW(fit_label_powerset(X, Y, space, kLinear, 0, 3));
    try {
        fit_label_powerset(X, Y, space, kLinear, 0, 2);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("3") != std::string::npos);
        CHECK(what.find("binary_relevance") != std::string::npos);
    }
}

TEST_CASE("label powerset with a single combination predicts it constantly") {
    const std::vector<FeatureVector> X = {pt(0, 0), pt(3, 1)};
    const LabelMatrix Y = {{1, 0}, {1, 0}};
    const LabelSpace space = LabelSpace::create({"A", "B"}, LabelSpaceKind::tactics);

    const MultiLabelModel model = fit_label_powerset(X, Y, space, kLinear, 0);
    CHECK(model.members().size() == 1);
    CHECK(model.members()[0].classes() == std::vector<std::string>{"1"});
    for (const auto& x : {pt(9, 9), pt(-9, -9), pt(0, 0)}) {
        CHECK(model.predict(x) == std::vector<std::string>{"A"});
    }
}

TEST_CASE("every strategy is deterministic across refits") {
    const Corners3 fx;
    ClassifierConfig sgd = base_of(ClassifierKind::sgd_hinge);
    const std::vector<FeatureVector> probes = {
        fx.X[0], fx.X[1], fx.X[2], fx.X[3], pt(2.9, 0.5), pt(0.7, 0.7)};

    for (MultiLabelStrategy strategy : all_multilabel_strategies()) {
        const MultiLabelModel first =
            fit_multilabel(strategy, fx.X, fx.Y, fx.space, sgd, 5);
        const MultiLabelModel second =
            fit_multilabel(strategy, fx.X, fx.Y, fx.space, sgd, 5);
        CHECK(first.strategy() == strategy);
        for (const auto& x : probes) {
            CHECK(first.predict(x) == second.predict(x));
        }
    }
}

TEST_CASE("binary relevance scores are the members' signed margins") {
    const Corners fx;
    const MultiLabelModel model =
        fit_binary_relevance(fx.X, fx.Y, fx.space, kLinear, 0);

    for (const auto& x : {fx.X[0], fx.X[3], pt(2.9, 0.9), pt(0.1, 0.1)}) {
        const MultiLabelPrediction pred = model.predict_with_scores(x);
        CHECK(pred.labels == model.predict(x));
        REQUIRE(pred.scores.size() == 2);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(pred.scores[j] == model.members()[j].decision_value(x));
            const bool in = std::find(pred.labels.begin(), pred.labels.end(),
                                      fx.space.labels()[j]) != pred.labels.end();
            CHECK(in == (pred.scores[j] > 0.0));
        }
    }
}

TEST_CASE("constant binary-relevance members score plus or minus infinity") {
    const Corners fx;
    LabelMatrix Y = fx.Y;
    for (auto& row : Y) {
        row.push_back(0);  // L3: never positive
        row.push_back(1);  // L4: always positive
    }
    const LabelSpace space = LabelSpace::create(
        {"L1", "L2", "L3", "L4"}, LabelSpaceKind::tactics);
    const MultiLabelModel model =
        fit_binary_relevance(fx.X, Y, space, kLinear, 0);

    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& x : {pt(0, 0), pt(9, 9), pt(-3, 0.5)}) {
        const MultiLabelPrediction pred = model.predict_with_scores(x);
        CHECK(pred.scores[2] == -inf);
        CHECK(pred.scores[3] == inf);
        CHECK(std::find(pred.labels.begin(), pred.labels.end(), "L3") ==
              pred.labels.end());
        CHECK(std::find(pred.labels.begin(), pred.labels.end(), "L4") !=
              pred.labels.end());
    }
}

TEST_CASE("per-label scores agree in sign with the predicted set for every "
          "strategy") {
    const Corners3 fx;
    const std::vector<FeatureVector> probes = {
        fx.X[0], fx.X[1], fx.X[2], fx.X[3], pt(2.9, 0.5), pt(0.2, 0.9)};

    for (MultiLabelStrategy strategy : all_multilabel_strategies()) {
        const MultiLabelModel model =
            fit_multilabel(strategy, fx.X, fx.Y, fx.space, kLinear, 0);
        for (const auto& x : probes) {
            const MultiLabelPrediction pred = model.predict_with_scores(x);
            CHECK(pred.labels == model.predict(x));
            REQUIRE(pred.scores.size() == fx.space.size());
            for (std::size_t j = 0; j < fx.space.size(); ++j) {
                const bool in =
                    std::find(pred.labels.begin(), pred.labels.end(),
                              fx.space.labels()[j]) != pred.labels.end();
                // Predicted labels carry a non-negative margin, absent
                // labels a non-positive one, under all three strategies.
                if (in) {
                    CHECK(pred.scores[j] >= 0.0);
                } else {
                    CHECK(pred.scores[j] <= 0.0);
                }
            }
        }
    }
}

TEST_CASE("label powerset margins compare the best combination with a label "
          "against the best without it") {
    // Two disjoint clusters: combination {A} around the origin and
    // combination {A, B} around (3, 3).  Label A appears in every training
    // combination, so its margin is +infinity; label B's margin is the
    // finite score gap between the two combination classifiers.
    const std::vector<FeatureVector> X = {pt(0, 0), pt(0.2, 0.1), pt(3, 3),
                                          pt(2.9, 3.1)};
    const LabelMatrix Y = {{1, 0}, {1, 0}, {1, 1}, {1, 1}};
    const LabelSpace space =
        LabelSpace::create({"A", "B"}, LabelSpaceKind::tactics);
    const MultiLabelModel model = fit_label_powerset(X, Y, space, kLinear, 0);
    REQUIRE(model.members().size() == 2);

    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& x : {pt(0, 0), pt(3, 3), pt(-2, -2), pt(5, 5)}) {
        const MultiLabelPrediction pred = model.predict_with_scores(x);
        CHECK(pred.labels == model.predict(x));
        CHECK(pred.scores[0] == inf);
        const bool has_b = pred.labels.size() == 2;
        CHECK(has_b == (pred.scores[1] > 0.0));
        CHECK(std::isfinite(pred.scores[1]));
    }

    // A label seen in no training combination mirrors to -infinity.
    LabelMatrix Y3 = Y;
    for (auto& row : Y3) row.push_back(0);
    const LabelSpace space3 =
        LabelSpace::create({"A", "B", "C"}, LabelSpaceKind::tactics);
    const MultiLabelModel model3 =
        fit_label_powerset(X, Y3, space3, kLinear, 0);
    CHECK(model3.predict_with_scores(pt(0, 0)).scores[2] == -inf);
}

TEST_CASE("label matrix shape and values are validated") {
    const Corners fx;
    LabelMatrix short_Y = {{0, 0}, {0, 1}, {1, 0}};
    CHECK_THROWS_AS(fit_binary_relevance(fx.X, short_Y, fx.space, kLinear, 0),
                    DataError);

    LabelMatrix ragged = fx.Y;
    ragged[2] = {1};
    CHECK_THROWS_AS(fit_classifier_chain(fx.X, ragged, fx.space, kLinear, 0),
                    DataError);

    LabelMatrix bad_value = fx.Y;
    bad_value[1][0] = 2;
    CHECK_THROWS_AS(fit_label_powerset(fx.X, bad_value, fx.space, kLinear, 0),
                    DataError);

    CHECK_THROWS_AS(
        fit_binary_relevance({}, {}, fx.space, kLinear, 0), DataError);
}

TEST_CASE("model parts round-trip and inconsistent shapes are rejected") {
    const Corners fx;
    const std::vector<FeatureVector> probes = {fx.X[0], fx.X[3], pt(2.9, 0.9)};

    const MultiLabelModel br =
        fit_binary_relevance(fx.X, fx.Y, fx.space, kLinear, 3);
    const MultiLabelModel br2 = MultiLabelModel::from_parts(
        br.strategy(), br.label_space(), br.base_config(), br.seed(), {}, {},
        br.members());
    const MultiLabelModel chain =
        fit_classifier_chain(fx.X, fx.Y, fx.space, kLinear, 3, {"L2", "L1"});
    const MultiLabelModel chain2 = MultiLabelModel::from_parts(
        chain.strategy(), chain.label_space(), chain.base_config(),
        chain.seed(), chain.chain_order(), {}, chain.members());
    const MultiLabelModel lp =
        fit_label_powerset(fx.X, fx.Y, fx.space, kLinear, 3);
    const MultiLabelModel lp2 = MultiLabelModel::from_parts(
        lp.strategy(), lp.label_space(), lp.base_config(), lp.seed(), {},
        lp.combinations(), lp.members());
    for (const auto& x : probes) {
        CHECK(br.predict(x) == br2.predict(x));
        CHECK(chain.predict(x) == chain2.predict(x));
        CHECK(lp.predict(x) == lp2.predict(x));
    }

    // Wrong member count for the label space.
    std::vector<FittedClassifier> one_member = {br.members()[0]};
    CHECK_THROWS_AS(MultiLabelModel::from_parts(
                        MultiLabelStrategy::binary_relevance, br.label_space(),
                        br.base_config(), 0, {}, {}, one_member),
                    DataError);
    // Chain without its order.
    CHECK_THROWS_AS(MultiLabelModel::from_parts(
                        MultiLabelStrategy::classifier_chain, br.label_space(),
                        br.base_config(), 0, {}, {}, br.members()),
                    DataError);
    // Powerset combination/member mismatch and unsorted combination.
    CHECK_THROWS_AS(
        MultiLabelModel::from_parts(MultiLabelStrategy::label_powerset,
                                    lp.label_space(), lp.base_config(), 0, {},
                                    {{"L1"}}, lp.members()),
        DataError);
    CHECK_THROWS_AS(MultiLabelModel::from_parts(
                        MultiLabelStrategy::label_powerset, lp.label_space(),
                        lp.base_config(), 0, {}, {{"L2", "L1"}}, one_member),
                    DataError);
    // Member classes must be the binary indicator alphabet.
    ClassifierConfig dummy_cfg = base_of(ClassifierKind::dummy_most_frequent);
    std::vector<FittedClassifier> bad = {
        FittedClassifier(dummy_cfg, fit_dummy({"yes"})),
        br.members()[1]};
    CHECK_THROWS_AS(MultiLabelModel::from_parts(
                        MultiLabelStrategy::binary_relevance, br.label_space(),
                        br.base_config(), 0, {}, {}, bad),
                    DataError);
}
