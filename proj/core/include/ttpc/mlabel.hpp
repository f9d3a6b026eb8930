#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ttpc/feature.hpp"
#include "ttpc/learners.hpp"

namespace ttpc {

// Problem-transformation layer: turns the binary classifiers of learners.hpp
// into multi-label classifiers over a fixed label space.

enum class LabelSpaceKind { tactics, techniques };

std::string to_string(LabelSpaceKind kind);
LabelSpaceKind label_space_kind_from_string(const std::string& name);

class LabelSpace {
  public:
    // Sorts the labels; throws DataError on duplicates or an empty list.
    static LabelSpace create(std::vector<std::string> labels,
                             LabelSpaceKind kind);

    const std::vector<std::string>& labels() const { return labels_; }
    LabelSpaceKind kind() const { return kind_; }
    std::size_t size() const { return labels_.size(); }
    // Index of `label`, or -1 when absent.
    std::int64_t index_of(const std::string& label) const;

  private:
    LabelSpace() = default;
    std::vector<std::string> labels_;
    LabelSpaceKind kind_ = LabelSpaceKind::tactics;
};

enum class MultiLabelStrategy {
    binary_relevance,
    classifier_chain,
    label_powerset,
};

std::string to_string(MultiLabelStrategy strategy);
MultiLabelStrategy multilabel_strategy_from_string(const std::string& name);
const std::vector<MultiLabelStrategy>& all_multilabel_strategies();

// Binary indicator matrix: one row per sample, one 0/1 column per label in
// label-space order.
using LabelMatrix = std::vector<std::vector<std::uint8_t>>;

// A predicted label subset plus a per-label membership margin, aligned with
// the label space.  Margins are raw decision values: positive pulls the label
// in, negative keeps it out, and +/-infinity marks labels whose training
// column was constant (binary relevance, chain) or that appear in every /
// no training combination (label powerset).
struct MultiLabelPrediction {
    std::vector<std::string> labels;
    std::vector<double> scores;
};

class MultiLabelModel {
  public:
    MultiLabelStrategy strategy() const { return strategy_; }
    const LabelSpace& label_space() const { return label_space_; }
    const ClassifierConfig& base_config() const { return base_config_; }
    std::uint64_t seed() const { return seed_; }

    // Chain order (classifier_chain only; empty otherwise).
    const std::vector<std::string>& chain_order() const { return chain_order_; }
    // Label combinations, one per powerset class (label_powerset only).
    const std::vector<std::vector<std::string>>& combinations() const {
        return combinations_;
    }
    // Fitted members: one per label (binary relevance), per chain position
    // (classifier chain), or per combination (label powerset).
    const std::vector<FittedClassifier>& members() const { return members_; }

    // Predicted label subset, in label-space order.  Empty is legal.
    std::vector<std::string> predict(const FeatureVector& x) const;

    // predict() plus the per-label margins behind the decision.  The labels
    // are always exactly what predict() returns.
    MultiLabelPrediction predict_with_scores(const FeatureVector& x) const;

    // Reassembles a model from serialized parts, revalidating the shape.
    static MultiLabelModel from_parts(MultiLabelStrategy strategy,
                                      LabelSpace label_space,
                                      ClassifierConfig base_config,
                                      std::uint64_t seed,
                                      std::vector<std::string> chain_order,
                                      std::vector<std::vector<std::string>> combinations,
                                      std::vector<FittedClassifier> members);

  private:
    MultiLabelModel() = default;
    friend MultiLabelModel fit_binary_relevance(
        const std::vector<FeatureVector>&, const LabelMatrix&,
        const LabelSpace&, const ClassifierConfig&, std::uint64_t);
    friend MultiLabelModel fit_classifier_chain(
        const std::vector<FeatureVector>&, const LabelMatrix&,
        const LabelSpace&, const ClassifierConfig&, std::uint64_t,
        const std::vector<std::string>&);
    friend MultiLabelModel fit_label_powerset(const std::vector<FeatureVector>&,
                                              const LabelMatrix&,
                                              const LabelSpace&,
                                              const ClassifierConfig&,
                                              std::uint64_t, std::size_t);

    MultiLabelStrategy strategy_ = MultiLabelStrategy::binary_relevance;
    LabelSpace label_space_ = LabelSpace::create({"_"}, LabelSpaceKind::tactics);
    ClassifierConfig base_config_;
    std::uint64_t seed_ = 0;
    std::vector<std::string> chain_order_;
    std::vector<std::vector<std::string>> combinations_;
    std::vector<FittedClassifier> members_;
};

// One independent binary classifier per label.  Labels that are constant in
// training (never or always positive) get constant members and predict that
// constant value.  Each member's seed derives from the global seed and the
// label *name*, so removing one label never changes another label's fit.
MultiLabelModel fit_binary_relevance(const std::vector<FeatureVector>& X,
                                     const LabelMatrix& Y,
                                     const LabelSpace& label_space,
                                     const ClassifierConfig& base,
                                     std::uint64_t seed);

// Chain in `order` (default: label-space order when empty): member k trains
// on X augmented with the k earlier labels' true values and predicts with the
// earlier members' predicted values.  Throws UsageError when `order` is not
// a permutation of the label space.
MultiLabelModel fit_classifier_chain(const std::vector<FeatureVector>& X,
                                     const LabelMatrix& Y,
                                     const LabelSpace& label_space,
                                     const ClassifierConfig& base,
                                     std::uint64_t seed,
                                     const std::vector<std::string>& order = {});

// Each distinct training label combination becomes one class, scored
// one-vs-rest with the base classifier; prediction returns the best
// combination's label set (closed world: always a combination seen in
// training).  Throws DataError when the distinct combinations exceed
// `combo_cap`, advising binary relevance instead.
MultiLabelModel fit_label_powerset(const std::vector<FeatureVector>& X,
                                   const LabelMatrix& Y,
                                   const LabelSpace& label_space,
                                   const ClassifierConfig& base,
                                   std::uint64_t seed,
                                   std::size_t combo_cap = 512);

// Strategy-dispatching convenience used by the evaluation grid.
MultiLabelModel fit_multilabel(MultiLabelStrategy strategy,
                               const std::vector<FeatureVector>& X,
                               const LabelMatrix& Y,
                               const LabelSpace& label_space,
                               const ClassifierConfig& base,
                               std::uint64_t seed);

}  // namespace ttpc
