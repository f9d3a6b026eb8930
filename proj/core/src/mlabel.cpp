#include "ttpc/mlabel.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <utility>

#include "ttpc/errors.hpp"

namespace ttpc {
namespace {

// Member seeds derive from the global seed and a per-member name, never from
// a position, so dropping one label leaves every other member's fit intact.
std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t member_seed(std::uint64_t seed, const std::string& name) {
    return splitmix64(seed ^ fnv1a64(name));
}

void check_label_matrix(const std::vector<FeatureVector>& X,
                        const LabelMatrix& Y, std::size_t n_labels) {
    if (X.empty()) {
        throw DataError("multi-label fit requires at least one training sample");
    }
    if (Y.size() != X.size()) {
        throw DataError("feature matrix has " + std::to_string(X.size()) +
                        " rows but label matrix has " + std::to_string(Y.size()));
    }
    for (std::size_t i = 0; i < Y.size(); ++i) {
        if (Y[i].size() != n_labels) {
            throw DataError("label matrix row " + std::to_string(i) + " has " +
                            std::to_string(Y[i].size()) + " columns; expected " +
                            std::to_string(n_labels));
        }
        for (std::uint8_t v : Y[i]) {
            if (v > 1) {
                throw DataError("label matrix row " + std::to_string(i) +
                                " contains a value other than 0 or 1");
            }
        }
    }
}

std::vector<std::string> binary_targets(const LabelMatrix& Y, std::size_t col) {
    std::vector<std::string> y;
    y.reserve(Y.size());
    for (const auto& row : Y) {
        y.push_back(row[col] != 0 ? "1" : "0");
    }
    return y;
}

FittedClassifier fit_member(const ClassifierConfig& base, std::uint64_t seed,
                            const std::string& name,
                            const std::vector<FeatureVector>& X,
                            const std::vector<std::string>& y) {
    ClassifierConfig config = base;
    config.seed = member_seed(seed, name);
    return fit_classifier(config, X, y);
}

bool predicts_positive(const FittedClassifier& member, const FeatureVector& x) {
    return member.predict(x) == "1";
}

// Appends extra dense values after the base dimensions, preserving the
// representation (appended zeros are simply absent from sparse vectors).
FeatureVector augment(const FeatureVector& x, const std::vector<double>& extra) {
    const std::size_t base_dim = x.dimension;
    if (x.kind == FeatureVector::Kind::dense) {
        std::vector<double> values = x.values;
        values.insert(values.end(), extra.begin(), extra.end());
        return FeatureVector::dense(std::move(values));
    }
    std::vector<std::pair<std::uint32_t, double>> entries = x.entries;
    for (std::size_t j = 0; j < extra.size(); ++j) {
        if (extra[j] != 0.0) {
            entries.emplace_back(static_cast<std::uint32_t>(base_dim + j),
                                 extra[j]);
        }
    }
    return FeatureVector::sparse(base_dim + extra.size(), std::move(entries));
}

std::string combination_key(const std::vector<std::string>& labels) {
    std::string key;
    for (const auto& label : labels) {
        if (!key.empty()) key += ',';
        key += label;
    }
    return key;
}

// One-vs-rest score toward the positive class.  Constant members sort to the
// extremes so a combination seen exclusively in training always wins.
double positive_score(const FittedClassifier& member, const FeatureVector& x) {
    if (member.classes().size() == 1) {
        return member.classes()[0] == "1"
                   ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    }
    return member.decision_value(x);
}

}  // namespace

std::string to_string(LabelSpaceKind kind) {
    return kind == LabelSpaceKind::tactics ? "tactics" : "techniques";
}

LabelSpaceKind label_space_kind_from_string(const std::string& name) {
    if (name == "tactics") return LabelSpaceKind::tactics;
    if (name == "techniques") return LabelSpaceKind::techniques;
    throw UsageError("unknown label space kind '" + name +
                     "' (expected tactics or techniques)");
}

LabelSpace LabelSpace::create(std::vector<std::string> labels,
                              LabelSpaceKind kind) {
    if (labels.empty()) {
        throw DataError("label space must contain at least one label");
    }
    std::sort(labels.begin(), labels.end());
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (labels[i] == labels[i - 1]) {
            throw DataError("label space contains duplicate label '" +
                            labels[i] + "'");
        }
    }
    LabelSpace space;
    space.labels_ = std::move(labels);
    space.kind_ = kind;
    return space;
}

std::int64_t LabelSpace::index_of(const std::string& label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) return -1;
    return it - labels_.begin();
}

std::string to_string(MultiLabelStrategy strategy) {
    switch (strategy) {
        case MultiLabelStrategy::binary_relevance: return "binary_relevance";
        case MultiLabelStrategy::classifier_chain: return "classifier_chain";
        case MultiLabelStrategy::label_powerset: return "label_powerset";
    }
    throw InternalError("unhandled multi-label strategy");
}

MultiLabelStrategy multilabel_strategy_from_string(const std::string& name) {
    for (MultiLabelStrategy strategy : all_multilabel_strategies()) {
        if (to_string(strategy) == name) return strategy;
    }
    throw UsageError("unknown multi-label strategy '" + name + "'");
}

const std::vector<MultiLabelStrategy>& all_multilabel_strategies() {
    static const std::vector<MultiLabelStrategy> kAll = {
        MultiLabelStrategy::binary_relevance,
        MultiLabelStrategy::classifier_chain,
        MultiLabelStrategy::label_powerset,
    };
    return kAll;
}

MultiLabelModel fit_binary_relevance(const std::vector<FeatureVector>& X,
                                     const LabelMatrix& Y,
                                     const LabelSpace& label_space,
                                     const ClassifierConfig& base,
                                     std::uint64_t seed) {
    check_label_matrix(X, Y, label_space.size());
    MultiLabelModel model;
    model.strategy_ = MultiLabelStrategy::binary_relevance;
    model.label_space_ = label_space;
    model.base_config_ = base;
    model.seed_ = seed;
    model.members_.reserve(label_space.size());
    for (std::size_t col = 0; col < label_space.size(); ++col) {
        const std::string& label = label_space.labels()[col];
        model.members_.push_back(
            fit_member(base, seed, label, X, binary_targets(Y, col)));
    }
    return model;
}

MultiLabelModel fit_classifier_chain(const std::vector<FeatureVector>& X,
                                     const LabelMatrix& Y,
                                     const LabelSpace& label_space,
                                     const ClassifierConfig& base,
                                     std::uint64_t seed,
                                     const std::vector<std::string>& order) {
    check_label_matrix(X, Y, label_space.size());
    std::vector<std::string> chain = order;
    if (chain.empty()) {
        chain = label_space.labels();
    } else {
        if (chain.size() != label_space.size()) {
            throw UsageError("classifier chain order lists " +
                             std::to_string(chain.size()) + " labels; expected " +
                             std::to_string(label_space.size()));
        }
        std::vector<bool> seen(label_space.size(), false);
        for (const auto& label : chain) {
            const std::int64_t idx = label_space.index_of(label);
            if (idx < 0) {
                throw UsageError("classifier chain order names '" + label +
                                 "', which is not in the label space");
            }
            if (seen[static_cast<std::size_t>(idx)]) {
                throw UsageError("classifier chain order repeats label '" +
                                 label + "'");
            }
            seen[static_cast<std::size_t>(idx)] = true;
        }
    }

    MultiLabelModel model;
    model.strategy_ = MultiLabelStrategy::classifier_chain;
    model.label_space_ = label_space;
    model.base_config_ = base;
    model.seed_ = seed;
    model.chain_order_ = chain;
    model.members_.reserve(chain.size());

    // True label values of the earlier chain links, grown one column per step.
    std::vector<std::vector<double>> extras(X.size());
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const std::size_t col =
            static_cast<std::size_t>(label_space.index_of(chain[k]));
        std::vector<FeatureVector> X_aug;
        X_aug.reserve(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) {
            X_aug.push_back(augment(X[i], extras[i]));
        }
        model.members_.push_back(
            fit_member(base, seed, chain[k], X_aug, binary_targets(Y, col)));
        for (std::size_t i = 0; i < X.size(); ++i) {
            extras[i].push_back(Y[i][col] != 0 ? 1.0 : 0.0);
        }
    }
    return model;
}

MultiLabelModel fit_label_powerset(const std::vector<FeatureVector>& X,
                                   const LabelMatrix& Y,
                                   const LabelSpace& label_space,
                                   const ClassifierConfig& base,
                                   std::uint64_t seed,
                                   std::size_t combo_cap) {
    check_label_matrix(X, Y, label_space.size());

    std::vector<std::string> row_keys(Y.size());
    std::map<std::string, std::vector<std::string>> combos;
    for (std::size_t i = 0; i < Y.size(); ++i) {
        std::vector<std::string> labels;
        for (std::size_t col = 0; col < label_space.size(); ++col) {
            if (Y[i][col] != 0) labels.push_back(label_space.labels()[col]);
        }
        row_keys[i] = combination_key(labels);
        combos.emplace(row_keys[i], std::move(labels));
    }
    if (combos.size() > combo_cap) {
        throw DataError(
            "label powerset found " + std::to_string(combos.size()) +
            " distinct label combinations, exceeding the cap of " +
            std::to_string(combo_cap) +
            "; use the binary_relevance transform for this label space");
    }

    MultiLabelModel model;
    model.strategy_ = MultiLabelStrategy::label_powerset;
    model.label_space_ = label_space;
    model.base_config_ = base;
    model.seed_ = seed;
    model.combinations_.reserve(combos.size());
    model.members_.reserve(combos.size());
    for (const auto& [key, labels] : combos) {
        std::vector<std::string> y;
        y.reserve(row_keys.size());
        for (const auto& row_key : row_keys) {
            y.push_back(row_key == key ? "1" : "0");
        }
        model.members_.push_back(fit_member(base, seed, key, X, y));
        model.combinations_.push_back(labels);
    }
    return model;
}

MultiLabelModel fit_multilabel(MultiLabelStrategy strategy,
                               const std::vector<FeatureVector>& X,
                               const LabelMatrix& Y,
                               const LabelSpace& label_space,
                               const ClassifierConfig& base,
                               std::uint64_t seed) {
    switch (strategy) {
        case MultiLabelStrategy::binary_relevance:
            return fit_binary_relevance(X, Y, label_space, base, seed);
        case MultiLabelStrategy::classifier_chain:
            return fit_classifier_chain(X, Y, label_space, base, seed);
        case MultiLabelStrategy::label_powerset:
            return fit_label_powerset(X, Y, label_space, base, seed);
    }
    throw InternalError("unhandled multi-label strategy");
}

std::vector<std::string> MultiLabelModel::predict(const FeatureVector& x) const {
    return predict_with_scores(x).labels;
}

MultiLabelPrediction MultiLabelModel::predict_with_scores(
    const FeatureVector& x) const {
    MultiLabelPrediction out;
    out.scores.assign(label_space_.size(), 0.0);
    switch (strategy_) {
        case MultiLabelStrategy::binary_relevance: {
            for (std::size_t col = 0; col < label_space_.size(); ++col) {
                out.scores[col] = positive_score(members_[col], x);
                if (predicts_positive(members_[col], x)) {
                    out.labels.push_back(label_space_.labels()[col]);
                }
            }
            return out;
        }
        case MultiLabelStrategy::classifier_chain: {
            std::vector<bool> present(label_space_.size(), false);
            std::vector<double> extras;
            extras.reserve(chain_order_.size());
            for (std::size_t k = 0; k < chain_order_.size(); ++k) {
                const FeatureVector augmented = augment(x, extras);
                const bool positive = predicts_positive(members_[k], augmented);
                extras.push_back(positive ? 1.0 : 0.0);
                const auto col = static_cast<std::size_t>(
                    label_space_.index_of(chain_order_[k]));
                out.scores[col] = positive_score(members_[k], augmented);
                if (positive) present[col] = true;
            }
            for (std::size_t col = 0; col < label_space_.size(); ++col) {
                if (present[col]) out.labels.push_back(label_space_.labels()[col]);
            }
            return out;
        }
        case MultiLabelStrategy::label_powerset: {
            std::vector<double> member_scores(members_.size());
            std::size_t best = 0;
            for (std::size_t i = 0; i < members_.size(); ++i) {
                member_scores[i] = positive_score(members_[i], x);
                if (member_scores[i] > member_scores[best]) best = i;
            }
            // Per-label margin: best combination containing the label versus
            // best combination without it.
            constexpr double kInf = std::numeric_limits<double>::infinity();
            for (std::size_t col = 0; col < label_space_.size(); ++col) {
                const std::string& label = label_space_.labels()[col];
                double with = -kInf;
                double without = -kInf;
                for (std::size_t i = 0; i < members_.size(); ++i) {
                    const bool contains =
                        std::binary_search(combinations_[i].begin(),
                                           combinations_[i].end(), label);
                    double& side = contains ? with : without;
                    side = std::max(side, member_scores[i]);
                }
                if (with == -kInf) {
                    out.scores[col] = -kInf;
                } else if (without == -kInf) {
                    out.scores[col] = kInf;
                } else {
                    out.scores[col] = with - without;
                }
            }
            out.labels = combinations_[best];
            return out;
        }
    }
    throw InternalError("unhandled multi-label strategy");
}

MultiLabelModel MultiLabelModel::from_parts(
    MultiLabelStrategy strategy, LabelSpace label_space,
    ClassifierConfig base_config, std::uint64_t seed,
    std::vector<std::string> chain_order,
    std::vector<std::vector<std::string>> combinations,
    std::vector<FittedClassifier> members) {
    MultiLabelModel model;
    model.strategy_ = strategy;
    model.label_space_ = std::move(label_space);
    model.base_config_ = std::move(base_config);
    model.seed_ = seed;
    model.chain_order_ = std::move(chain_order);
    model.combinations_ = std::move(combinations);
    model.members_ = std::move(members);

    const std::size_t n_labels = model.label_space_.size();
    switch (strategy) {
        case MultiLabelStrategy::binary_relevance:
            if (!model.chain_order_.empty() || !model.combinations_.empty() ||
                model.members_.size() != n_labels) {
                throw DataError("binary relevance model parts are inconsistent");
            }
            break;
        case MultiLabelStrategy::classifier_chain: {
            if (!model.combinations_.empty() ||
                model.chain_order_.size() != n_labels ||
                model.members_.size() != n_labels) {
                throw DataError("classifier chain model parts are inconsistent");
            }
            std::vector<bool> seen(n_labels, false);
            for (const auto& label : model.chain_order_) {
                const std::int64_t idx = model.label_space_.index_of(label);
                if (idx < 0 || seen[static_cast<std::size_t>(idx)]) {
                    throw DataError(
                        "classifier chain order is not a permutation of the "
                        "label space");
                }
                seen[static_cast<std::size_t>(idx)] = true;
            }
            break;
        }
        case MultiLabelStrategy::label_powerset: {
            if (!model.chain_order_.empty() || model.combinations_.empty() ||
                model.members_.size() != model.combinations_.size()) {
                throw DataError("label powerset model parts are inconsistent");
            }
            for (const auto& combo : model.combinations_) {
                for (std::size_t j = 0; j < combo.size(); ++j) {
                    if (model.label_space_.index_of(combo[j]) < 0 ||
                        (j > 0 && combo[j] <= combo[j - 1])) {
                        throw DataError(
                            "label powerset combination is not a sorted subset "
                            "of the label space");
                    }
                }
            }
            break;
        }
    }
    for (const auto& member : model.members_) {
        for (const auto& cls : member.classes()) {
            if (cls != "0" && cls != "1") {
                throw DataError("multi-label member classifier has class '" +
                                cls + "'; expected 0 or 1");
            }
        }
    }
    return model;
}

}  // namespace ttpc
