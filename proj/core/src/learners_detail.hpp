#pragma once

// Internal helpers shared by the learner translation units.

#include <cstddef>
#include <string>
#include <vector>

#include "ttpc/feature.hpp"

namespace ttpc::detail {

struct LabelIndex {
    std::vector<std::string> classes;   // sorted, distinct
    std::vector<std::size_t> y_index;   // per sample, index into classes
    std::vector<std::size_t> counts;    // per class
};

// Sorts the distinct labels and maps every sample onto its class index.
// Throws DataError when y is empty.
LabelIndex index_labels(const std::vector<std::string>& y);

// Validates that X is non-empty, matches y in length, has a consistent
// dimension across rows, and contains only finite values.  Returns that
// dimension.  Throws DataError otherwise.
std::size_t check_design_matrix(const std::vector<FeatureVector>& X,
                                const std::vector<std::string>& y);

// Throws IncompatibleConfigError naming `kind_name` if any value is negative.
void require_nonnegative(const std::vector<FeatureVector>& X,
                         const std::string& kind_name);

// y mapped to -1/+1 doubles: classes[0] -> -1, classes[1] -> +1.
std::vector<double> signed_targets(const LabelIndex& index);

}  // namespace ttpc::detail
