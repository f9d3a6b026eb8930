#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ttpc/corpus.hpp"
#include "ttpc/mlabel.hpp"
#include "ttpc/pipeline_config.hpp"

namespace ttpc {

// Per-label binary confusion counts over a batch of multi-label predictions.
// For every label, tp + fp + fn + tn == n_samples.
struct LabelConfusion {
    std::vector<std::string> labels;  // label-space order
    std::vector<std::size_t> tp, fp, fn, tn;
    std::size_t n_samples = 0;
};

// Tabulates per-label counts.  Throws DataError when the lists have
// different lengths or a set names a label outside the space.
LabelConfusion confusion(const std::vector<std::vector<std::string>>& true_sets,
                         const std::vector<std::vector<std::string>>& pred_sets,
                         const LabelSpace& label_space);

enum class Averaging { micro, macro };

// Precision, recall, and F-beta over the confusion counts.  Micro pools
// counts across labels; macro averages the per-label scores.  Any 0/0 is
// scored 0 (pessimistic convention, so absent labels count against macro
// averages).  f_beta throws UsageError unless beta > 0.
double precision(const LabelConfusion& conf, Averaging averaging);
double recall(const LabelConfusion& conf, Averaging averaging);
double f_beta(const LabelConfusion& conf, Averaging averaging,
              double beta = 0.5);

// Fraction of label decisions that are wrong: summed symmetric-difference
// size divided by n_samples * |label_space|.
double hamming_loss(const std::vector<std::vector<std::string>>& true_sets,
                    const std::vector<std::vector<std::string>>& pred_sets,
                    const LabelSpace& label_space);

// Seeded shuffle of [0, n) followed by a contiguous split into k folds whose
// sizes differ by at most one (the first n % k folds are larger).  Throws
// UsageError for k < 2 and DataError for n < k.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_samples,
                                                  std::size_t k,
                                                  std::uint64_t seed);

// The full pipeline search space for one label kind: every combination of
// 2 normalizers x 4 vectorizers x 3 transformations x 7 classifiers except
// the incompatible doc2vec x counting-naive-Bayes pairs - 156 configurations.
std::vector<PipelineConfig> enumerate_grid(LabelSpaceKind label_kind,
                                           std::uint64_t seed);

// The seven headline metrics for one evaluation batch (one fold, or the
// unweighted mean over folds).
struct FoldMetrics {
    double precision_micro = 0.0;
    double precision_macro = 0.0;
    double recall_micro = 0.0;
    double recall_macro = 0.0;
    double f05_micro = 0.0;
    double f05_macro = 0.0;
    double hamming_loss = 0.0;
};

// Stable metric field names paired with their accessors, in report column
// order; hamming_loss is the only metric where smaller is better.
const std::vector<std::pair<std::string, double FoldMetrics::*>>&
fold_metric_fields();

// One cross-validated configuration. A configuration that throws during any
// fold is recorded as status "failed" with the error text in `reason`;
// failures never abort the rest of the grid.
struct GridRow {
    PipelineConfig config;
    std::string status = "ok";      // "ok" or "failed"
    std::string reason;             // error text when status == "failed"
    std::vector<FoldMetrics> folds; // per-fold values (empty when failed)
    FoldMetrics mean;               // unweighted mean over folds
    std::string leakage;            // "" (unchecked), "ok", or "violated"
    double runtime_seconds = 0.0;   // wall clock; excluded from report files
};

struct GridOptions {
    std::size_t folds = 5;
    std::size_t workers = 0;  // 0 = one per hardware thread
    // Refit every fold with the test-fold samples perturbed and compare
    // fitted-state digests: equal digests prove test data touched no fit.
    bool leakage_check = false;
};

struct EvaluationReport {
    LabelSpaceKind label_kind = LabelSpaceKind::tactics;
    std::uint64_t seed = 0;
    std::size_t folds = 0;
    std::size_t n_samples = 0;
    std::vector<std::string> label_space;  // union over the corpus, sorted
    std::vector<GridRow> rows;             // sorted by config key
    // Best "ok" row per metric (max, except min for hamming_loss); ties
    // resolve to the first row in key order.
    std::map<std::string, std::string> best;
};

// Cross-validates every grid configuration on the corpus. The fold split is
// shared by all configurations (seeded by `seed`); each configuration's fit
// seed derives from the global seed and its key, so rows are independent of
// enumeration or scheduling order. All fitting happens strictly inside the
// training fold; metrics score the held-out fold against the label space of
// the whole corpus. Throws DataError when the corpus is smaller than the
// fold count or carries no labels of the requested kind.
EvaluationReport run_grid(const std::vector<LabeledSample>& corpus,
                          LabelSpaceKind label_kind, std::uint64_t seed,
                          const GridOptions& options = {});

// Report serializations. Both are deterministic for a given report: rows
// are already sorted, and doubles print as shortest exact decimals. Timing
// is deliberately omitted so reruns with one seed are byte-identical.
std::string report_csv_string(const EvaluationReport& report);
std::string report_json_string(const EvaluationReport& report);
void write_report_csv(const EvaluationReport& report, const std::string& path);
void write_report_json(const EvaluationReport& report, const std::string& path);

}  // namespace ttpc
