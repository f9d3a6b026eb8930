#include "ttpc/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include "json.hpp"
#include "ttpc/digest.hpp"
#include "ttpc/errors.hpp"
#include "ttpc/pipeline.hpp"

namespace ttpc {
namespace {

std::vector<bool> membership_mask(const std::vector<std::string>& labels,
                                  const LabelSpace& space) {
    std::vector<bool> mask(space.size(), false);
    for (const auto& label : labels) {
        const std::int64_t idx = space.index_of(label);
        if (idx < 0) {
            throw DataError("label '" + label + "' is outside the label space");
        }
        mask[static_cast<std::size_t>(idx)] = true;
    }
    return mask;
}

double ratio_or_zero(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0) return 0.0;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double f_from_pr(double p, double r, double beta) {
    const double b2 = beta * beta;
    const double denom = b2 * p + r;
    if (denom == 0.0) return 0.0;
    return (1.0 + b2) * p * r / denom;
}

struct PooledCounts {
    std::size_t tp = 0, fp = 0, fn = 0;
};

PooledCounts pool(const LabelConfusion& conf) {
    PooledCounts pooled;
    for (std::size_t l = 0; l < conf.labels.size(); ++l) {
        pooled.tp += conf.tp[l];
        pooled.fp += conf.fp[l];
        pooled.fn += conf.fn[l];
    }
    return pooled;
}

}  // namespace

LabelConfusion confusion(const std::vector<std::vector<std::string>>& true_sets,
                         const std::vector<std::vector<std::string>>& pred_sets,
                         const LabelSpace& label_space) {
    if (true_sets.size() != pred_sets.size()) {
        throw DataError("got " + std::to_string(true_sets.size()) +
                        " true label sets but " +
                        std::to_string(pred_sets.size()) + " predicted sets");
    }
    LabelConfusion conf;
    conf.labels = label_space.labels();
    conf.tp.assign(label_space.size(), 0);
    conf.fp.assign(label_space.size(), 0);
    conf.fn.assign(label_space.size(), 0);
    conf.tn.assign(label_space.size(), 0);
    conf.n_samples = true_sets.size();
    for (std::size_t i = 0; i < true_sets.size(); ++i) {
        const std::vector<bool> truth = membership_mask(true_sets[i], label_space);
        const std::vector<bool> pred = membership_mask(pred_sets[i], label_space);
        for (std::size_t l = 0; l < label_space.size(); ++l) {
            if (truth[l] && pred[l]) {
                ++conf.tp[l];
            } else if (!truth[l] && pred[l]) {
                ++conf.fp[l];
            } else if (truth[l] && !pred[l]) {
                ++conf.fn[l];
            } else {
                ++conf.tn[l];
            }
        }
    }
    return conf;
}

double precision(const LabelConfusion& conf, Averaging averaging) {
    if (averaging == Averaging::micro) {
        const PooledCounts pooled = pool(conf);
        return ratio_or_zero(pooled.tp, pooled.tp + pooled.fp);
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < conf.labels.size(); ++l) {
        sum += ratio_or_zero(conf.tp[l], conf.tp[l] + conf.fp[l]);
    }
    return conf.labels.empty() ? 0.0 : sum / static_cast<double>(conf.labels.size());
}

double recall(const LabelConfusion& conf, Averaging averaging) {
    if (averaging == Averaging::micro) {
        const PooledCounts pooled = pool(conf);
        return ratio_or_zero(pooled.tp, pooled.tp + pooled.fn);
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < conf.labels.size(); ++l) {
        sum += ratio_or_zero(conf.tp[l], conf.tp[l] + conf.fn[l]);
    }
    return conf.labels.empty() ? 0.0 : sum / static_cast<double>(conf.labels.size());
}

double f_beta(const LabelConfusion& conf, Averaging averaging, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw UsageError("f_beta requires beta > 0");
    }
    if (averaging == Averaging::micro) {
        const PooledCounts pooled = pool(conf);
        const double p = ratio_or_zero(pooled.tp, pooled.tp + pooled.fp);
        const double r = ratio_or_zero(pooled.tp, pooled.tp + pooled.fn);
        return f_from_pr(p, r, beta);
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < conf.labels.size(); ++l) {
        const double p = ratio_or_zero(conf.tp[l], conf.tp[l] + conf.fp[l]);
        const double r = ratio_or_zero(conf.tp[l], conf.tp[l] + conf.fn[l]);
        sum += f_from_pr(p, r, beta);
    }
    return conf.labels.empty() ? 0.0 : sum / static_cast<double>(conf.labels.size());
}

double hamming_loss(const std::vector<std::vector<std::string>>& true_sets,
                    const std::vector<std::vector<std::string>>& pred_sets,
                    const LabelSpace& label_space) {
    const LabelConfusion conf = confusion(true_sets, pred_sets, label_space);
    if (conf.n_samples == 0) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t l = 0; l < conf.labels.size(); ++l) {
        wrong += conf.fp[l] + conf.fn[l];
    }
    return static_cast<double>(wrong) /
           static_cast<double>(conf.n_samples * label_space.size());
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n_samples,
                                                  std::size_t k,
                                                  std::uint64_t seed) {
    if (k < 2) {
        throw UsageError("cross-validation requires at least 2 folds");
    }
    if (n_samples < k) {
        throw DataError("cannot split " + std::to_string(n_samples) +
                        " samples into " + std::to_string(k) + " folds");
    }

    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates over a fixed xorshift64* stream, so the same seed yields
    // the same folds on every platform and standard library.
    std::uint64_t state = seed ^ 0x9E3779B97F4A7C15ULL;
    if (state == 0) state = 0x9E3779B97F4A7C15ULL;
    const auto next = [&state]() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1DULL;
    };
    for (std::size_t i = n_samples - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(next() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n_samples / k;
    const std::size_t remainder = n_samples % k;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < remainder ? 1 : 0);
        folds[f].assign(order.begin() + cursor, order.begin() + cursor + size);
        cursor += size;
    }
    return folds;
}

std::vector<PipelineConfig> enumerate_grid(LabelSpaceKind label_kind,
                                           std::uint64_t seed) {
    std::vector<PipelineConfig> grid;
    for (NormalizerMode normalizer :
         {NormalizerMode::stem, NormalizerMode::lemma}) {
        for (VectorizerKind vectorizer : all_vectorizer_kinds()) {
            for (MultiLabelStrategy transformation : all_multilabel_strategies()) {
                for (ClassifierKind classifier : all_classifier_kinds()) {
                    if (is_forbidden_combination(vectorizer, classifier)) {
                        continue;
                    }
                    PipelineConfig config;
                    config.normalizer = normalizer;
                    config.vectorizer = vectorizer;
                    config.transformation = transformation;
                    config.classifier = classifier;
                    config.label_kind = label_kind;
                    config.seed = seed;
                    grid.push_back(config);
                }
            }
        }
    }
    return grid;
}

namespace {

// Same derivation the multi-label layer uses per member: the fit seed of a
// configuration depends only on the global seed and the configuration's
// key, never on enumeration or scheduling order.
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

const std::vector<std::string>& labels_of(const LabeledSample& sample,
                                          LabelSpaceKind kind) {
    return kind == LabelSpaceKind::tactics ? sample.tactic_labels
                                           : sample.technique_labels;
}

struct FoldPlan {
    std::vector<std::size_t> test;
    std::vector<std::size_t> train;  // complement, ascending
};

std::vector<FoldPlan> fold_plans(
    std::size_t n, const std::vector<std::vector<std::size_t>>& folds) {
    std::vector<FoldPlan> plans(folds.size());
    for (std::size_t k = 0; k < folds.size(); ++k) {
        plans[k].test = folds[k];
        std::sort(plans[k].test.begin(), plans[k].test.end());
        std::vector<bool> held(n, false);
        for (std::size_t i : plans[k].test) held[i] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!held[i]) plans[k].train.push_back(i);
        }
    }
    return plans;
}

// The one place a fold's fit happens: selects the training rows and fits.
// The leakage check hands this function a corpus whose held-out rows were
// rewritten; any influence of those rows on fitted state changes the
// resulting archive digest.
TrainedPipeline fit_fold(const std::vector<LabeledSample>& corpus,
                         const FoldPlan& plan, const PipelineConfig& config) {
    std::vector<LabeledSample> train;
    train.reserve(plan.train.size());
    for (std::size_t i : plan.train) train.push_back(corpus[i]);
    return fit_pipeline(config, train);
}

std::vector<LabeledSample> perturb_test_fold(
    const std::vector<LabeledSample>& corpus, const FoldPlan& plan,
    const LabelSpace& space) {
    std::vector<LabeledSample> perturbed = corpus;
    for (std::size_t i : plan.test) {
        perturbed[i].sample_id = "probe-" + std::to_string(i);
        perturbed[i].text = "leakage probe text " + std::to_string(i);
        perturbed[i].tactic_labels = {space.labels().front()};
        perturbed[i].technique_labels = {space.labels().front()};
        perturbed[i].origin_url = "https://leakage.invalid/" + std::to_string(i);
    }
    return perturbed;
}

FoldMetrics fold_metrics(const std::vector<std::vector<std::string>>& truth,
                         const std::vector<std::vector<std::string>>& predicted,
                         const LabelSpace& space) {
    const LabelConfusion conf = confusion(truth, predicted, space);
    FoldMetrics m;
    m.precision_micro = precision(conf, Averaging::micro);
    m.precision_macro = precision(conf, Averaging::macro);
    m.recall_micro = recall(conf, Averaging::micro);
    m.recall_macro = recall(conf, Averaging::macro);
    m.f05_micro = f_beta(conf, Averaging::micro);
    m.f05_macro = f_beta(conf, Averaging::macro);
    m.hamming_loss = hamming_loss(truth, predicted, space);
    return m;
}

GridRow evaluate_config(const PipelineConfig& config,
                        const std::vector<LabeledSample>& corpus,
                        const std::vector<FoldPlan>& plans,
                        const LabelSpace& space, bool leakage_check) {
    GridRow row;
    row.config = config;
    const auto started = std::chrono::steady_clock::now();
    try {
        bool violated = false;
        for (const FoldPlan& plan : plans) {
            const TrainedPipeline fitted = fit_fold(corpus, plan, config);

            std::vector<std::vector<std::string>> truth, predicted;
            truth.reserve(plan.test.size());
            predicted.reserve(plan.test.size());
            for (std::size_t i : plan.test) {
                truth.push_back(labels_of(corpus[i], config.label_kind));
                predicted.push_back(fitted.predict(corpus[i].text).labels);
            }
            row.folds.push_back(fold_metrics(truth, predicted, space));

            if (leakage_check) {
                const TrainedPipeline refitted = fit_fold(
                    perturb_test_fold(corpus, plan, space), plan, config);
                if (sha256_hex(pipeline_archive_string(fitted)) !=
                    sha256_hex(pipeline_archive_string(refitted))) {
                    violated = true;
                }
            }
        }
        for (const auto& [name, field] : fold_metric_fields()) {
            double sum = 0.0;
            for (const FoldMetrics& f : row.folds) sum += f.*field;
            row.mean.*field = sum / static_cast<double>(row.folds.size());
        }
        if (leakage_check) row.leakage = violated ? "violated" : "ok";
    } catch (const std::exception& e) {
        row.status = "failed";
        row.reason = e.what();
        row.folds.clear();
        row.mean = FoldMetrics{};
        row.leakage.clear();
    }
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    return row;
}

std::string number_str(double value) { return nlohmann::json(value).dump(); }

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string joined_fold_values(const GridRow& row, double FoldMetrics::*field) {
    std::string out;
    for (std::size_t k = 0; k < row.folds.size(); ++k) {
        if (k) out += ';';
        out += number_str(row.folds[k].*field);
    }
    return out;
}

std::vector<std::string> best_for(const EvaluationReport& report,
                                  const GridRow& row) {
    std::vector<std::string> metrics;
    for (const auto& [metric, key] : report.best) {
        if (key == row.config.key()) metrics.push_back(metric);
    }
    return metrics;
}

constexpr const char* kGridArithmetic =
    "2 normalizers x 4 vectorizers x 3 transformations x 7 classifiers = 168 "
    "combinations, minus 12 incompatible doc2vec x counting-naive-Bayes "
    "pairs = 156 configurations";

void write_text_file(const std::string& content, const std::string& path,
                     const char* what) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError(std::string("cannot write ") + what + " '" + path +
                         "'");
    }
    out << content;
}

}  // namespace

const std::vector<std::pair<std::string, double FoldMetrics::*>>&
fold_metric_fields() {
    static const std::vector<std::pair<std::string, double FoldMetrics::*>>
        fields = {
            {"precision_micro", &FoldMetrics::precision_micro},
            {"precision_macro", &FoldMetrics::precision_macro},
            {"recall_micro", &FoldMetrics::recall_micro},
            {"recall_macro", &FoldMetrics::recall_macro},
            {"f05_micro", &FoldMetrics::f05_micro},
            {"f05_macro", &FoldMetrics::f05_macro},
            {"hamming_loss", &FoldMetrics::hamming_loss},
        };
    return fields;
}

EvaluationReport run_grid(const std::vector<LabeledSample>& corpus,
                          LabelSpaceKind label_kind, std::uint64_t seed,
                          const GridOptions& options) {
    if (corpus.size() < options.folds) {
        throw DataError("corpus has " + std::to_string(corpus.size()) +
                        " samples but " + std::to_string(options.folds) +
                        "-fold cross-validation needs at least " +
                        std::to_string(options.folds));
    }
    std::set<std::string> label_union;
    for (const LabeledSample& sample : corpus) {
        const auto& labels = labels_of(sample, label_kind);
        label_union.insert(labels.begin(), labels.end());
    }
    if (label_union.empty()) {
        throw DataError("corpus carries no " + to_string(label_kind) +
                        " labels to evaluate");
    }
    const LabelSpace space = LabelSpace::create(
        {label_union.begin(), label_union.end()}, label_kind);

    const std::vector<FoldPlan> plans = fold_plans(
        corpus.size(), kfold_split(corpus.size(), options.folds, seed));

    std::vector<PipelineConfig> configs = enumerate_grid(label_kind, seed);
    for (PipelineConfig& config : configs) {
        config.seed = splitmix64(seed ^ fnv1a64(config.key()));
    }
    std::sort(configs.begin(), configs.end(),
              [](const PipelineConfig& a, const PipelineConfig& b) {
                  return a.key() < b.key();
              });

    EvaluationReport report;
    report.label_kind = label_kind;
    report.seed = seed;
    report.folds = options.folds;
    report.n_samples = corpus.size();
    report.label_space = space.labels();
    report.rows.resize(configs.size());

    std::size_t n_workers =
        options.workers ? options.workers
                        : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min(n_workers, configs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            report.rows[i] = evaluate_config(configs[i], corpus, plans, space,
                                             options.leakage_check);
        }
    };
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    for (const auto& [metric, field] : fold_metric_fields()) {
        const bool minimize = metric == "hamming_loss";
        const GridRow* best = nullptr;
        for (const GridRow& row : report.rows) {
            if (row.status != "ok") continue;
            if (!best || (minimize ? row.mean.*field < best->mean.*field
                                   : row.mean.*field > best->mean.*field)) {
                best = &row;
            }
        }
        if (best) report.best[metric] = best->config.key();
    }
    return report;
}

std::string report_csv_string(const EvaluationReport& report) {
    std::string out;
    out += std::string("# pipeline evaluation grid: ") + kGridArithmetic + "\n";
    out += "# aggregate metrics are unweighted means over the per-fold values;"
           " fold columns join the per-fold values with ';';"
           " timing is omitted so equal seeds write identical reports\n";
    out += "# label_kind=" + to_string(report.label_kind) +
           " seed=" + std::to_string(report.seed) +
           " folds=" + std::to_string(report.folds) +
           " samples=" + std::to_string(report.n_samples) +
           " labels=" + std::to_string(report.label_space.size()) + "\n";
    out += "key,normalizer,vectorizer,transformation,classifier,label_kind,"
           "seed,status,reason";
    for (const auto& [metric, field] : fold_metric_fields()) {
        out += "," + metric;
    }
    for (const auto& [metric, field] : fold_metric_fields()) {
        out += ",folds_" + metric;
    }
    out += ",best_for,leakage\n";

    for (const GridRow& row : report.rows) {
        const bool ok = row.status == "ok";
        out += row.config.key();
        out += ',';
        out += to_string(row.config.normalizer);
        out += ',';
        out += to_string(row.config.vectorizer);
        out += ',';
        out += to_string(row.config.transformation);
        out += ',';
        out += to_string(row.config.classifier);
        out += ',';
        out += to_string(row.config.label_kind);
        out += ',';
        out += std::to_string(row.config.seed);
        out += ',';
        out += row.status;
        out += ',';
        out += csv_quote(row.reason);
        for (const auto& [metric, field] : fold_metric_fields()) {
            out += ',';
            if (ok) out += number_str(row.mean.*field);
        }
        for (const auto& [metric, field] : fold_metric_fields()) {
            out += ',';
            if (ok) out += joined_fold_values(row, field);
        }
        out += ',';
        std::string flags;
        for (const std::string& metric : best_for(report, row)) {
            if (!flags.empty()) flags += ';';
            flags += metric;
        }
        out += flags;
        out += ',';
        out += row.leakage;
        out += '\n';
    }
    return out;
}

std::string report_json_string(const EvaluationReport& report) {
    nlohmann::ordered_json doc;
    doc["report"] = "pipeline-evaluation-grid";
    doc["grid"] = kGridArithmetic;
    doc["label_kind"] = to_string(report.label_kind);
    doc["seed"] = report.seed;
    doc["folds"] = report.folds;
    doc["n_samples"] = report.n_samples;
    doc["label_space"] = report.label_space;
    doc["best"] = report.best;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const GridRow& row : report.rows) {
        nlohmann::ordered_json entry;
        entry["key"] = row.config.key();
        entry["normalizer"] = to_string(row.config.normalizer);
        entry["vectorizer"] = to_string(row.config.vectorizer);
        entry["transformation"] = to_string(row.config.transformation);
        entry["classifier"] = to_string(row.config.classifier);
        entry["label_kind"] = to_string(row.config.label_kind);
        entry["seed"] = row.config.seed;
        entry["status"] = row.status;
        entry["reason"] = row.reason;
        if (row.status == "ok") {
            nlohmann::ordered_json mean;
            for (const auto& [metric, field] : fold_metric_fields()) {
                mean[metric] = row.mean.*field;
            }
            entry["mean"] = std::move(mean);
            nlohmann::ordered_json folds = nlohmann::ordered_json::array();
            for (const FoldMetrics& f : row.folds) {
                nlohmann::ordered_json fold;
                for (const auto& [metric, field] : fold_metric_fields()) {
                    fold[metric] = f.*field;
                }
                folds.push_back(std::move(fold));
            }
            entry["folds"] = std::move(folds);
        } else {
            entry["mean"] = nullptr;
            entry["folds"] = nlohmann::ordered_json::array();
        }
        entry["best_for"] = best_for(report, row);
        entry["leakage"] = row.leakage;
        rows.push_back(std::move(entry));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(1) + "\n";
}

void write_report_csv(const EvaluationReport& report, const std::string& path) {
    write_text_file(report_csv_string(report), path, "CSV report");
}

void write_report_json(const EvaluationReport& report,
                       const std::string& path) {
    write_text_file(report_json_string(report), path, "JSON report");
}

}  // namespace ttpc
