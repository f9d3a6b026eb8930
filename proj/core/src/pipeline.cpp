#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "ttpc/digest.hpp"
#include "ttpc/errors.hpp"
#include "ttpc/pipeline.hpp"

namespace ttpc {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Terms must appear in at least this many training documents to enter the
// vocabulary; hapax terms are noise at corpus sizes this pipeline targets.
constexpr std::size_t kMinDocumentFrequency = 2;

const std::vector<std::string>& sample_labels(const LabeledSample& sample,
                                              LabelSpaceKind kind) {
    return kind == LabelSpaceKind::tactics ? sample.tactic_labels
                                           : sample.technique_labels;
}

LabelSpace corpus_label_space(const std::vector<LabeledSample>& corpus,
                              LabelSpaceKind kind) {
    std::set<std::string> labels;
    for (const LabeledSample& sample : corpus) {
        const auto& sl = sample_labels(sample, kind);
        labels.insert(sl.begin(), sl.end());
    }
    if (labels.empty()) {
        throw DataError("corpus carries no " + to_string(kind) +
                        " labels to fit on");
    }
    return LabelSpace::create({labels.begin(), labels.end()}, kind);
}

LabelMatrix label_matrix(const std::vector<LabeledSample>& corpus,
                         const LabelSpace& space, LabelSpaceKind kind) {
    LabelMatrix rows(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        rows[i].assign(space.size(), 0);
        for (const std::string& label : sample_labels(corpus[i], kind)) {
            rows[i][static_cast<std::size_t>(space.index_of(label))] = 1;
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Archive serialization. Every number is written as a JSON number; the JSON
// writer emits the shortest decimal string that parses back to the identical
// double, so round trips are lossless.

ordered_json config_to_json(const PipelineConfig& config) {
    ordered_json out;
    out["normalizer"] = to_string(config.normalizer);
    out["vectorizer"] = to_string(config.vectorizer);
    out["transformation"] = to_string(config.transformation);
    out["classifier"] = to_string(config.classifier);
    out["label_kind"] = to_string(config.label_kind);
    out["seed"] = config.seed;
    return out;
}

PipelineConfig config_from_json(const json& obj) {
    PipelineConfig config;
    config.normalizer =
        normalizer_mode_from_string(obj.at("normalizer").get<std::string>());
    config.vectorizer =
        vectorizer_kind_from_string(obj.at("vectorizer").get<std::string>());
    config.transformation = multilabel_strategy_from_string(
        obj.at("transformation").get<std::string>());
    config.classifier =
        classifier_kind_from_string(obj.at("classifier").get<std::string>());
    config.label_kind =
        label_space_kind_from_string(obj.at("label_kind").get<std::string>());
    config.seed = obj.at("seed").get<std::uint64_t>();
    return config;
}

ordered_json classifier_config_to_json(const ClassifierConfig& config) {
    ordered_json out;
    out["kind"] = to_string(config.kind);
    out["alpha"] = config.alpha;
    out["var_smoothing"] = config.var_smoothing;
    out["C"] = config.C;
    out["gamma"] = config.gamma;
    out["epochs"] = config.epochs;
    out["eta0"] = config.eta0;
    out["decay"] = config.decay;
    out["seed"] = config.seed;
    return out;
}

ClassifierConfig classifier_config_from_json(const json& obj) {
    ClassifierConfig config;
    config.kind = classifier_kind_from_string(obj.at("kind").get<std::string>());
    config.alpha = obj.at("alpha").get<double>();
    config.var_smoothing = obj.at("var_smoothing").get<double>();
    config.C = obj.at("C").get<double>();
    config.gamma = obj.at("gamma").get<double>();
    config.epochs = obj.at("epochs").get<std::size_t>();
    config.eta0 = obj.at("eta0").get<double>();
    config.decay = obj.at("decay").get<double>();
    config.seed = obj.at("seed").get<std::uint64_t>();
    return config;
}

ordered_json fitted_model_to_json(const FittedModel& model) {
    ordered_json out;
    if (const auto* dummy = std::get_if<FittedDummy>(&model)) {
        out["type"] = "dummy";
        out["classes"] = dummy->classes;
        out["frequency"] = dummy->frequency;
    } else if (const auto* mnb = std::get_if<FittedMultinomialNB>(&model)) {
        out["type"] = "multinomial_nb";
        out["classes"] = mnb->classes;
        out["log_prior"] = mnb->log_prior;
        out["feature_log_prob"] = mnb->feature_log_prob;
    } else if (const auto* cnb = std::get_if<FittedComplementNB>(&model)) {
        out["type"] = "complement_nb";
        out["classes"] = cnb->classes;
        out["log_prior"] = cnb->log_prior;
        out["weight"] = cnb->weight;
    } else if (const auto* gnb = std::get_if<FittedGaussianNB>(&model)) {
        out["type"] = "gaussian_nb";
        out["classes"] = gnb->classes;
        out["log_prior"] = gnb->log_prior;
        out["theta"] = gnb->theta;
        out["variance"] = gnb->variance;
    } else if (const auto* svm = std::get_if<FittedLinearSVM>(&model)) {
        out["type"] = "linear_svm";
        out["classes"] = svm->classes;
        out["w"] = svm->w;
        out["b"] = svm->b;
        out["iterations"] = svm->iterations;
        out["objective"] = svm->objective;
    } else if (const auto* rbf = std::get_if<FittedSvcRbf>(&model)) {
        out["type"] = "svc_rbf";
        out["classes"] = rbf->classes;
        out["gamma"] = rbf->gamma;
        out["support_vectors"] = rbf->support_vectors;
        out["dual_coef"] = rbf->dual_coef;
        out["bias"] = rbf->bias;
    } else {
        throw InternalError("unhandled fitted model variant");
    }
    return out;
}

FittedModel fitted_model_from_json(const json& obj) {
    const std::string type = obj.at("type").get<std::string>();
    if (type == "dummy") {
        FittedDummy m;
        m.classes = obj.at("classes").get<std::vector<std::string>>();
        m.frequency = obj.at("frequency").get<std::vector<double>>();
        return m;
    }
    if (type == "multinomial_nb") {
        FittedMultinomialNB m;
        m.classes = obj.at("classes").get<std::vector<std::string>>();
        m.log_prior = obj.at("log_prior").get<std::vector<double>>();
        m.feature_log_prob =
            obj.at("feature_log_prob").get<std::vector<std::vector<double>>>();
        return m;
    }
    if (type == "complement_nb") {
        FittedComplementNB m;
        m.classes = obj.at("classes").get<std::vector<std::string>>();
        m.log_prior = obj.at("log_prior").get<std::vector<double>>();
        m.weight = obj.at("weight").get<std::vector<std::vector<double>>>();
        return m;
    }
    if (type == "gaussian_nb") {
        FittedGaussianNB m;
        m.classes = obj.at("classes").get<std::vector<std::string>>();
        m.log_prior = obj.at("log_prior").get<std::vector<double>>();
        m.theta = obj.at("theta").get<std::vector<std::vector<double>>>();
        m.variance = obj.at("variance").get<std::vector<std::vector<double>>>();
        return m;
    }
    if (type == "linear_svm") {
        FittedLinearSVM m;
        m.classes = obj.at("classes").get<std::vector<std::string>>();
        m.w = obj.at("w").get<std::vector<double>>();
        m.b = obj.at("b").get<double>();
        m.iterations = obj.at("iterations").get<std::size_t>();
        m.objective = obj.at("objective").get<double>();
        return m;
    }
    if (type == "svc_rbf") {
        FittedSvcRbf m;
        m.classes = obj.at("classes").get<std::vector<std::string>>();
        m.gamma = obj.at("gamma").get<double>();
        m.support_vectors =
            obj.at("support_vectors").get<std::vector<std::vector<double>>>();
        m.dual_coef = obj.at("dual_coef").get<std::vector<double>>();
        m.bias = obj.at("bias").get<double>();
        return m;
    }
    throw DataError("archive names unknown fitted model type '" + type + "'");
}

ordered_json vectorizer_state_to_json(const TrainedPipeline& tp) {
    ordered_json out;
    switch (tp.config().vectorizer) {
        case VectorizerKind::onehot:
        case VectorizerKind::tf:
        case VectorizerKind::tfidf: {
            out["terms"] = tp.vocabulary().terms();
            out["df"] = tp.vocabulary().df();
            out["n_docs"] = tp.vocabulary().n_docs();
            if (tp.config().vectorizer == VectorizerKind::tfidf) {
                out["idf"] = tp.idf().values();
            }
            return out;
        }
        case VectorizerKind::doc2vec: {
            const EmbeddingModel& em = tp.embedding();
            ordered_json params;
            params["dim"] = em.params().dim;
            params["window"] = em.params().window;
            params["epochs"] = em.params().epochs;
            params["negative"] = em.params().negative;
            params["alpha"] = em.params().alpha;
            params["min_alpha"] = em.params().min_alpha;
            params["infer_steps"] = em.params().infer_steps;
            params["seed"] = em.params().seed;
            out["params"] = std::move(params);
            out["terms"] = em.vocab_terms();
            out["counts"] = em.vocab_counts();
            out["doc_matrix"] = em.doc_matrix();
            out["word_matrix"] = em.word_matrix();
            return out;
        }
    }
    throw InternalError("unhandled vectorizer kind");
}

ordered_json model_to_json(const MultiLabelModel& model) {
    ordered_json out;
    out["strategy"] = to_string(model.strategy());
    out["seed"] = model.seed();
    out["label_kind"] = to_string(model.label_space().kind());
    out["labels"] = model.label_space().labels();
    out["base_config"] = classifier_config_to_json(model.base_config());
    out["chain_order"] = model.chain_order();
    out["combinations"] = model.combinations();
    ordered_json members = ordered_json::array();
    for (const FittedClassifier& member : model.members()) {
        ordered_json entry;
        entry["config"] = classifier_config_to_json(member.config());
        entry["model"] = fitted_model_to_json(member.model());
        members.push_back(std::move(entry));
    }
    out["members"] = std::move(members);
    return out;
}

MultiLabelModel model_from_json(const json& obj) {
    const MultiLabelStrategy strategy =
        multilabel_strategy_from_string(obj.at("strategy").get<std::string>());
    LabelSpace space = LabelSpace::create(
        obj.at("labels").get<std::vector<std::string>>(),
        label_space_kind_from_string(obj.at("label_kind").get<std::string>()));
    std::vector<FittedClassifier> members;
    for (const json& entry : obj.at("members")) {
        members.emplace_back(classifier_config_from_json(entry.at("config")),
                             fitted_model_from_json(entry.at("model")));
    }
    return MultiLabelModel::from_parts(
        strategy, std::move(space),
        classifier_config_from_json(obj.at("base_config")),
        obj.at("seed").get<std::uint64_t>(),
        obj.at("chain_order").get<std::vector<std::string>>(),
        obj.at("combinations").get<std::vector<std::vector<std::string>>>(),
        std::move(members));
}

}  // namespace

FeatureVector TrainedPipeline::vectorize(
    const std::vector<std::string>& tokens) const {
    switch (config_.vectorizer) {
        case VectorizerKind::onehot:
            return vectorize_onehot(tokens, vocabulary_);
        case VectorizerKind::tf:
            return vectorize_tf(tokens, vocabulary_);
        case VectorizerKind::tfidf:
            return vectorize_tfidf(tokens, vocabulary_, idf_);
        case VectorizerKind::doc2vec:
            return embedding_.infer(tokens, embedding_.params().infer_steps,
                                    config_.seed);
    }
    throw InternalError("unhandled vectorizer kind");
}

PipelinePrediction TrainedPipeline::predict(const std::string& text) const {
    const std::vector<std::string> tokens =
        prepare_text(text, config_.normalizer, resources_);
    PipelinePrediction out;
    if (tokens.empty()) {
        out.empty_after_normalization = true;
        return out;
    }
    const MultiLabelPrediction prediction =
        model_->predict_with_scores(vectorize(tokens));
    out.labels = prediction.labels;
    out.scores = prediction.scores;
    return out;
}

TrainedPipeline fit_pipeline(const PipelineConfig& config,
                             const std::vector<LabeledSample>& corpus,
                             const TextResources& resources,
                             const std::string& created_at) {
    config.validate();
    if (corpus.empty()) {
        throw DataError("cannot fit a pipeline on an empty corpus");
    }

    TokenDocs docs;
    docs.reserve(corpus.size());
    for (const LabeledSample& sample : corpus) {
        docs.push_back(prepare_text(sample.text, config.normalizer, resources));
    }

    const LabelSpace space = corpus_label_space(corpus, config.label_kind);
    const LabelMatrix Y = label_matrix(corpus, space, config.label_kind);

    TrainedPipeline tp;
    tp.config_ = config;
    tp.resources_ = resources;

    std::vector<FeatureVector> X;
    X.reserve(docs.size());
    switch (config.vectorizer) {
        case VectorizerKind::onehot:
        case VectorizerKind::tf:
        case VectorizerKind::tfidf: {
            tp.vocabulary_ = build_vocabulary(docs, kMinDocumentFrequency);
            if (config.vectorizer == VectorizerKind::tfidf) {
                tp.idf_ = fit_tfidf(docs, tp.vocabulary_);
            }
            for (const auto& doc : docs) {
                X.push_back(tp.vectorize(doc));
            }
            break;
        }
        case VectorizerKind::doc2vec: {
            Doc2VecParams params;
            params.seed = config.seed;
            tp.embedding_ = EmbeddingModel::train(docs, params);
            for (std::size_t i = 0; i < docs.size(); ++i) {
                X.push_back(tp.embedding_.doc_vector(i));
            }
            break;
        }
    }

    ClassifierConfig base;
    base.kind = config.classifier;
    base.seed = config.seed;
    tp.model_ = fit_multilabel(config.transformation, X, Y, space, base,
                               config.seed);
    tp.corpus_digest_ = sha256_hex(corpus_jsonl_string(corpus));
    tp.created_at_ = created_at;
    tp.ioc_version_ = resources.ioc_table_version();
    tp.textprep_version_ = kTextprepVersion;
    return tp;
}

std::string pipeline_archive_string(const TrainedPipeline& pipeline) {
    ordered_json archive;
    archive["format"] = "ttpc-pipeline";
    archive["format_version"] = kArchiveFormatVersion;
    archive["created_at"] = pipeline.created_at();
    archive["textprep_version"] = pipeline.textprep_version();
    archive["ioc_table_version"] = pipeline.ioc_table_version();
    archive["corpus_digest"] = pipeline.corpus_digest();
    archive["config"] = config_to_json(pipeline.config());
    archive["vectorizer_state"] = vectorizer_state_to_json(pipeline);
    archive["model"] = model_to_json(pipeline.model());
    return archive.dump() + '\n';
}

void save_pipeline(const TrainedPipeline& pipeline, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot write pipeline archive '" + path + "'");
    }
    out << pipeline_archive_string(pipeline);
}

TrainedPipeline load_pipeline(const std::string& path,
                              const TextResources& resources) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open pipeline archive '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    json archive;
    try {
        archive = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ParseError("pipeline archive '" + path +
                             "' is not valid JSON: " + e.what(),
                         e.byte);
    }
    if (!archive.is_object() ||
        archive.value("format", std::string{}) != "ttpc-pipeline") {
        throw DataError("'" + path + "' is not a pipeline archive");
    }

    try {
        const auto version = archive.at("format_version").get<std::int64_t>();
        if (version != kArchiveFormatVersion) {
            throw DataError("pipeline archive format version " +
                            std::to_string(version) +
                            " is not supported; this build expects version " +
                            std::to_string(kArchiveFormatVersion));
        }
        const auto textprep_version =
            archive.at("textprep_version").get<int>();
        if (textprep_version != kTextprepVersion) {
            throw DataError(
                "pipeline archive was written with text preprocessing "
                "revision " +
                std::to_string(textprep_version) + " but this build uses " +
                std::to_string(kTextprepVersion));
        }
        const auto ioc_version =
            archive.at("ioc_table_version").get<std::string>();
        if (ioc_version != resources.ioc_table_version()) {
            throw DataError("pipeline archive was written with IOC table '" +
                            ioc_version + "' but this build loads '" +
                            resources.ioc_table_version() + "'");
        }

        TrainedPipeline tp;
        tp.config_ = config_from_json(archive.at("config"));
        tp.config_.validate();
        tp.resources_ = resources;
        tp.created_at_ = archive.at("created_at").get<std::string>();
        tp.textprep_version_ = textprep_version;
        tp.ioc_version_ = ioc_version;
        tp.corpus_digest_ = archive.at("corpus_digest").get<std::string>();

        const json& state = archive.at("vectorizer_state");
        switch (tp.config_.vectorizer) {
            case VectorizerKind::onehot:
            case VectorizerKind::tf:
            case VectorizerKind::tfidf: {
                tp.vocabulary_ = Vocabulary::from_parts(
                    state.at("terms").get<std::vector<std::string>>(),
                    state.at("df").get<std::vector<std::uint32_t>>(),
                    state.at("n_docs").get<std::size_t>());
                if (tp.config_.vectorizer == VectorizerKind::tfidf) {
                    tp.idf_ =
                        IdfTable(state.at("idf").get<std::vector<double>>());
                }
                break;
            }
            case VectorizerKind::doc2vec: {
                const json& pj = state.at("params");
                Doc2VecParams params;
                params.dim = pj.at("dim").get<std::size_t>();
                params.window = pj.at("window").get<std::size_t>();
                params.epochs = pj.at("epochs").get<std::size_t>();
                params.negative = pj.at("negative").get<std::size_t>();
                params.alpha = pj.at("alpha").get<double>();
                params.min_alpha = pj.at("min_alpha").get<double>();
                params.infer_steps = pj.at("infer_steps").get<std::size_t>();
                params.seed = pj.at("seed").get<std::uint64_t>();
                tp.embedding_ = EmbeddingModel::from_parts(
                    params, state.at("terms").get<std::vector<std::string>>(),
                    state.at("counts").get<std::vector<std::uint64_t>>(),
                    state.at("doc_matrix").get<std::vector<double>>(),
                    state.at("word_matrix").get<std::vector<double>>());
                break;
            }
        }

        tp.model_ = model_from_json(archive.at("model"));
        return tp;
    } catch (const json::exception& e) {
        throw DataError("pipeline archive '" + path +
                        "' is malformed: " + std::string(e.what()));
    }
}

}  // namespace ttpc
