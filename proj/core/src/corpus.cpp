#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ttpc/corpus.hpp"
#include "ttpc/digest.hpp"
#include "ttpc/errors.hpp"

namespace ttpc {
namespace {

// Blank-line separated chunks, each collapsed to single-spaced text.
std::vector<std::string> split_paragraphs(const std::string& text) {
    std::vector<std::string> paragraphs;
    std::string current;
    std::istringstream lines(text);
    std::string line;
    const auto flush = [&]() {
        if (!current.empty()) paragraphs.push_back(current);
        current.clear();
    };
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r\f\v") == std::string::npos) {
            flush();
            continue;
        }
        std::istringstream words(line);
        std::string word;
        while (words >> word) {
            if (!current.empty()) current += ' ';
            current += word;
        }
    }
    flush();
    return paragraphs;
}

std::size_t token_count(const std::string& paragraph) {
    if (paragraph.empty()) return 0;
    return static_cast<std::size_t>(
               std::count(paragraph.begin(), paragraph.end(), ' ')) +
           1;
}

std::vector<std::string> tactic_closure(const std::vector<std::string>& techniques,
                                        const KnowledgeBase& kb) {
    std::set<std::string> tactics;
    for (const std::string& id : techniques) {
        const Technique* technique = kb.technique(id);
        if (technique == nullptr) {
            throw DataError("label index references unknown technique '" + id +
                            "'");
        }
        tactics.insert(technique->tactic_refs.begin(),
                       technique->tactic_refs.end());
    }
    return {tactics.begin(), tactics.end()};
}

std::vector<std::string> string_array_field(const nlohmann::json& obj,
                                            const char* key,
                                            std::size_t line_no) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
        throw DataError("corpus line " + std::to_string(line_no) +
                        " lacks array field '" + key + "'");
    }
    std::vector<std::string> values;
    for (const auto& item : *it) {
        if (!item.is_string()) {
            throw DataError("corpus line " + std::to_string(line_no) +
                            " has a non-string entry in '" + key + "'");
        }
        values.push_back(item.get<std::string>());
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::string string_field_required(const nlohmann::json& obj, const char* key,
                                  std::size_t line_no) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw DataError("corpus line " + std::to_string(line_no) +
                        " lacks string field '" + key + "'");
    }
    return it->get<std::string>();
}

}  // namespace

std::vector<LabeledSample> build_corpus(
    const std::vector<RawDocument>& docs, const std::vector<std::string>& texts,
    const LabelIndex& index, const KnowledgeBase& kb,
    const CorpusOptions& options, std::vector<std::string>* skipped_urls) {
    if (docs.size() != texts.size()) {
        throw DataError("got " + std::to_string(docs.size()) +
                        " documents but " + std::to_string(texts.size()) +
                        " extracted texts");
    }
    std::vector<LabeledSample> samples;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const RawDocument& doc = docs[d];
        if (doc.fetch_status != FetchStatus::ok) continue;
        const auto entry = index.find(doc.url);
        if (entry == index.end()) {
            throw DataError("no label index entry for '" + doc.url + "'");
        }
        const std::vector<std::string> tactics =
            tactic_closure(entry->second.techniques, kb);

        const std::vector<std::string> paragraphs = split_paragraphs(texts[d]);
        bool survived = false;
        for (std::size_t ordinal = 0; ordinal < paragraphs.size(); ++ordinal) {
            if (token_count(paragraphs[ordinal]) < options.min_tokens) continue;
            LabeledSample sample;
            sample.sample_id =
                sha256_hex(doc.url + "#" + std::to_string(ordinal));
            sample.text = paragraphs[ordinal];
            sample.tactic_labels = tactics;
            sample.technique_labels = entry->second.techniques;
            sample.origin_url = doc.url;
            samples.push_back(std::move(sample));
            survived = true;
        }
        if (!survived && skipped_urls != nullptr) {
            skipped_urls->push_back(doc.url);
        }
    }
    return samples;
}

std::string corpus_jsonl_string(const std::vector<LabeledSample>& samples) {
    std::string out;
    for (const LabeledSample& sample : samples) {
        nlohmann::ordered_json obj;
        obj["id"] = sample.sample_id;
        obj["text"] = sample.text;
        obj["tactics"] = sample.tactic_labels;
        obj["techniques"] = sample.technique_labels;
        obj["url"] = sample.origin_url;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void write_corpus_jsonl(const std::vector<LabeledSample>& samples,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot write corpus file '" + path + "'");
    }
    out << corpus_jsonl_string(samples);
}

std::vector<LabeledSample> read_corpus_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open corpus file '" + path + "'");
    }
    std::vector<LabeledSample> samples;
    std::string line;
    std::size_t line_no = 0;
    std::size_t line_start = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t this_start = line_start;
        line_start += line.size() + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("corpus line " + std::to_string(line_no) +
                                 " is not valid JSON: " + e.what(),
                             this_start + e.byte);
        }
        if (!obj.is_object()) {
            throw DataError("corpus line " + std::to_string(line_no) +
                            " is not a JSON object");
        }
        LabeledSample sample;
        sample.sample_id = string_field_required(obj, "id", line_no);
        sample.text = string_field_required(obj, "text", line_no);
        sample.tactic_labels = string_array_field(obj, "tactics", line_no);
        sample.technique_labels = string_array_field(obj, "techniques", line_no);
        sample.origin_url = string_field_required(obj, "url", line_no);
        if (sample.text.find_first_not_of(" \t") == std::string::npos) {
            throw DataError("corpus line " + std::to_string(line_no) +
                            " has empty text");
        }
        if (sample.technique_labels.empty()) {
            throw DataError("corpus line " + std::to_string(line_no) +
                            " has no technique labels");
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

}  // namespace ttpc
