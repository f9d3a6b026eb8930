#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ttpc/attck.hpp"
#include "ttpc/harvest.hpp"

namespace ttpc {

// One training sample: a single paragraph carrying its source document's
// labels.  tactic_labels is always the union of the technique labels'
// tactic_refs in the knowledge base the corpus was built from.
struct LabeledSample {
    std::string sample_id;
    std::string text;
    std::vector<std::string> tactic_labels;     // sorted unique
    std::vector<std::string> technique_labels;  // sorted unique, non-empty
    std::string origin_url;
};

struct CorpusOptions {
    // Paragraphs with fewer whitespace-delimited tokens are dropped.
    std::size_t min_tokens = 5;
};

// Splits each successfully harvested document's text into blank-line
// separated paragraphs and labels every surviving paragraph with the
// document's label-index entry (tactics recomputed from the knowledge base,
// so label closure holds by construction).  `texts` is aligned with `docs`;
// entries for non-ok documents are ignored.  Documents whose paragraphs all
// fall below min_tokens are skipped and recorded in `skipped_urls` when
// given.  sample_id = SHA-256 of "url#ordinal" with the paragraph's 0-based
// position in its document.
std::vector<LabeledSample> build_corpus(
    const std::vector<RawDocument>& docs, const std::vector<std::string>& texts,
    const LabelIndex& index, const KnowledgeBase& kb,
    const CorpusOptions& options = {},
    std::vector<std::string>* skipped_urls = nullptr);

// JSON-lines corpus I/O.  Each line is one object with keys exactly in the
// order {"id","text","tactics","techniques","url"}, so identical inputs
// produce byte-identical files.
void write_corpus_jsonl(const std::vector<LabeledSample>& samples,
                        const std::string& path);
std::vector<LabeledSample> read_corpus_jsonl(const std::string& path);

// The exact bytes write_corpus_jsonl would put on disk.  Trained pipelines
// record sha256(corpus_jsonl_string(samples)) so an archive can be tied back
// to its training corpus file.
std::string corpus_jsonl_string(const std::vector<LabeledSample>& samples);

}  // namespace ttpc
