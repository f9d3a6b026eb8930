#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace ttpc {

// Part-of-speech classes used to steer lemmatization. The tagger is a small
// deterministic lexicon + suffix-rule affair, not a statistical model.
enum class PosTag { Noun, Verb, Adj, Adv, Other };

const char* to_string(PosTag tag);

// Revision of the tokenization/normalization rules. Recorded in saved
// pipeline archives and checked on load, so a model never silently runs
// against preprocessing that differs from what it was trained with.
inline constexpr int kTextprepVersion = 1;

// Which normalizer runs after filtering: Porter stemming or rule lemmatization.
enum class NormalizerMode { stem, lemma };

NormalizerMode normalizer_mode_from_string(const std::string& name);
const char* to_string(NormalizerMode mode);

struct Token {
    std::string text;
    PosTag pos = PosTag::Other;
};

// Immutable bundle of word lists and the IoC pattern table. Cheap to copy
// (shared state). Loaded from a data directory containing stopwords.txt,
// closed_class.txt, verb_stems.txt, lemma_exceptions.tsv, lemma_vocab.txt and
// ioc_patterns.tsv.
class TextResources {
public:
    TextResources() = default;

    static TextResources load(const std::filesystem::path& dir);

    // Directory baked in at build time; the TTPC_DATA_DIR environment
    // variable overrides it.
    static std::filesystem::path default_dir();

    // Process-wide instance loaded from default_dir() on first use.
    static const TextResources& builtin();

    bool loaded() const { return impl_ != nullptr; }

    bool is_stopword(const std::string& lower) const;
    bool is_closed_class(const std::string& lower) const;
    bool is_verb_stem(const std::string& lower) const;
    bool in_vocab(const std::string& lower) const;

    // Exception lexicon lookup: exact part of speech first, then any entry
    // for the surface form. Returns nullptr when absent.
    const std::string* lemma_exception(const std::string& lower, PosTag pos) const;

    // Version line of the IoC table ("ioc-table v1"); recorded in saved
    // pipelines so stale archives are refused.
    const std::string& ioc_table_version() const;

    friend std::string replace_iocs(const std::string& text, const TextResources& res);

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;

    const Impl& impl() const;
};

// Replaces indicators of compromise (URLs, email addresses, CVE ids, file
// hashes, registry keys, file paths, domain names, IP addresses) with fixed
// placeholder words. Idempotent: placeholders match none of the patterns.
std::string replace_iocs(const std::string& text, const TextResources& res);

// Splits text into word and punctuation tokens. '.', '-', '\'' and '&' join
// tokens when flanked by word characters ("T1059.001" stays whole); all other
// punctuation becomes single-character tokens.
std::vector<Token> tokenize(const std::string& text);

// Assigns a PosTag to every token in place.
void pos_tag(std::vector<Token>& tokens, const TextResources& res);

// Maps an inflected form to its base form: exception lexicon, then identity
// if the word is already in the vocabulary, then POS-conditioned suffix rules
// whose output must be in the vocabulary, else the word unchanged.
std::string lemmatize(const std::string& word, PosTag pos, const TextResources& res);

// Lowercases, drops stopwords / single characters / tokens without an ASCII
// letter, applies the stemmer or lemmatizer, then filters again so the result
// is a fixed point of the whole function.
std::vector<std::string> normalize(const std::vector<Token>& tokens, NormalizerMode mode,
                                   const TextResources& res);

// Full chain: replace_iocs -> tokenize -> pos_tag -> normalize.
std::vector<std::string> prepare_text(const std::string& text, NormalizerMode mode,
                                      const TextResources& res);

}  // namespace ttpc
