#include <array>
#include <string>

#include "ttpc/textprep.hpp"
#include "util.hpp"

namespace ttpc {

namespace {

struct SuffixRule {
    const char* suffix;
    const char* replacement;
    bool try_undouble;  // also try dropping a doubled final consonant
};

// Rule order matters: the first candidate found in the vocabulary wins.
constexpr std::array<SuffixRule, 6> kNounRules{{
    {"sses", "ss", false},
    {"ies", "y", false},
    {"ves", "fe", false},
    {"ves", "f", false},
    {"es", "", false},
    {"s", "", false},
}};

constexpr std::array<SuffixRule, 7> kVerbRules{{
    {"ies", "y", false},
    {"ing", "", true},
    {"ing", "e", false},
    {"ed", "", true},
    {"ed", "e", false},
    {"es", "", false},
    {"s", "", false},
}};

constexpr std::array<SuffixRule, 6> kAdjRules{{
    {"iest", "y", false},
    {"ier", "y", false},
    {"est", "", true},
    {"est", "e", false},
    {"er", "", true},
    {"er", "e", false},
}};

bool ends_doubled(const std::string& s) {
    return s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2];
}

template <std::size_t N>
const std::string* apply_rules(const std::string& w, const std::array<SuffixRule, N>& rules,
                               const TextResources& res, std::string& storage) {
    for (const auto& rule : rules) {
        const std::string suffix = rule.suffix;
        if (w.size() <= suffix.size() || !w.ends_with(suffix)) continue;
        std::string stem = w.substr(0, w.size() - suffix.size());
        std::string candidate = stem + rule.replacement;
        if (res.in_vocab(candidate)) {
            storage = std::move(candidate);
            return &storage;
        }
        if (rule.try_undouble && ends_doubled(stem)) {
            std::string undoubled = stem.substr(0, stem.size() - 1);
            if (res.in_vocab(undoubled)) {
                storage = std::move(undoubled);
                return &storage;
            }
        }
    }
    return nullptr;
}

}  // namespace

std::string lemmatize(const std::string& word, PosTag pos, const TextResources& res) {
    std::string w = detail::ascii_lower(word);
    if (const std::string* exc = res.lemma_exception(w, pos)) return *exc;
    if (res.in_vocab(w)) return w;

    std::string storage;
    const std::string* hit = nullptr;
    switch (pos) {
        case PosTag::Noun: hit = apply_rules(w, kNounRules, res, storage); break;
        case PosTag::Verb: hit = apply_rules(w, kVerbRules, res, storage); break;
        case PosTag::Adj: hit = apply_rules(w, kAdjRules, res, storage); break;
        case PosTag::Adv:
        case PosTag::Other: break;  // no suffix rules; fall through to identity
    }
    return hit ? *hit : w;
}

}  // namespace ttpc
