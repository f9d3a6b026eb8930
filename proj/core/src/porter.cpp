#include "ttpc/porter.hpp"

#include <array>
#include <vector>

namespace ttpc {

namespace {

// Working state for one word. `stem_end` below always means "length of the
// candidate stem", i.e. the word with the matched suffix removed.
struct Stemmer {
    std::string w;

    bool is_consonant(std::size_t i) const {
        char c = w[i];
        switch (c) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !is_consonant(i - 1);
            default:
                return true;
        }
    }

    // Measure of w[0, len): [C](VC)^m[V]
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && is_consonant(i)) ++i;           // optional leading C
        while (i < len) {
            while (i < len && !is_consonant(i)) ++i;      // V run
            if (i >= len) break;
            while (i < len && is_consonant(i)) ++i;       // C run
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i)
            if (!is_consonant(i)) return true;
        return false;
    }

    bool ends_double_consonant(std::size_t len) const {
        return len >= 2 && w[len - 1] == w[len - 2] && is_consonant(len - 1);
    }

    // *o: ends cvc where the final c is not w, x, or y.
    bool ends_cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!is_consonant(len - 3) || is_consonant(len - 2) || !is_consonant(len - 1))
            return false;
        char c = w[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends_with(std::string_view suffix) const {
        return w.size() >= suffix.size() &&
               std::string_view(w).substr(w.size() - suffix.size()) == suffix;
    }

    void replace_suffix(std::size_t suffix_len, std::string_view replacement) {
        w.resize(w.size() - suffix_len);
        w.append(replacement);
    }
};

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Within a step only the rule with the longest matching suffix is
// considered; if its m(stem) > 0 condition fails no other rule of the step
// fires. Rule tables are therefore ordered longest suffix first.
void apply_rules(Stemmer& s, const std::vector<Rule>& rules) {
    for (const auto& r : rules) {
        if (!s.ends_with(r.suffix)) continue;
        std::size_t stem_len = s.w.size() - r.suffix.size();
        if (s.measure(stem_len) > 0)
            s.replace_suffix(r.suffix.size(), r.replacement);
        return;
    }
}

void step1a(Stemmer& s) {
    if (s.ends_with("sses")) s.replace_suffix(4, "ss");
    else if (s.ends_with("ies")) s.replace_suffix(3, "i");
    else if (s.ends_with("ss")) { /* unchanged */ }
    else if (s.ends_with("s")) s.replace_suffix(1, "");
}

void step1b(Stemmer& s) {
    if (s.ends_with("eed")) {
        if (s.measure(s.w.size() - 3) > 0) s.replace_suffix(3, "ee");
        return;
    }
    bool stripped = false;
    if (s.ends_with("ed") && s.has_vowel(s.w.size() - 2)) {
        s.replace_suffix(2, "");
        stripped = true;
    } else if (s.ends_with("ing") && s.has_vowel(s.w.size() - 3)) {
        s.replace_suffix(3, "");
        stripped = true;
    }
    if (!stripped) return;

    if (s.ends_with("at") || s.ends_with("bl") || s.ends_with("iz")) {
        s.w.push_back('e');
    } else if (s.ends_double_consonant(s.w.size())) {
        char c = s.w.back();
        if (c != 'l' && c != 's' && c != 'z') s.w.pop_back();
    } else if (s.measure(s.w.size()) == 1 && s.ends_cvc(s.w.size())) {
        s.w.push_back('e');
    }
}

void step1c(Stemmer& s) {
    if (s.ends_with("y") && s.has_vowel(s.w.size() - 1)) s.w.back() = 'i';
}

const std::vector<Rule>& step2_rules() {
    static const std::vector<Rule> rules = {
        {"ational", "ate"}, {"ization", "ize"}, {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"tional", "tion"},
        {"biliti", "ble"},  {"entli", "ent"},   {"ousli", "ous"},
        {"ation", "ate"},   {"alism", "al"},    {"aliti", "al"},
        {"iviti", "ive"},   {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},
        {"ator", "ate"},    {"eli", "e"},
    };
    return rules;
}

const std::vector<Rule>& step3_rules() {
    static const std::vector<Rule> rules = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"},
        {"iciti", "ic"}, {"ical", "ic"}, {"ness", ""},
        {"ful", ""},
    };
    return rules;
}

void step4(Stemmer& s) {
    static const std::vector<std::string_view> suffixes = {
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent",
        "ion",   "ism",  "ate",  "iti",  "ous",  "ive",  "ize", "al",
        "er",    "ic",   "ou",
    };
    for (auto suf : suffixes) {
        if (!s.ends_with(suf)) continue;
        std::size_t stem_len = s.w.size() - suf.size();
        if (s.measure(stem_len) > 1) {
            if (suf == "ion") {
                char c = stem_len > 0 ? s.w[stem_len - 1] : '\0';
                if (c != 's' && c != 't') return;
            }
            s.replace_suffix(suf.size(), "");
        }
        return;
    }
}

void step5a(Stemmer& s) {
    if (!s.ends_with("e")) return;
    std::size_t stem_len = s.w.size() - 1;
    int m = s.measure(stem_len);
    if (m > 1 || (m == 1 && !s.ends_cvc(stem_len))) s.w.pop_back();
}

void step5b(Stemmer& s) {
    if (s.measure(s.w.size()) > 1 && s.ends_double_consonant(s.w.size()) &&
        s.w.back() == 'l')
        s.w.pop_back();
}

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() < 3) return std::string(word);
    for (char c : word)
        if (c < 'a' || c > 'z') return std::string(word);

    Stemmer s{std::string(word)};
    step1a(s);
    step1b(s);
    step1c(s);
    apply_rules(s, step2_rules());
    apply_rules(s, step3_rules());
    step4(s);
    step5a(s);
    step5b(s);
    return s.w;
}

}  // namespace ttpc
