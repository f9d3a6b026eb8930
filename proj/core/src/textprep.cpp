#include "ttpc/textprep.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "ttpc/errors.hpp"
#include "ttpc/porter.hpp"
#include "util.hpp"

namespace ttpc {

using detail::ascii_lower;
using detail::has_ascii_letter;
using detail::strip;

const char* to_string(PosTag tag) {
    switch (tag) {
        case PosTag::Noun: return "NOUN";
        case PosTag::Verb: return "VERB";
        case PosTag::Adj: return "ADJ";
        case PosTag::Adv: return "ADV";
        case PosTag::Other: return "OTHER";
    }
    return "OTHER";
}

NormalizerMode normalizer_mode_from_string(const std::string& name) {
    if (name == "stem") return NormalizerMode::stem;
    if (name == "lemma") return NormalizerMode::lemma;
    throw UsageError("unknown normalizer '" + name + "' (expected 'stem' or 'lemma')");
}

const char* to_string(NormalizerMode mode) {
    return mode == NormalizerMode::stem ? "stem" : "lemma";
}

namespace {

PosTag pos_tag_from_string(const std::string& s, const std::filesystem::path& origin) {
    if (s == "NOUN") return PosTag::Noun;
    if (s == "VERB") return PosTag::Verb;
    if (s == "ADJ") return PosTag::Adj;
    if (s == "ADV") return PosTag::Adv;
    if (s == "OTHER") return PosTag::Other;
    throw DataError("unknown part-of-speech tag '" + s + "' in " + origin.string());
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open resource file: " + path.string());
    return in;
}

std::string next_line(std::ifstream& in, bool* ok) {
    std::string line;
    *ok = static_cast<bool>(std::getline(in, line));
    if (*ok && !line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::unordered_set<std::string> read_word_set(const std::filesystem::path& path) {
    std::unordered_set<std::string> out;
    auto in = open_or_throw(path);
    bool ok = true;
    while (true) {
        std::string line = next_line(in, &ok);
        if (!ok) break;
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        out.insert(ascii_lower(line));
    }
    return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

}  // namespace

struct TextResources::Impl {
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> closed_class;
    std::unordered_set<std::string> verb_stems;
    std::unordered_set<std::string> vocab;
    std::unordered_map<std::string, std::vector<std::pair<PosTag, std::string>>> exceptions;

    struct IocRule {
        std::string cls;
        std::regex re;
        std::string placeholder;
    };
    std::vector<IocRule> ioc_rules;
    std::string ioc_version;
};

TextResources TextResources::load(const std::filesystem::path& dir) {
    auto impl = std::make_shared<Impl>();
    impl->stopwords = read_word_set(dir / "stopwords.txt");
    impl->closed_class = read_word_set(dir / "closed_class.txt");
    impl->verb_stems = read_word_set(dir / "verb_stems.txt");
    impl->vocab = read_word_set(dir / "lemma_vocab.txt");

    {
        auto path = dir / "lemma_exceptions.tsv";
        auto in = open_or_throw(path);
        bool ok = true;
        while (true) {
            std::string line = next_line(in, &ok);
            if (!ok) break;
            if (strip(line).empty() || line[0] == '#') continue;
            auto fields = split_tabs(line);
            if (fields.size() != 3)
                throw DataError("malformed exception row (want 3 tab-separated fields): " + line);
            impl->exceptions[ascii_lower(fields[0])].emplace_back(
                pos_tag_from_string(fields[1], path), ascii_lower(fields[2]));
        }
    }

    {
        auto path = dir / "ioc_patterns.tsv";
        auto in = open_or_throw(path);
        static const std::regex version_re(R"(ioc-table\s+(v\d+))");
        bool ok = true;
        while (true) {
            std::string line = next_line(in, &ok);
            if (!ok) break;
            if (line.empty()) continue;
            if (line[0] == '#') {
                std::smatch m;
                if (impl->ioc_version.empty() && std::regex_search(line, m, version_re))
                    impl->ioc_version = m[0].str();
                continue;
            }
            auto fields = split_tabs(line);
            if (fields.size() != 3)
                throw DataError("malformed IoC row (want 3 tab-separated fields): " + line);
            try {
                impl->ioc_rules.push_back(Impl::IocRule{
                    fields[0],
                    std::regex(fields[1], std::regex::ECMAScript | std::regex::icase |
                                              std::regex::optimize),
                    fields[2]});
            } catch (const std::regex_error& e) {
                throw DataError("bad IoC pattern for class '" + fields[0] + "': " + e.what());
            }
        }
        if (impl->ioc_version.empty())
            throw DataError("ioc_patterns.tsv is missing its '# ioc-table vN' version header");
        if (impl->ioc_rules.empty()) throw DataError("ioc_patterns.tsv defines no patterns");
    }

    TextResources res;
    res.impl_ = std::move(impl);
    return res;
}

std::filesystem::path TextResources::default_dir() {
    if (const char* env = std::getenv("TTPC_DATA_DIR"); env && *env) return env;
    return TTPC_SOURCE_DATA_DIR;
}

const TextResources& TextResources::builtin() {
    static const TextResources res = load(default_dir());
    return res;
}

const TextResources::Impl& TextResources::impl() const {
    if (!impl_) throw InternalError("TextResources used before load()");
    return *impl_;
}

bool TextResources::is_stopword(const std::string& lower) const {
    return impl().stopwords.count(lower) != 0;
}

bool TextResources::is_closed_class(const std::string& lower) const {
    return impl().closed_class.count(lower) != 0;
}

bool TextResources::is_verb_stem(const std::string& lower) const {
    return impl().verb_stems.count(lower) != 0;
}

bool TextResources::in_vocab(const std::string& lower) const {
    return impl().vocab.count(lower) != 0;
}

const std::string* TextResources::lemma_exception(const std::string& lower, PosTag pos) const {
    auto it = impl().exceptions.find(lower);
    if (it == impl().exceptions.end()) return nullptr;
    for (const auto& [p, lemma] : it->second)
        if (p == pos) return &lemma;
    return &it->second.front().second;
}

const std::string& TextResources::ioc_table_version() const { return impl().ioc_version; }

namespace {

// Punctuation that greedy patterns (URLs, paths) may swallow at the end of a
// sentence; kept out of the replacement so "visit <url>." tokenizes cleanly.
bool is_trailing_junk(char c) {
    switch (c) {
        case '.':
        case ',':
        case ';':
        case ':':
        case '!':
        case '?':
        case ')':
        case ']':
        case '}':
        case '"':
        case '\'':
            return true;
        default:
            return false;
    }
}

bool boundary_before(const std::string& text, std::size_t pos) {
    if (pos == 0) return true;
    unsigned char prev = static_cast<unsigned char>(text[pos - 1]);
    // Reject matches that start in the middle of a word-ish run so a date
    // like 03/04/2021 is not half a Unix path.
    return !(std::isalnum(prev) || prev == '_' || prev == '.' || prev == '-');
}

}  // namespace

std::string replace_iocs(const std::string& text, const TextResources& res) {
    std::string cur = text;
    for (const auto& rule : res.impl().ioc_rules) {
        std::string out;
        out.reserve(cur.size());
        std::size_t last = 0;
        for (auto it = std::sregex_iterator(cur.begin(), cur.end(), rule.re);
             it != std::sregex_iterator(); ++it) {
            const std::size_t pos = static_cast<std::size_t>(it->position(0));
            const std::size_t full = static_cast<std::size_t>(it->length(0));
            std::size_t len = full;
            while (len > 0 && is_trailing_junk(cur[pos + len - 1])) --len;
            if (len == 0 || !boundary_before(cur, pos)) {
                out.append(cur, last, pos + full - last);
                last = pos + full;
                continue;
            }
            out.append(cur, last, pos - last);
            out.append(rule.placeholder);
            out.append(cur, pos + len, full - len);
            last = pos + full;
        }
        out.append(cur, last, cur.size() - last);
        cur = std::move(out);
    }
    return cur;
}

namespace {

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_joiner(char c) {
    return c == '.' || c == '-' || c == '\'' || c == '&';
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80 && std::isspace(c)) {
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            std::size_t j = i + 1;
            while (j < n) {
                unsigned char d = static_cast<unsigned char>(text[j]);
                if (is_word_char(d)) {
                    ++j;
                } else if (is_joiner(text[j]) && j + 1 < n &&
                           is_word_char(static_cast<unsigned char>(text[j + 1]))) {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push_back(Token{text.substr(i, j - i), PosTag::Other});
            i = j;
        } else {
            out.push_back(Token{std::string(1, text[i]), PosTag::Other});
            ++i;
        }
    }
    return out;
}

namespace {

bool ing_ed_stem_known(const std::string& w, std::size_t strip_len, const TextResources& res) {
    std::string stem = w.substr(0, w.size() - strip_len);
    if (res.is_verb_stem(stem)) return true;
    if (res.is_verb_stem(stem + "e")) return true;
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        res.is_verb_stem(stem.substr(0, stem.size() - 1)))
        return true;
    return false;
}

PosTag tag_one(const std::string& raw, const TextResources& res) {
    std::string w = ascii_lower(raw);
    if (!has_ascii_letter(w)) return PosTag::Other;
    if (res.is_closed_class(w)) return PosTag::Other;
    if (res.is_verb_stem(w)) return PosTag::Verb;
    auto ends = [&w](const char* suffix) { return w.ends_with(suffix); };
    if (w.size() > 3 && ends("ly")) return PosTag::Adv;
    if (w.size() > 4 && (ends("ous") || ends("ful") || ends("ive"))) return PosTag::Adj;
    if (w.size() > 4 && ends("ing") && ing_ed_stem_known(w, 3, res)) return PosTag::Verb;
    if (w.size() > 3 && ends("ed") && ing_ed_stem_known(w, 2, res)) return PosTag::Verb;
    return PosTag::Noun;
}

}  // namespace

void pos_tag(std::vector<Token>& tokens, const TextResources& res) {
    for (auto& t : tokens) t.pos = tag_one(t.text, res);
}

namespace {

bool keepable(const std::string& lower, const TextResources& res) {
    if (lower.size() <= 1) return false;
    if (!has_ascii_letter(lower)) return false;
    return !res.is_stopword(lower);
}

}  // namespace

std::vector<std::string> normalize(const std::vector<Token>& tokens, NormalizerMode mode,
                                   const TextResources& res) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        std::string w = ascii_lower(t.text);
        if (!keepable(w, res)) continue;
        std::string n =
            mode == NormalizerMode::stem ? porter_stem(w) : lemmatize(w, t.pos, res);
        if (!keepable(n, res)) continue;
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<std::string> prepare_text(const std::string& text, NormalizerMode mode,
                                      const TextResources& res) {
    std::vector<Token> tokens = tokenize(replace_iocs(text, res));
    pos_tag(tokens, res);
    return normalize(tokens, mode, res);
}

}  // namespace ttpc
