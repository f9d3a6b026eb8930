#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "ttpc/errors.hpp"
#include "ttpc/harvest.hpp"

namespace ttpc {
namespace {

// Containers whose entire content is invisible boilerplate.
const std::set<std::string>& skip_containers() {
    static const std::set<std::string> kSet = {"script",   "style",   "nav",
                                               "head",     "noscript", "template"};
    return kSet;
}

// Tags that start or end a block of text; each occurrence becomes a
// paragraph boundary.
const std::set<std::string>& block_tags() {
    static const std::set<std::string> kSet = {
        "p",      "div",     "li",         "ul",     "ol",     "h1",
        "h2",     "h3",      "h4",         "h5",     "h6",     "tr",
        "table",  "thead",   "tbody",      "td",     "th",     "blockquote",
        "pre",    "section", "article",    "header", "footer", "main",
        "aside",  "figure",  "figcaption", "dl",     "dt",     "dd",
        "form",   "hr"};
    return kSet;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Index just past the tag's '>', honouring quoted attribute values.
std::size_t scan_past_tag(const std::string& s, std::size_t i) {
    bool in_single = false, in_double = false;
    for (std::size_t j = i + 1; j < s.size(); ++j) {
        const char c = s[j];
        if (in_single) {
            if (c == '\'') in_single = false;
        } else if (in_double) {
            if (c == '"') in_double = false;
        } else if (c == '\'') {
            in_single = true;
        } else if (c == '"') {
            in_double = true;
        } else if (c == '>') {
            return j + 1;
        }
    }
    return s.size();
}

std::string tag_name_at(const std::string& s, std::size_t i, bool& closing) {
    std::size_t j = i + 1;
    closing = j < s.size() && s[j] == '/';
    if (closing) ++j;
    std::string name;
    while (j < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[j])) != 0)) {
        name += static_cast<char>(
            std::tolower(static_cast<unsigned char>(s[j])));
        ++j;
    }
    return name;
}

bool self_closing(const std::string& s, std::size_t tag_start,
                  std::size_t tag_end) {
    return tag_end >= 2 && tag_end > tag_start && s[tag_end - 2] == '/';
}

// Skips a container element, honouring nesting for generic containers;
// script and style end at their first closing tag, as in HTML itself.
std::size_t skip_container(const std::string& html, const std::string& lower,
                           const std::string& name, std::size_t from) {
    if (name == "script" || name == "style") {
        const std::size_t close = lower.find("</" + name, from);
        if (close == std::string::npos) return html.size();
        return scan_past_tag(html, close);
    }
    std::size_t depth = 1;
    std::size_t i = from;
    while (i < html.size()) {
        i = html.find('<', i);
        if (i == std::string::npos) return html.size();
        bool closing = false;
        const std::string tag = tag_name_at(html, i, closing);
        const std::size_t end = scan_past_tag(html, i);
        if (tag == name) {
            if (closing) {
                if (--depth == 0) return end;
            } else if (!self_closing(html, i, end)) {
                ++depth;
            }
        }
        i = end;
    }
    return html.size();
}

void append_codepoint(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out += static_cast<char>(cp);
    } else if (cp <= 0x7FF) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0xFFFF) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the entity starting at `i` ('&'); returns the index after it and
// appends the decoded text, or appends a literal '&' for unknown forms.
std::size_t decode_entity(const std::string& s, std::size_t i,
                          std::string& out) {
    const std::size_t semi = s.find(';', i + 1);
    if (semi == std::string::npos || semi - i > 12) {
        out += '&';
        return i + 1;
    }
    const std::string body = s.substr(i + 1, semi - i - 1);
    if (body == "amp") {
        out += '&';
    } else if (body == "lt") {
        out += '<';
    } else if (body == "gt") {
        out += '>';
    } else if (body == "quot") {
        out += '"';
    } else if (body == "apos") {
        out += '\'';
    } else if (body == "nbsp") {
        out += ' ';
    } else if (body.size() > 1 && body[0] == '#') {
        std::uint32_t cp = 0;
        bool valid = body.size() > 1;
        if (body[1] == 'x' || body[1] == 'X') {
            valid = body.size() > 2;
            for (std::size_t k = 2; valid && k < body.size(); ++k) {
                const char c = body[k];
                if (!std::isxdigit(static_cast<unsigned char>(c))) {
                    valid = false;
                } else {
                    cp = cp * 16 +
                         static_cast<std::uint32_t>(
                             std::isdigit(static_cast<unsigned char>(c))
                                 ? c - '0'
                                 : std::tolower(c) - 'a' + 10);
                }
                if (cp > 0x10FFFF) valid = false;
            }
        } else {
            for (std::size_t k = 1; valid && k < body.size(); ++k) {
                if (!std::isdigit(static_cast<unsigned char>(body[k]))) {
                    valid = false;
                } else {
                    cp = cp * 10 + static_cast<std::uint32_t>(body[k] - '0');
                }
                if (cp > 0x10FFFF) valid = false;
            }
        }
        if (!valid || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out += '&';
            return i + 1;
        }
        append_codepoint(out, cp == 0xA0 ? 0x20 : cp);
    } else {
        out += '&';
        return i + 1;
    }
    return semi + 1;
}

// Collapses every whitespace run (including non-breaking spaces) to one
// space and trims the ends.
std::string normalize_paragraph(const std::string& raw) {
    std::string out;
    bool pending_space = false;
    std::size_t i = 0;
    while (i < raw.size()) {
        const unsigned char c = static_cast<unsigned char>(raw[i]);
        const bool nbsp = c == 0xC2 && i + 1 < raw.size() &&
                          static_cast<unsigned char>(raw[i + 1]) == 0xA0;
        if (nbsp || (c < 0x80 && std::isspace(c) != 0)) {
            pending_space = !out.empty();
            i += nbsp ? 2 : 1;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += raw[i];
        ++i;
    }
    return out;
}

std::string strip_html(const std::string& html) {
    const std::string lower = lowercase(html);
    std::vector<std::string> paragraphs;
    std::string current;
    const auto flush = [&paragraphs, &current]() {
        std::string text = normalize_paragraph(current);
        current.clear();
        if (!text.empty()) paragraphs.push_back(std::move(text));
    };

    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        if (c == '<') {
            if (html.compare(i, 4, "<!--") == 0) {
                const std::size_t end = html.find("-->", i + 4);
                i = end == std::string::npos ? html.size() : end + 3;
                continue;
            }
            if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
                // <!DOCTYPE ...>, <![CDATA[...]]>, <?xml ...?> declarations
                i = scan_past_tag(html, i);
                continue;
            }
            bool closing = false;
            const std::string name = tag_name_at(html, i, closing);
            if (name.empty() && !closing) {
                current += '<';  // stray '<' is text, not markup
                ++i;
                continue;
            }
            const std::size_t end = scan_past_tag(html, i);
            if (!closing && skip_containers().count(name) != 0) {
                flush();
                i = self_closing(html, i, end)
                        ? end
                        : skip_container(html, lower, name, end);
                continue;
            }
            if (name == "br") {
                current += '\n';
            } else if (block_tags().count(name) != 0) {
                flush();
            }
            i = end;
        } else if (c == '&') {
            i = decode_entity(html, i, current);
        } else {
            current += c;
            ++i;
        }
    }
    flush();

    std::string out;
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
        if (p > 0) out += "\n\n";
        out += paragraphs[p];
    }
    return out;
}

}  // namespace

std::string extract_text(const RawDocument& doc, const std::string& payload) {
    if (doc.media_type == MediaType::pdf) {
        throw DataError("pdf text sidecar required for '" + doc.url + "'");
    }
    if (!is_valid_utf8(payload)) {
        throw DataError("document '" + doc.url + "' is not valid UTF-8");
    }
    if (doc.media_type == MediaType::plaintext) {
        return payload;
    }
    return strip_html(payload);
}

}  // namespace ttpc
