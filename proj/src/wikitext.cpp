#include "parapedia/wikitext.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace parapedia::wikitext {
namespace {

std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_category_body(std::string_view body) {
    constexpr std::string_view kTag = "category:";
    if (body.size() < kTag.size()) return false;
    for (size_t i = 0; i < kTag.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(body[i])) != kTag[i]) return false;
    }
    return true;
}

// Splits a trailing " (d.dd)" score off the link body. Accepts one or
// more spaces before "(" and 1-2 fraction digits, matching the scored
// link format the calibrated prompts request.
bool split_score(std::string_view body, std::string_view* target, Rational* score) {
    if (body.empty() || body.back() != ')') return false;
    size_t open = body.rfind('(');
    if (open == std::string_view::npos || open == 0) return false;
    std::string_view inside = body.substr(open + 1, body.size() - open - 2);
    if (inside.size() < 3 || inside.size() > 4) return false;  // d.d or d.dd
    if (inside[1] != '.') return false;
    for (size_t i = 0; i < inside.size(); ++i) {
        if (i == 1) continue;
        if (!std::isdigit(static_cast<unsigned char>(inside[i]))) return false;
    }
    size_t space_end = open;
    size_t space_begin = space_end;
    while (space_begin > 0 && body[space_begin - 1] == ' ') --space_begin;
    if (space_begin == space_end) return false;  // no space before "("
    auto parsed = Rational::parse_decimal(inside);
    if (!parsed) return false;
    *target = body.substr(0, space_begin);
    *score = *parsed;
    return true;
}

struct BracketSpan {
    std::string body;
    bool category = false;
};

// Scans [[...]] spans; innermost pair wins, unbalanced fragments are
// skipped and counted as warnings.
std::vector<BracketSpan> scan_brackets(std::string_view text, int* warnings) {
    std::vector<BracketSpan> spans;
    size_t pos = 0;
    while (true) {
        size_t open = text.find("[[", pos);
        if (open == std::string_view::npos) break;
        size_t close = text.find("]]", open + 2);
        size_t inner = text.find("[[", open + 2);
        if (inner != std::string_view::npos && (close == std::string_view::npos || inner < close)) {
            ++*warnings;  // the outer opening never closes before a new one
            pos = inner;
            continue;
        }
        if (close == std::string_view::npos) {
            ++*warnings;
            break;
        }
        std::string body(text.substr(open + 2, close - open - 2));
        bool category = is_category_body(trim(body));
        spans.push_back({std::move(body), category});
        pos = close + 2;
    }
    return spans;
}

}  // namespace

LinkExtraction extract_links(std::string_view text, Strategy strategy) {
    LinkExtraction out;
    for (auto& span : scan_brackets(text, &out.parse_warnings)) {
        if (span.category) continue;
        std::string_view body = span.body;
        size_t pipe = body.find('|');
        if (pipe != std::string_view::npos) body = body.substr(0, pipe);
        body = trim(body);
        if (body.empty()) {
            ++out.parse_warnings;
            continue;
        }
        WikiLink link;
        if (strategy == Strategy::calibrated) {
            std::string_view target;
            Rational score;
            if (split_score(body, &target, &score)) {
                link.target = std::string(trim(target));
                if (score >= Rational(0, 1) && score <= Rational(1, 1)) {
                    link.confidence = score;
                } else {
                    link.malformed = true;
                }
            } else {
                link.target = std::string(body);
                link.malformed = true;  // strict gating happens downstream
            }
        } else {
            link.target = std::string(body);
        }
        out.links.push_back(std::move(link));
    }
    return out;
}

ParsedArticle extract_structure(std::string_view text) {
    ParsedArticle parsed;

    size_t line_start = 0;
    size_t first_heading_pos = std::string_view::npos;
    while (line_start <= text.size()) {
        size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        std::string_view line = trim(text.substr(line_start, line_end - line_start));
        if (line.size() >= 5 && line.substr(0, 2) == "==" && line[2] != '=' &&
            line.substr(line.size() - 2) == "==" && line[line.size() - 3] != '=') {
            std::string_view title = trim(line.substr(2, line.size() - 4));
            if (!title.empty()) {
                parsed.headings.emplace_back(title);
                if (first_heading_pos == std::string_view::npos) first_heading_pos = line_start;
            }
        }
        if (line_end == text.size()) break;
        line_start = line_end + 1;
    }

    size_t bold = text.find("'''");
    parsed.lead_present =
        bold != std::string_view::npos &&
        (first_heading_pos == std::string_view::npos || bold < first_heading_pos);

    size_t infobox = text.find("{{Infobox");
    parsed.has_infobox = infobox != std::string_view::npos &&
                         (bold == std::string_view::npos || infobox < bold);

    int warnings = 0;
    for (auto& span : scan_brackets(text, &warnings)) {
        if (!span.category) continue;
        std::string_view body = trim(span.body);
        body.remove_prefix(std::string_view("Category:").size());
        size_t pipe = body.find('|');
        if (pipe != std::string_view::npos) body = body.substr(0, pipe);
        parsed.categories.emplace_back(trim(body));
    }
    return parsed;
}

bool outline_conformance(const Article& article) {
    return extract_structure(article.wikitext).headings == article.outline;
}

std::string strip_markup(std::string_view text) {
    std::string no_templates;
    no_templates.reserve(text.size());
    int depth = 0;
    for (size_t i = 0; i < text.size();) {
        if (i + 1 < text.size() && text[i] == '{' && text[i + 1] == '{') {
            ++depth;
            i += 2;
            continue;
        }
        if (depth > 0 && i + 1 < text.size() && text[i] == '}' && text[i + 1] == '}') {
            --depth;
            i += 2;
            continue;
        }
        if (depth == 0) no_templates.push_back(text[i]);
        ++i;
    }

    std::string out;
    out.reserve(no_templates.size());
    std::string_view rest = no_templates;
    size_t pos = 0;
    while (pos < rest.size()) {
        if (rest.compare(pos, 2, "[[") == 0) {
            size_t close = rest.find("]]", pos + 2);
            if (close == std::string_view::npos) {
                ++pos;
                continue;
            }
            std::string_view body = rest.substr(pos + 2, close - pos - 2);
            pos = close + 2;
            if (is_category_body(trim(body))) continue;
            size_t pipe = body.find('|');
            if (pipe != std::string_view::npos) {
                out.append(trim(body.substr(pipe + 1)));
            } else {
                std::string_view target;
                Rational score;
                if (split_score(trim(body), &target, &score)) {
                    out.append(trim(target));
                } else {
                    out.append(trim(body));
                }
            }
            continue;
        }
        if (rest.compare(pos, 3, "'''") == 0) {
            pos += 3;
            continue;
        }
        if (rest.compare(pos, 2, "''") == 0) {
            pos += 2;
            continue;
        }
        if (rest[pos] == '=') {
            pos += 1;
            continue;
        }
        out.push_back(rest[pos]);
        ++pos;
    }
    return out;
}

int word_count(std::string_view text) {
    std::istringstream in{strip_markup(text)};
    std::string token;
    int count = 0;
    while (in >> token) ++count;
    return count;
}

std::string render_link(const WikiLink& link) {
    if (link.confidence)
        return "[[" + link.target + " (" + link.confidence->to_decimal_string(2) + ")]]";
    return "[[" + link.target + "]]";
}

}  // namespace parapedia::wikitext
