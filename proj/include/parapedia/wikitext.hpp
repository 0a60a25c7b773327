#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parapedia/domain.hpp"

// Parses generated Wikitext: wikilinks (plain and confidence-scored),
// level-2 headings, categories, infobox presence, word counts.
namespace parapedia::wikitext {

struct LinkExtraction {
    std::vector<WikiLink> links;  // order of first appearance, duplicates kept
    int parse_warnings = 0;       // unbalanced bracket fragments skipped
};

struct ParsedArticle {
    bool lead_present = false;
    std::vector<std::string> headings;
    std::vector<std::string> plain_links;
    std::vector<std::pair<std::string, Rational>> scored_links;
    std::vector<std::string> categories;
    bool has_infobox = false;
};

// Every [[...]] occurrence except [[Category:...]]. Under the calibrated
// strategy a trailing "(d.dd)" inside the brackets is split off as the
// confidence; links missing a score are kept with confidence absent and
// flagged malformed. Pipe-renamed links [[A|B]] yield target A.
LinkExtraction extract_links(std::string_view text, Strategy strategy);

ParsedArticle extract_structure(std::string_view text);

// True iff the article's extracted headings equal its outline exactly.
bool outline_conformance(const Article& article);

// Markup stripped to renderable text: templates removed, links replaced
// by their display form, category tags dropped.
std::string strip_markup(std::string_view text);

// Whitespace-token count of strip_markup(text).
int word_count(std::string_view text);

// Rebuilds the bracket syntax for a link, used by round-trip checks.
std::string render_link(const WikiLink& link);

}  // namespace parapedia::wikitext
