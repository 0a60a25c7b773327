#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Stage 1 of sanitization: maps surface forms to canonical keys.
// canonicalize applies NFKC, full case-folding, punctuation removal
// (each punctuation character becomes a space so token boundaries
// survive), whitespace collapsing, and a final composition pass that
// keeps the function idempotent.
namespace parapedia::canonical {

std::string canonicalize(std::string_view name);

// True when canonicalize(name) is empty, i.e. the input carried no
// usable characters (all punctuation/whitespace). Such candidates
// cannot be keyed and are rejected by callers.
bool is_unusable(std::string_view name);

// Full Unicode uppercase; used by case-insensitivity property tests.
std::string uppercase(std::string_view text);

// Unicode plumbing shared with tests and the wikitext tokenizer.
std::vector<uint32_t> utf8_decode(std::string_view text);
std::string utf8_encode(const std::vector<uint32_t>& codepoints);
std::vector<uint32_t> normalize_nfkc(const std::vector<uint32_t>& in);
std::vector<uint32_t> normalize_nfc(const std::vector<uint32_t>& in);
bool is_punctuation(uint32_t cp);
bool is_whitespace(uint32_t cp);
bool nfd_contains(uint32_t cp, uint32_t wanted);

}  // namespace parapedia::canonical
