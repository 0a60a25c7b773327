#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "parapedia/domain.hpp"

// Renders every prompt in the pipeline from external text templates.
// A template file holds <<SYSTEM>> and <<USER>> sections with {name}
// placeholders; the loader checksums every asset so runs can record
// exactly which prompts produced them.
namespace parapedia::prompts {

enum class PromptStage {
    outline,
    elicitation,
    ner,
    arbitration,
    self_grounding,
    claim_extraction,
    verdict,
};

std::string to_string(PromptStage stage);

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    PromptStage stage = PromptStage::outline;
    std::map<std::string, std::string> placeholders_filled;
};

using Context = std::map<std::string, std::string>;

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PromptLibrary {
public:
    // Loads and validates all templates; throws on missing files or
    // unknown placeholder names.
    static PromptLibrary load(const std::filesystem::path& dir);

    // Template chosen by (stage, config.mode, config.strategy). Context must
    // supply the stage's required placeholders (outline_block for
    // elicitation, phrases_block for ner, candidate pair and parent excerpt
    // for arbitration); a missing one raises RenderError.
    PromptBundle render(PromptStage stage, const RunConfig& config, const Subject& subject,
                        const Context& context = {}) const;

    // Fixed instruction string for a persona, identical across stages.
    const std::string& persona_block(Persona persona) const;

    // Per-file checksums (fnv1a64 hex) and a combined digest, recorded in
    // run metadata.
    const std::map<std::string, std::string>& checksums() const { return checksums_; }
    std::string combined_checksum() const;

private:
    std::map<std::string, std::pair<std::string, std::string>> templates_;  // name -> (system, user)
    std::map<Persona, std::string> personas_;
    std::map<std::string, std::string> checksums_;
};

// The JSON {"sections": [...]} shape injected into elicitation prompts.
std::string make_outline_block(const std::vector<std::string>& sections);

// Newline-separated candidate phrases for the NER stage.
std::string make_phrases_block(const std::vector<std::string>& phrases);

}  // namespace parapedia::prompts
