#include "parapedia/prompts.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "parapedia/hashing.hpp"

namespace parapedia::prompts {
namespace {

constexpr std::array<std::string_view, 13> kKnownPlaceholders = {
    "subject_name",   "root_subject",  "avg_words_per_article", "outline_block",
    "phrases_block",  "persona_block", "grounding_block",       "candidate_name",
    "existing_name",  "parent_excerpt", "claim",                "evidence_block",
    "article_text",
};

bool is_known_placeholder(std::string_view name) {
    for (auto p : kKnownPlaceholders)
        if (p == name) return true;
    return name == "confidence_threshold";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read template asset: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim_trailing_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

// Finds {token} spans where token is a lowercase identifier.
std::vector<std::pair<size_t, std::string>> find_placeholders(std::string_view text) {
    std::vector<std::pair<size_t, std::string>> out;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        size_t j = i + 1;
        while (j < text.size() && (std::islower(static_cast<unsigned char>(text[j])) || text[j] == '_'))
            ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}') {
            out.emplace_back(i, std::string(text.substr(i + 1, j - i - 1)));
            i = j;
        }
    }
    return out;
}

std::string substitute(std::string_view text, const std::map<std::string, std::string>& values,
                       std::map<std::string, std::string>* used) {
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    for (const auto& [at, name] : find_placeholders(text)) {
        auto it = values.find(name);
        if (it == values.end())
            throw RenderError("missing required placeholder {" + name + "}");
        out.append(text.substr(pos, at - pos));
        out.append(it->second);
        (*used)[name] = it->second;
        pos = at + name.size() + 2;
    }
    out.append(text.substr(pos));
    return out;
}

}  // namespace

std::string to_string(PromptStage stage) {
    switch (stage) {
        case PromptStage::outline: return "outline";
        case PromptStage::elicitation: return "elicitation";
        case PromptStage::ner: return "ner";
        case PromptStage::arbitration: return "arbitration";
        case PromptStage::self_grounding: return "self_grounding";
        case PromptStage::claim_extraction: return "claim_extraction";
        case PromptStage::verdict: return "verdict";
    }
    return "outline";
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
    PromptLibrary lib;

    auto load_one = [&](const std::string& name) {
        std::string raw = read_file(dir / (name + ".txt"));
        lib.checksums_[name + ".txt"] = [&] {
            char buf[17];
            snprintf(buf, sizeof buf, "%016llx",
                     static_cast<unsigned long long>(fnv1a64(raw)));
            return std::string(buf);
        }();
        constexpr std::string_view kSys = "<<SYSTEM>>\n";
        constexpr std::string_view kUser = "\n<<USER>>\n";
        size_t sys_at = raw.find(kSys);
        size_t user_at = raw.find(kUser);
        if (sys_at != 0 || user_at == std::string::npos)
            throw std::runtime_error("template " + name + " lacks <<SYSTEM>>/<<USER>> sections");
        std::string system = raw.substr(kSys.size(), user_at - kSys.size());
        std::string user = trim_trailing_newline(raw.substr(user_at + kUser.size()));
        for (const auto& [pos, ph] : find_placeholders(system + "\n" + user)) {
            (void)pos;
            if (!is_known_placeholder(ph))
                throw std::runtime_error("template " + name + " uses unknown placeholder {" + ph + "}");
        }
        lib.templates_[name] = {std::move(system), std::move(user)};
    };

    for (std::string stage : {"elicitation", "ner"})
        for (std::string mode : {"general", "topic"})
            for (std::string strategy : {"baseline", "calibrated"})
                load_one(stage + "_" + mode + "_" + strategy);
    for (std::string mode : {"general", "topic"}) load_one("outline_" + mode);
    for (std::string name : {"arbitration", "self_grounding", "claim_extraction", "verdict"})
        load_one(name);

    for (auto [persona, file] :
         {std::pair{Persona::scientific_neutral, "persona_scientific_neutral"},
          std::pair{Persona::left_leaning, "persona_left_leaning"},
          std::pair{Persona::conservative, "persona_conservative"}}) {
        std::string raw = read_file(dir / (std::string(file) + ".txt"));
        lib.checksums_[std::string(file) + ".txt"] = [&] {
            char buf[17];
            snprintf(buf, sizeof buf, "%016llx",
                     static_cast<unsigned long long>(fnv1a64(raw)));
            return std::string(buf);
        }();
        lib.personas_[persona] = trim_trailing_newline(std::move(raw));
    }
    return lib;
}

const std::string& PromptLibrary::persona_block(Persona persona) const {
    return personas_.at(persona);
}

std::string PromptLibrary::combined_checksum() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [name, sum] : checksums_) {
        h = fnv1a64(name, h);
        h = fnv1a64(sum, h);
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PromptBundle PromptLibrary::render(PromptStage stage, const RunConfig& config,
                                   const Subject& subject, const Context& context) const {
    std::string mode = config.mode == RunMode::topic_focused ? "topic" : "general";
    std::string strategy = config.strategy == Strategy::calibrated ? "calibrated" : "baseline";
    std::string name = to_string(stage);

    // Resolution order: stage_mode_strategy, stage_mode, stage.
    const std::pair<std::string, std::string>* tmpl = nullptr;
    for (const std::string& candidate :
         {name + "_" + mode + "_" + strategy, name + "_" + mode, name}) {
        auto it = templates_.find(candidate);
        if (it != templates_.end()) {
            tmpl = &it->second;
            break;
        }
    }
    if (!tmpl) throw RenderError("no template for stage " + name);

    std::map<std::string, std::string> values;
    for (const auto& [k, v] : context) values[k] = v;
    values["subject_name"] = subject.name;
    if (config.root_subject) values["root_subject"] = *config.root_subject;
    values["avg_words_per_article"] = std::to_string(config.avg_words_per_article);
    values["confidence_threshold"] = config.confidence_threshold.to_exact_string();
    values["persona_block"] = personas_.at(config.persona);
    if (!values.count("grounding_block")) values["grounding_block"] = "";

    PromptBundle bundle;
    bundle.stage = stage;
    bundle.system_text = substitute(tmpl->first, values, &bundle.placeholders_filled);
    bundle.user_text = substitute(tmpl->second, values, &bundle.placeholders_filled);
    return bundle;
}

std::string make_outline_block(const std::vector<std::string>& sections) {
    Json j;
    j["sections"] = sections;
    return j.dump();
}

std::string make_phrases_block(const std::vector<std::string>& phrases) {
    std::string out;
    for (size_t i = 0; i < phrases.size(); ++i) {
        if (i) out += '\n';
        out += phrases[i];
    }
    return out;
}

}  // namespace parapedia::prompts
