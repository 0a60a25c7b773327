#include "parapedia/mock_backend.hpp"

#include <cmath>
#include <sstream>

#include "parapedia/canonical.hpp"
#include "parapedia/hashing.hpp"

namespace parapedia::mock {

using gateway::BackendError;
using gateway::FailureKind;
using gateway::GenerationRequest;
using prompts::PromptStage;

std::string ScriptedBackend::complete(const GenerationRequest& request) {
    {
        std::lock_guard lock(mu_);
        ++calls_;
        if (fail_remaining_ > 0) {
            --fail_remaining_;
            throw BackendError("scripted failure", fail_kind_);
        }
    }
    return handler_(request);
}

void ScriptedBackend::fail_next(int times, FailureKind kind) {
    std::lock_guard lock(mu_);
    fail_remaining_ = times;
    fail_kind_ = kind;
}

int ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

namespace {

// Subject names carry their hop so the world stays a pure function of the
// name: seed articles mint "Hub Entity k" children (hop 1), later hops
// mint "Entity <hop> ..." children.
int parse_hop(const std::string& name) {
    if (name.rfind("Hub Entity ", 0) == 0) return 1;
    if (name.rfind("Entity ", 0) == 0) {
        size_t pos = 7;
        int hop = 0;
        bool any = false;
        while (pos < name.size() && isdigit(static_cast<unsigned char>(name[pos]))) {
            hop = hop * 10 + (name[pos] - '0');
            ++pos;
            any = true;
        }
        if (any && pos < name.size() && name[pos] == ' ') return hop;
    }
    return 0;
}

std::string hex8(uint64_t h) {
    char buf[9];
    snprintf(buf, sizeof buf, "%08llX", static_cast<unsigned long long>(h & 0xFFFFFFFFull));
    return buf;
}

double hash01(uint64_t seed, const std::string& text) {
    return (splitmix64(seed ^ fnv1a64(text)) >> 11) * 0x1.0p-53;
}

}  // namespace

SyntheticCorpusBackend::SyntheticCorpusBackend(uint64_t seed, SyntheticWorldOptions options)
    : seed_(seed), options_(std::move(options)) {
    generic_pool_ = {
        "engineer",        "inventor",       "science administrator", "public policy",
        "industrial research", "economy",    "higher education",      "military strategy",
        "technology",      "bureaucracy",    "scientific method",     "infrastructure",
    };
}

bool SyntheticCorpusBackend::is_generic(const std::string& phrase) const {
    for (const auto& g : generic_pool_)
        if (g == phrase) return true;
    return false;
}

std::vector<std::string> SyntheticCorpusBackend::children(const std::string& subject_name) const {
    std::vector<std::string> out;
    int hop = parse_hop(subject_name);
    int child_hop = hop + 1;
    std::string key = canonical::canonicalize(subject_name);
    SplitMixRng rng(derive_seed(seed_, "links:" + key));
    for (int i = 0; i < options_.links_per_article; ++i) {
        if (hop == 0) {
            // The seed article mints the hub layer.
            out.push_back("Hub Entity " + std::to_string(i + 1));
            continue;
        }
        double r = rng.next_double();
        if (r < options_.generic_rate) {
            out.push_back(generic_pool_[rng.next_below(generic_pool_.size())]);
        } else if (r < options_.generic_rate + options_.committed_dup_rate) {
            out.push_back("Hub Entity " +
                          std::to_string(1 + rng.next_below(options_.links_per_article)));
        } else if (r < options_.generic_rate + options_.committed_dup_rate +
                           options_.shared_child_rate) {
            out.push_back("Entity " + std::to_string(child_hop) + " Shared " +
                          std::to_string(rng.next_below(options_.shared_pool_size)));
        } else {
            uint64_t h = splitmix64(derive_seed(seed_, "fresh:" + key) + i);
            out.push_back("Entity " + std::to_string(child_hop) + " " + hex8(h));
        }
    }
    if (options_.emit_loop_link) out.push_back("History of " + subject_name);
    return out;
}

std::string SyntheticCorpusBackend::match_key(const GenerationRequest& request) const {
    const auto& filled = request.bundle.placeholders_filled;
    switch (request.bundle.stage) {
        case PromptStage::arbitration: {
            auto it = filled.find("candidate_name");
            return it == filled.end() ? "" : it->second;
        }
        case PromptStage::verdict: {
            auto it = filled.find("claim");
            return it == filled.end() ? "" : it->second;
        }
        default: {
            auto it = filled.find("subject_name");
            return it == filled.end() ? "" : it->second;
        }
    }
}

void SyntheticCorpusBackend::maybe_fail(const GenerationRequest& request) {
    std::lock_guard lock(mu_);
    auto stage = request.bundle.stage;
    auto it = transient_failures_.find(stage);
    if (it != transient_failures_.end() && it->second > 0) {
        --it->second;
        throw BackendError("injected transient failure", FailureKind::transient);
    }
    auto always = always_fail_.find(stage);
    if (always != always_fail_.end() && always->second.count(match_key(request)))
        throw BackendError("injected persistent failure", FailureKind::transient);
}

void SyntheticCorpusBackend::fail_transient(PromptStage stage, int times) {
    std::lock_guard lock(mu_);
    transient_failures_[stage] += times;
}

void SyntheticCorpusBackend::always_fail(PromptStage stage, const std::string& match) {
    std::lock_guard lock(mu_);
    always_fail_[stage].insert(match);
}

void SyntheticCorpusBackend::garble_replies(PromptStage stage, const std::string& match) {
    std::lock_guard lock(mu_);
    garbled_[stage].insert(match);
}

void SyntheticCorpusBackend::declare_same(const std::string& canonical_a,
                                          const std::string& canonical_b) {
    std::lock_guard lock(mu_);
    same_pairs_.insert({canonical_a, canonical_b});
    same_pairs_.insert({canonical_b, canonical_a});
}

std::string SyntheticCorpusBackend::complete(const GenerationRequest& request) {
    maybe_fail(request);
    {
        std::lock_guard lock(mu_);
        auto g = garbled_.find(request.bundle.stage);
        if (g != garbled_.end() && g->second.count(match_key(request)))
            return "this is not the JSON you were promised";
    }
    switch (request.bundle.stage) {
        case PromptStage::outline: return handle_outline(request);
        case PromptStage::elicitation: return handle_elicitation(request);
        case PromptStage::ner: return handle_ner(request);
        case PromptStage::arbitration: return handle_arbitration(request);
        case PromptStage::self_grounding: return handle_self_grounding(request);
        case PromptStage::claim_extraction: return handle_claims(request);
        case PromptStage::verdict: return handle_verdict(request);
    }
    throw BackendError("unhandled stage", FailureKind::permanent);
}

std::string SyntheticCorpusBackend::handle_outline(const GenerationRequest& request) const {
    const auto& filled = request.bundle.placeholders_filled;
    std::string subject = filled.at("subject_name");
    std::vector<std::string> sections = {"Overview", "Origins", "Key Contributions",
                                         "Relationships", "Recognition", "Legacy"};
    sections.resize(std::max(2, options_.sections));
    for (auto& s : sections)
        if (s.empty()) s = "Aspect " + hex8(fnv1a64(subject));
    auto root = filled.find("root_subject");
    if (root != filled.end()) sections[sections.size() / 2] = "Role within " + root->second;
    Json j;
    j["sections"] = sections;
    return j.dump();
}

std::string SyntheticCorpusBackend::handle_elicitation(const GenerationRequest& request) const {
    const auto& filled = request.bundle.placeholders_filled;
    std::string subject = filled.at("subject_name");
    bool calibrated = request.bundle.user_text.find("(score)") != std::string::npos ||
                      request.bundle.system_text.find("CALIBRATED") != std::string::npos;

    std::vector<std::string> sections;
    auto ob = filled.find("outline_block");
    if (ob != filled.end()) {
        Json j = Json::parse(ob->second);
        sections = j.at("sections").get<std::vector<std::string>>();
    }

    std::vector<std::string> links = children(subject);
    auto link_markup = [&](size_t i) {
        if (!calibrated) return "[[" + links[i] + "]]";
        Rational score = options_.confidence_cycle.empty()
                             ? Rational(75 + static_cast<int64_t>(
                                                 splitmix64(fnv1a64(links[i])) % 25),
                                        100)
                             : options_.confidence_cycle[i % options_.confidence_cycle.size()];
        return "[[" + links[i] + " (" + score.to_decimal_string(2) + ")]]";
    };

    std::ostringstream w;
    if (options_.emit_infobox) {
        w << "{{Infobox synthetic\n| name = " << subject << "\n| kind = generated\n}}\n";
    }
    w << "'''" << subject << "''' is a subject materialized from parametric memory";
    size_t li = 0;
    if (links.size() >= 2) {
        w << ", associated with " << link_markup(0) << " and " << link_markup(1);
        li = 2;
    }
    w << ". It anchors wave-level expansion in the synthetic corpus.\n";
    for (size_t s = 0; s < sections.size(); ++s) {
        w << "\n== " << sections[s] << " ==\n";
        w << "The record of " << subject << " under this heading is stable across runs.";
        size_t quota = (links.size() - li + (sections.size() - s - 1)) / (sections.size() - s);
        for (size_t k = 0; k < quota && li < links.size(); ++k, ++li)
            w << " It connects to " << link_markup(li) << " in the expansion graph.";
        w << "\n";
    }
    if (options_.emit_categories) w << "\n[[Category:Synthetic subjects]]\n";
    return w.str();
}

std::string SyntheticCorpusBackend::handle_ner(const GenerationRequest& request) const {
    const auto& filled = request.bundle.placeholders_filled;
    bool calibrated = request.bundle.system_text.find("CALIBRATED") != std::string::npos ||
                      request.bundle.system_text.find("CONFIDENCE GUIDELINES") != std::string::npos;
    std::istringstream lines(filled.at("phrases_block"));
    Json verdicts = Json::array();
    std::string phrase;
    while (std::getline(lines, phrase)) {
        if (phrase.empty()) continue;
        bool reject = is_generic(phrase) || phrase.rfind("History of ", 0) == 0;
        Json v;
        v["phrase"] = phrase;
        v["is_ne"] = !reject;
        if (calibrated) {
            int64_t pct = reject ? 30
                                 : 75 + static_cast<int64_t>(
                                            splitmix64(derive_seed(seed_, "nerconf:" + phrase)) % 25);
            v["confidence"] = Rational(pct, 100).to_double();
        }
        verdicts.push_back(std::move(v));
    }
    Json out;
    out["phrases"] = std::move(verdicts);
    return out.dump();
}

std::string SyntheticCorpusBackend::handle_arbitration(const GenerationRequest& request) const {
    const auto& filled = request.bundle.placeholders_filled;
    std::string cand = canonical::canonicalize(filled.at("candidate_name"));
    std::string existing = canonical::canonicalize(filled.at("existing_name"));
    bool same;
    {
        std::lock_guard lock(mu_);
        same = same_pairs_.count({cand, existing}) > 0;
    }
    Json j;
    j["verdict"] = same ? "same" : "distinct";
    return j.dump();
}

std::string SyntheticCorpusBackend::handle_self_grounding(const GenerationRequest& request) const {
    std::string subject = request.bundle.placeholders_filled.at("subject_name");
    Json facts = Json::array();
    const char* predicates[] = {"kind", "first recorded in", "linked with"};
    const char* confidences[] = {"0.97", "0.75", "0.74"};
    for (int i = 0; i < 3; ++i) {
        Json f;
        f["predicate"] = predicates[i];
        f["object"] = "synthetic value " + hex8(splitmix64(fnv1a64(subject) + i));
        f["confidence"] = Json::parse(confidences[i]);
        facts.push_back(std::move(f));
    }
    Json j;
    j["summary"] = "Synthetic fact sheet for " + subject + ".";
    j["aliases"] = Json::array({subject + " (alias)"});
    j["facts"] = std::move(facts);
    return j.dump();
}

std::string SyntheticCorpusBackend::handle_claims(const GenerationRequest& request) const {
    std::string subject = request.bundle.placeholders_filled.at("subject_name");
    Json claims = Json::array();
    for (int i = 0; i < options_.claims_per_article; ++i)
        claims.push_back("Claim " + std::to_string(i + 1) + " about " + subject + ".");
    Json j;
    j["claims"] = std::move(claims);
    return j.dump();
}

std::string SyntheticCorpusBackend::handle_verdict(const GenerationRequest& request) const {
    const auto& filled = request.bundle.placeholders_filled;
    double h = hash01(derive_seed(seed_, "verdict"),
                      filled.at("claim") + "|" + filled.at("evidence_block"));
    Json j;
    if (h < options_.supported_rate) {
        j["verdict"] = "supported";
    } else if (h < options_.supported_rate + options_.refuted_rate) {
        j["verdict"] = "refuted";
    } else {
        j["verdict"] = "insufficient";
    }
    return j.dump();
}

HashEmbeddingBackend::HashEmbeddingBackend(uint64_t seed, size_t dimension)
    : seed_(seed), dimension_(dimension) {}

std::vector<double> HashEmbeddingBackend::raw_unit(const std::string& salt) const {
    SplitMixRng rng(derive_seed(seed_, salt));
    std::vector<double> v(dimension_);
    double norm = 0.0;
    for (auto& x : v) {
        x = rng.next_double() * 2.0 - 1.0;
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> HashEmbeddingBackend::vector_for(const std::string& text) const {
    std::string group;
    {
        std::lock_guard lock(mu_);
        auto it = member_group_.find(text);
        if (it != member_group_.end()) group = it->second;
    }
    if (group.empty()) return raw_unit("embed:" + text);
    auto base = raw_unit("group:" + group);
    auto pert = raw_unit("pert:" + text);
    double norm = 0.0;
    for (size_t i = 0; i < base.size(); ++i) {
        base[i] += 0.05 * pert[i];
        norm += base[i] * base[i];
    }
    norm = std::sqrt(norm);
    for (auto& x : base) x /= norm;
    return base;
}

std::vector<std::vector<double>> HashEmbeddingBackend::embed(
    const std::vector<std::string>& texts) {
    {
        std::lock_guard lock(mu_);
        if (fail_remaining_ > 0) {
            --fail_remaining_;
            throw BackendError("injected embedding failure", fail_kind_);
        }
    }
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(vector_for(t));
    return out;
}

void HashEmbeddingBackend::add_synonym_group(const std::string& group,
                                             const std::vector<std::string>& members) {
    std::lock_guard lock(mu_);
    for (const auto& m : members) member_group_[m] = group;
}

void HashEmbeddingBackend::fail_next(int times, FailureKind kind) {
    std::lock_guard lock(mu_);
    fail_remaining_ = times;
    fail_kind_ = kind;
}

}  // namespace parapedia::mock
