#include "parapedia/sanitizer.hpp"

#include <map>
#include <set>

namespace parapedia::sanitizer {

GateResult gate_confidence(std::vector<CandidateEntity> candidates, const Rational& threshold) {
    GateResult out;
    for (auto& c : candidates) {
        if (c.malformed || !c.confidence || *c.confidence < threshold) {
            c.stage = CandidateStage::rejected;
            c.rejection_reason = RejectionReason::below_threshold;
            out.rejected.push_back(std::move(c));
        } else {
            out.passed.push_back(std::move(c));
        }
    }
    return out;
}

bool matches_loop_pattern(const std::string& candidate_key, const std::string& subject_key) {
    if (subject_key.empty()) return false;
    if (candidate_key == subject_key) return true;
    const std::string of_suffix = " of " + subject_key;
    if (candidate_key.size() > of_suffix.size() &&
        candidate_key.compare(candidate_key.size() - of_suffix.size(), of_suffix.size(),
                              of_suffix) == 0)
        return true;
    if (candidate_key == "part of " + subject_key) return true;
    if (candidate_key == "history of " + subject_key) return true;
    // "S's X" canonicalizes to "s s x".
    const std::string possessive = subject_key + " s";
    if (candidate_key == possessive ||
        candidate_key.compare(0, possessive.size() + 1, possessive + " ") == 0)
        return true;
    if (candidate_key == subject_key + " in popular culture") return true;
    return false;
}

bool loop_filter_rejects(const std::string& candidate_key, const std::string& subject_key,
                         const std::optional<std::string>& root_key) {
    if (matches_loop_pattern(candidate_key, subject_key)) return true;
    return root_key && matches_loop_pattern(candidate_key, *root_key);
}

gateway::GenerationRequest make_ner_request(const std::vector<CandidateEntity>& batch,
                                            const Subject& subject, const RunConfig& config,
                                            const prompts::PromptLibrary& prompts) {
    std::vector<std::string> phrases;
    phrases.reserve(batch.size());
    for (const auto& c : batch) phrases.push_back(c.phrase);

    prompts::Context context;
    context["phrases_block"] = prompts::make_phrases_block(phrases);

    gateway::GenerationRequest request;
    request.bundle = prompts.render(prompts::PromptStage::ner, config, subject, context);
    request.tag = "ner:" + subject.canonical_key;
    return request;
}

std::vector<NerVerdict> parse_ner_reply(const std::vector<CandidateEntity>& batch,
                                        const RunConfig& config,
                                        const gateway::BackendResult& result) {
    if (result.outcome != gateway::Outcome::ok)
        throw NerParseError("ner backend exhausted after retries");

    bool calibrated = config.strategy == Strategy::calibrated;
    std::set<std::string> inputs;
    for (const auto& c : batch) inputs.insert(c.phrase);

    std::map<std::string, NerVerdict> by_phrase;
    try {
        Json j = Json::parse(result.text);
        for (const auto& vj : j.at("phrases")) {
            NerVerdict v;
            v.phrase = vj.at("phrase").get<std::string>();
            v.is_ne = vj.at("is_ne").get<bool>();
            if (vj.contains("confidence")) {
                if (!calibrated) throw NerParseError("confidence in baseline ner reply");
                v.confidence = rational_from_json(vj.at("confidence"));
            } else if (calibrated) {
                throw NerParseError("calibrated ner reply missing confidence");
            }
            if (!inputs.count(v.phrase))
                throw NerParseError("ner reply names an unknown phrase: " + v.phrase);
            by_phrase[v.phrase] = std::move(v);
        }
    } catch (const NerParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw NerParseError(std::string("unparseable ner reply: ") + e.what());
    }

    std::vector<NerVerdict> out;
    out.reserve(batch.size());
    for (const auto& c : batch) {
        auto it = by_phrase.find(c.phrase);
        if (it == by_phrase.end()) throw NerParseError("ner reply missing phrase: " + c.phrase);
        out.push_back(it->second);
    }
    return out;
}

std::vector<NerVerdict> ner_filter(const std::vector<CandidateEntity>& batch,
                                   const Subject& subject, const RunConfig& config,
                                   gateway::ModelGateway& gw,
                                   const prompts::PromptLibrary& prompts) {
    if (batch.empty()) return {};
    auto request = make_ner_request(batch, subject, config, prompts);
    gateway::BackendResult result;
    try {
        result = gw.complete(request);
    } catch (const gateway::GatewayExhausted& e) {
        throw NerParseError(std::string("ner backend exhausted: ") + e.what());
    }
    return parse_ner_reply(batch, config, result);
}

bool ner_accepts(const NerVerdict& verdict, const RunConfig& config) {
    if (!verdict.is_ne) return false;
    if (config.strategy != Strategy::calibrated) return true;
    return verdict.confidence && *verdict.confidence >= config.confidence_threshold;
}

}  // namespace parapedia::sanitizer
