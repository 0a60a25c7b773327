#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parapedia/domain.hpp"
#include "parapedia/gateway.hpp"
#include "parapedia/prompts.hpp"

// Stage 2 of sanitization: calibrated confidence gating, the deterministic
// loop/self-reference pre-filter, and model-based encyclopedic filtering.
namespace parapedia::sanitizer {

struct NerVerdict {
    std::string phrase;
    bool is_ne = false;
    std::optional<Rational> confidence;  // present iff calibrated strategy
};

struct GateResult {
    std::vector<CandidateEntity> passed;
    std::vector<CandidateEntity> rejected;  // reason below_threshold
};

// Calibrated-only gate: candidates with confidence < threshold or with a
// malformed score flag are rejected before any NER call.
GateResult gate_confidence(std::vector<CandidateEntity> candidates, const Rational& threshold);

// True when the candidate key equals the subject key or matches one of the
// structural loop patterns "X of S", "S's X", "Part of S", "History of S",
// "S in popular culture" (all compared on canonical keys).
bool matches_loop_pattern(const std::string& candidate_key, const std::string& subject_key);

// Applies matches_loop_pattern against the subject and, in topic-focused
// runs, the root subject.
bool loop_filter_rejects(const std::string& candidate_key, const std::string& subject_key,
                         const std::optional<std::string>& root_key);

class NerParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Request/parse halves so batch execution can group calls per stage.
gateway::GenerationRequest make_ner_request(const std::vector<CandidateEntity>& batch,
                                            const Subject& subject, const RunConfig& config,
                                            const prompts::PromptLibrary& prompts);

// Validates the strict JSON reply shape: every input phrase needs a
// verdict, no extra phrases, confidence present exactly under the
// calibrated strategy. Raises NerParseError otherwise (exhausted results
// included).
std::vector<NerVerdict> parse_ner_reply(const std::vector<CandidateEntity>& batch,
                                        const RunConfig& config,
                                        const gateway::BackendResult& result);

// Classifies the batch with one model call. The reply must be the strict
// JSON shape with exactly the input phrases; anything else (including
// backend exhaustion) raises NerParseError and the caller drops the whole
// batch with reason ner_parse_failure. Empty batch returns empty with no
// backend call.
std::vector<NerVerdict> ner_filter(const std::vector<CandidateEntity>& batch,
                                   const Subject& subject, const RunConfig& config,
                                   gateway::ModelGateway& gw,
                                   const prompts::PromptLibrary& prompts);

// Acceptance rule for a verdict: is_ne, plus confidence >= threshold under
// the calibrated strategy.
bool ner_accepts(const NerVerdict& verdict, const RunConfig& config);

}  // namespace parapedia::sanitizer
