#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "parapedia/gateway.hpp"

// Deterministic mock backends. All derivations flow from explicit stable
// hashing of the configured seed plus request content, so equal inputs
// produce equal outputs across runs, worker counts, and platforms.
namespace parapedia::mock {

// Unit-test backend: a handler function plus a failure schedule.
class ScriptedBackend : public gateway::TextBackend {
public:
    using Handler = std::function<std::string(const gateway::GenerationRequest&)>;

    explicit ScriptedBackend(Handler handler) : handler_(std::move(handler)) {}

    std::string complete(const gateway::GenerationRequest& request) override;

    // The next `times` calls throw with the given kind before delegating.
    void fail_next(int times, gateway::FailureKind kind = gateway::FailureKind::transient);

    int calls() const;

private:
    Handler handler_;
    mutable std::mutex mu_;
    int fail_remaining_ = 0;
    gateway::FailureKind fail_kind_ = gateway::FailureKind::transient;
    int calls_ = 0;
};

// Options for the synthetic knowledge-graph world. Children of a subject
// are a pure function of (seed, subject name), which is what makes engine
// runs reproducible and lets tests BFS the same graph independently.
struct SyntheticWorldOptions {
    int links_per_article = 12;
    double generic_rate = 0.0;        // links drawn from the generic-noun pool
    double committed_dup_rate = 0.0;  // links that re-propose a wave-1 hub
    double shared_child_rate = 0.0;   // links drawn from a per-wave shared pool
    int shared_pool_size = 16;
    bool emit_loop_link = false;      // adds one "History of {subject}" link
    bool emit_infobox = true;
    bool emit_categories = true;
    int sections = 6;
    // Calibrated link scores; assigned to links round-robin by index.
    // Empty: derived per-link in [0.75, 0.99].
    std::vector<Rational> confidence_cycle;
    int claims_per_article = 10;
    double supported_rate = 0.70;
    double refuted_rate = 0.15;
};

class SyntheticCorpusBackend : public gateway::TextBackend {
public:
    SyntheticCorpusBackend(uint64_t seed, SyntheticWorldOptions options = {});

    std::string complete(const gateway::GenerationRequest& request) override;

    // The link graph as tests see it: display names of the wikilink
    // targets the subject's article will carry, in article order.
    std::vector<std::string> children(const std::string& subject_name) const;
    bool is_generic(const std::string& phrase) const;

    // Fault injection. Matching is by the stage's identifying placeholder
    // (subject_name for pipeline stages, candidate_name for arbitration,
    // claim for verdicts).
    void fail_transient(prompts::PromptStage stage, int times);
    void always_fail(prompts::PromptStage stage, const std::string& match);
    void garble_replies(prompts::PromptStage stage, const std::string& match);

    // Arbitration verdicts: pairs of canonical keys the arbiter calls the
    // same entity; everything else is distinct.
    void declare_same(const std::string& canonical_a, const std::string& canonical_b);

    const SyntheticWorldOptions& options() const { return options_; }

private:
    std::string handle_outline(const gateway::GenerationRequest& request) const;
    std::string handle_elicitation(const gateway::GenerationRequest& request) const;
    std::string handle_ner(const gateway::GenerationRequest& request) const;
    std::string handle_arbitration(const gateway::GenerationRequest& request) const;
    std::string handle_self_grounding(const gateway::GenerationRequest& request) const;
    std::string handle_claims(const gateway::GenerationRequest& request) const;
    std::string handle_verdict(const gateway::GenerationRequest& request) const;
    void maybe_fail(const gateway::GenerationRequest& request);
    std::string match_key(const gateway::GenerationRequest& request) const;

    uint64_t seed_;
    SyntheticWorldOptions options_;
    std::vector<std::string> generic_pool_;

    mutable std::mutex mu_;
    std::map<prompts::PromptStage, int> transient_failures_;
    std::map<prompts::PromptStage, std::set<std::string>> always_fail_;
    std::map<prompts::PromptStage, std::set<std::string>> garbled_;
    std::set<std::pair<std::string, std::string>> same_pairs_;
};

// Seeded hash-derived unit vectors; equal strings map to equal vectors.
class HashEmbeddingBackend : public gateway::EmbeddingBackend {
public:
    explicit HashEmbeddingBackend(uint64_t seed, size_t dimension = 64);

    size_t dimension() const override { return dimension_; }
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

    // Members embed near the group centroid (cosine well above 0.90), so
    // tests can stage semantic duplicates like Germany/Deutschland.
    void add_synonym_group(const std::string& group, const std::vector<std::string>& members);

    void fail_next(int times, gateway::FailureKind kind = gateway::FailureKind::transient);

private:
    std::vector<double> vector_for(const std::string& text) const;
    std::vector<double> raw_unit(const std::string& salt) const;

    uint64_t seed_;
    size_t dimension_;
    mutable std::mutex mu_;
    std::map<std::string, std::string> member_group_;
    int fail_remaining_ = 0;
    gateway::FailureKind fail_kind_ = gateway::FailureKind::transient;
};

}  // namespace parapedia::mock
