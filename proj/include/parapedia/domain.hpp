#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "parapedia/rational.hpp"

// Shared data model and run configuration consumed by every other module.
namespace parapedia {

using Json = nlohmann::ordered_json;

enum class SubjectStatus { queued, generated, failed };

enum class RunMode { general_domain, topic_focused };
enum class Persona { scientific_neutral, left_leaning, conservative };
enum class Strategy { baseline, calibrated };
enum class ExecutionMode { online, batch };

enum class CandidateStage {
    raw,
    canon_survivor,
    ner_survivor,
    sim_survivor,
    committed,
    rejected,
};

enum class RejectionReason {
    duplicate_canonical,
    below_threshold,
    ner_reject,
    ner_parse_failure,
    semantic_duplicate,
    arbitration_failure,
    loop_pattern,
};

struct Subject {
    std::string name;           // display form, first-seen spelling
    std::string canonical_key;  // canonical::canonicalize(name)
    int hop = 0;                // BFS distance from the run seed
    SubjectStatus status = SubjectStatus::queued;
    std::optional<std::string> parent;
};

// A wikilink extracted from generated text; confidence only under the
// calibrated strategy. malformed marks calibrated links whose score was
// missing or out of range.
struct WikiLink {
    std::string target;
    std::optional<Rational> confidence;
    bool malformed = false;
};

struct Article {
    Subject subject;
    std::string wikitext;
    std::vector<std::string> outline;
    std::vector<WikiLink> wikilinks;
    std::vector<std::string> categories;
    bool has_infobox = false;
    int word_count = 0;
};

struct CandidateEntity {
    std::string phrase;  // verbatim from the parent article
    std::string canonical_key;
    std::string parent_subject;
    int parent_hop = 0;
    std::optional<Rational> confidence;
    bool malformed = false;
    CandidateStage stage = CandidateStage::raw;
    std::optional<RejectionReason> rejection_reason;
};

struct RunConfig {
    RunMode mode = RunMode::general_domain;
    std::string seed_subject;
    std::optional<std::string> root_subject;  // required iff topic_focused
    Persona persona = Persona::scientific_neutral;
    Strategy strategy = Strategy::baseline;
    bool self_grounding = false;
    Rational confidence_threshold = Rational(3, 4);
    Rational similarity_threshold = Rational(9, 10);
    int avg_words_per_article = 716;
    std::optional<int> depth_cap;
    std::optional<int> article_budget;
    int max_retries = 3;
    int global_concurrency_cap = 8;
    ExecutionMode execution_mode = ExecutionMode::online;
    int64_t random_seed = 0;
};

// Fills defaults and rejects inconsistent combinations. Throws
// std::invalid_argument with a description on failure.
RunConfig validate_config(RunConfig config);

// Monotone funnel counters; every candidate increments raw first and each
// later counter only after the previous one, so the chain
// raw >= canonical >= ner >= similarity >= queued holds in any snapshot.
struct FunnelCounters {
    int64_t generated_articles = 0;
    int64_t raw_candidates = 0;
    int64_t after_canonical = 0;
    int64_t after_ner = 0;
    int64_t after_similarity = 0;
    int64_t queued_subjects = 0;
};

struct FunnelSnapshot {
    FunnelCounters total;
    // Candidate counters are bucketed by the hop of the proposing article;
    // queued_subjects in bucket h counts children enqueued by hop-h parents.
    std::map<int, FunnelCounters> per_hop;
    std::map<std::string, int64_t> rejections;  // by reason, plus parse warnings
};

class FunnelStats {
public:
    void add_generated(int hop);
    void add_raw(int hop, int64_t n = 1);
    void add_canonical(int hop, int64_t n = 1);
    void add_ner(int hop, int64_t n = 1);
    void add_similarity(int hop, int64_t n = 1);
    void add_queued(int hop, int64_t n = 1);
    void add_rejection(const std::string& reason, int64_t n = 1);

    FunnelSnapshot snapshot() const;
    void restore(const FunnelSnapshot& snap);

private:
    mutable std::mutex mu_;
    FunnelSnapshot state_;
};

// Enum <-> string names used in the JSONL corpus format.
std::string to_string(SubjectStatus s);
std::string to_string(RunMode m);
std::string to_string(Persona p);
std::string to_string(Strategy s);
std::string to_string(ExecutionMode m);
std::string to_string(CandidateStage s);
std::string to_string(RejectionReason r);

SubjectStatus subject_status_from_string(const std::string& s);
RunMode run_mode_from_string(const std::string& s);
Persona persona_from_string(const std::string& s);
Strategy strategy_from_string(const std::string& s);
ExecutionMode execution_mode_from_string(const std::string& s);
CandidateStage candidate_stage_from_string(const std::string& s);
RejectionReason rejection_reason_from_string(const std::string& s);

// JSONL record codecs (field names match the type fields).
Json to_json(const Subject& s);
Subject subject_from_json(const Json& j);
Json to_json(const Article& a);
Article article_from_json(const Json& j);
Json to_json(const CandidateEntity& c);
CandidateEntity candidate_from_json(const Json& j);
Json to_json(const RunConfig& c);
RunConfig run_config_from_json(const Json& j);
Json to_json(const FunnelSnapshot& f);
FunnelSnapshot funnel_from_json(const Json& j);

// Confidences serialize as exact decimal strings.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

}  // namespace parapedia
