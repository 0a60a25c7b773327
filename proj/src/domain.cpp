#include "parapedia/domain.hpp"

#include "parapedia/canonical.hpp"

namespace parapedia {

namespace {

[[noreturn]] void bad_enum(const std::string& what, const std::string& value) {
    throw std::invalid_argument("unknown " + what + ": '" + value + "'");
}

}  // namespace

RunConfig validate_config(RunConfig config) {
    if (config.seed_subject.empty())
        throw std::invalid_argument("seed_subject is required");
    if (canonical::is_unusable(config.seed_subject))
        throw std::invalid_argument("seed_subject canonicalizes to an empty key");
    if (config.mode == RunMode::topic_focused) {
        if (!config.root_subject || config.root_subject->empty())
            throw std::invalid_argument("topic_focused requires root_subject");
        if (!config.depth_cap) config.depth_cap = 2;
        if (*config.depth_cap > 2)
            throw std::invalid_argument("topic_focused depth_cap exceeds the two-hop cap");
    } else if (config.root_subject) {
        throw std::invalid_argument("general_domain must not set root_subject");
    }
    Rational zero(0, 1), one(1, 1);
    if (config.confidence_threshold <= zero || config.confidence_threshold > one)
        throw std::invalid_argument("confidence_threshold outside (0,1]");
    if (config.similarity_threshold <= zero || config.similarity_threshold > one)
        throw std::invalid_argument("similarity_threshold outside (0,1]");
    if (config.avg_words_per_article <= 0)
        throw std::invalid_argument("avg_words_per_article must be positive");
    if (config.article_budget && *config.article_budget <= 0)
        throw std::invalid_argument("article_budget must be positive when set");
    if (config.depth_cap && *config.depth_cap < 0)
        throw std::invalid_argument("depth_cap must be non-negative");
    if (config.max_retries <= 0)
        throw std::invalid_argument("max_retries must be positive");
    if (config.global_concurrency_cap <= 0)
        throw std::invalid_argument("global_concurrency_cap must be positive");
    return config;
}

void FunnelStats::add_generated(int hop) {
    std::lock_guard lock(mu_);
    ++state_.total.generated_articles;
    ++state_.per_hop[hop].generated_articles;
}

void FunnelStats::add_raw(int hop, int64_t n) {
    std::lock_guard lock(mu_);
    state_.total.raw_candidates += n;
    state_.per_hop[hop].raw_candidates += n;
}

void FunnelStats::add_canonical(int hop, int64_t n) {
    std::lock_guard lock(mu_);
    state_.total.after_canonical += n;
    state_.per_hop[hop].after_canonical += n;
}

void FunnelStats::add_ner(int hop, int64_t n) {
    std::lock_guard lock(mu_);
    state_.total.after_ner += n;
    state_.per_hop[hop].after_ner += n;
}

void FunnelStats::add_similarity(int hop, int64_t n) {
    std::lock_guard lock(mu_);
    state_.total.after_similarity += n;
    state_.per_hop[hop].after_similarity += n;
}

void FunnelStats::add_queued(int hop, int64_t n) {
    std::lock_guard lock(mu_);
    state_.total.queued_subjects += n;
    state_.per_hop[hop].queued_subjects += n;
}

void FunnelStats::add_rejection(const std::string& reason, int64_t n) {
    std::lock_guard lock(mu_);
    state_.rejections[reason] += n;
}

FunnelSnapshot FunnelStats::snapshot() const {
    std::lock_guard lock(mu_);
    return state_;
}

void FunnelStats::restore(const FunnelSnapshot& snap) {
    std::lock_guard lock(mu_);
    state_ = snap;
}

std::string to_string(SubjectStatus s) {
    switch (s) {
        case SubjectStatus::queued: return "queued";
        case SubjectStatus::generated: return "generated";
        case SubjectStatus::failed: return "failed";
    }
    return "queued";
}

std::string to_string(RunMode m) {
    return m == RunMode::general_domain ? "general_domain" : "topic_focused";
}

std::string to_string(Persona p) {
    switch (p) {
        case Persona::scientific_neutral: return "scientific_neutral";
        case Persona::left_leaning: return "left_leaning";
        case Persona::conservative: return "conservative";
    }
    return "scientific_neutral";
}

std::string to_string(Strategy s) {
    return s == Strategy::baseline ? "baseline" : "calibrated";
}

std::string to_string(ExecutionMode m) {
    return m == ExecutionMode::online ? "online" : "batch";
}

std::string to_string(CandidateStage s) {
    switch (s) {
        case CandidateStage::raw: return "raw";
        case CandidateStage::canon_survivor: return "canon_survivor";
        case CandidateStage::ner_survivor: return "ner_survivor";
        case CandidateStage::sim_survivor: return "sim_survivor";
        case CandidateStage::committed: return "committed";
        case CandidateStage::rejected: return "rejected";
    }
    return "raw";
}

std::string to_string(RejectionReason r) {
    switch (r) {
        case RejectionReason::duplicate_canonical: return "duplicate_canonical";
        case RejectionReason::below_threshold: return "below_threshold";
        case RejectionReason::ner_reject: return "ner_reject";
        case RejectionReason::ner_parse_failure: return "ner_parse_failure";
        case RejectionReason::semantic_duplicate: return "semantic_duplicate";
        case RejectionReason::arbitration_failure: return "arbitration_failure";
        case RejectionReason::loop_pattern: return "loop_pattern";
    }
    return "duplicate_canonical";
}

SubjectStatus subject_status_from_string(const std::string& s) {
    if (s == "queued") return SubjectStatus::queued;
    if (s == "generated") return SubjectStatus::generated;
    if (s == "failed") return SubjectStatus::failed;
    bad_enum("subject status", s);
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "general_domain") return RunMode::general_domain;
    if (s == "topic_focused") return RunMode::topic_focused;
    bad_enum("run mode", s);
}

Persona persona_from_string(const std::string& s) {
    if (s == "scientific_neutral") return Persona::scientific_neutral;
    if (s == "left_leaning") return Persona::left_leaning;
    if (s == "conservative") return Persona::conservative;
    bad_enum("persona", s);
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "baseline") return Strategy::baseline;
    if (s == "calibrated") return Strategy::calibrated;
    bad_enum("strategy", s);
}

ExecutionMode execution_mode_from_string(const std::string& s) {
    if (s == "online") return ExecutionMode::online;
    if (s == "batch") return ExecutionMode::batch;
    bad_enum("execution mode", s);
}

CandidateStage candidate_stage_from_string(const std::string& s) {
    if (s == "raw") return CandidateStage::raw;
    if (s == "canon_survivor") return CandidateStage::canon_survivor;
    if (s == "ner_survivor") return CandidateStage::ner_survivor;
    if (s == "sim_survivor") return CandidateStage::sim_survivor;
    if (s == "committed") return CandidateStage::committed;
    if (s == "rejected") return CandidateStage::rejected;
    bad_enum("candidate stage", s);
}

RejectionReason rejection_reason_from_string(const std::string& s) {
    if (s == "duplicate_canonical") return RejectionReason::duplicate_canonical;
    if (s == "below_threshold") return RejectionReason::below_threshold;
    if (s == "ner_reject") return RejectionReason::ner_reject;
    if (s == "ner_parse_failure") return RejectionReason::ner_parse_failure;
    if (s == "semantic_duplicate") return RejectionReason::semantic_duplicate;
    if (s == "arbitration_failure") return RejectionReason::arbitration_failure;
    if (s == "loop_pattern") return RejectionReason::loop_pattern;
    bad_enum("rejection reason", s);
}

Json rational_to_json(const Rational& r) { return Json(r.to_exact_string()); }

Rational rational_from_json(const Json& j) {
    if (j.is_string()) {
        auto parsed = Rational::parse_decimal(j.get<std::string>());
        if (!parsed) throw std::invalid_argument("bad rational literal: " + j.dump());
        return *parsed;
    }
    // Numeric JSON values are re-rendered through the serializer's
    // shortest round-trip text so 0.85 means exactly 85/100.
    auto parsed = Rational::parse_decimal(j.dump());
    if (!parsed) throw std::invalid_argument("bad rational value: " + j.dump());
    return *parsed;
}

Json to_json(const Subject& s) {
    Json j;
    j["name"] = s.name;
    j["canonical_key"] = s.canonical_key;
    j["hop"] = s.hop;
    j["status"] = to_string(s.status);
    if (s.parent) j["parent"] = *s.parent;
    return j;
}

Subject subject_from_json(const Json& j) {
    Subject s;
    s.name = j.at("name").get<std::string>();
    s.canonical_key = j.at("canonical_key").get<std::string>();
    s.hop = j.at("hop").get<int>();
    s.status = subject_status_from_string(j.at("status").get<std::string>());
    if (j.contains("parent")) s.parent = j.at("parent").get<std::string>();
    return s;
}

Json to_json(const Article& a) {
    Json j;
    j["subject"] = to_json(a.subject);
    j["wikitext"] = a.wikitext;
    j["outline"] = a.outline;
    Json links = Json::array();
    for (const auto& l : a.wikilinks) {
        Json lj;
        lj["target"] = l.target;
        if (l.confidence) lj["confidence"] = rational_to_json(*l.confidence);
        if (l.malformed) lj["malformed"] = true;
        links.push_back(std::move(lj));
    }
    j["wikilinks"] = std::move(links);
    j["categories"] = a.categories;
    j["has_infobox"] = a.has_infobox;
    j["word_count"] = a.word_count;
    return j;
}

Article article_from_json(const Json& j) {
    Article a;
    a.subject = subject_from_json(j.at("subject"));
    a.wikitext = j.at("wikitext").get<std::string>();
    a.outline = j.at("outline").get<std::vector<std::string>>();
    for (const auto& lj : j.at("wikilinks")) {
        WikiLink l;
        l.target = lj.at("target").get<std::string>();
        if (lj.contains("confidence")) l.confidence = rational_from_json(lj.at("confidence"));
        if (lj.contains("malformed")) l.malformed = lj.at("malformed").get<bool>();
        a.wikilinks.push_back(std::move(l));
    }
    a.categories = j.at("categories").get<std::vector<std::string>>();
    a.has_infobox = j.at("has_infobox").get<bool>();
    a.word_count = j.at("word_count").get<int>();
    return a;
}

Json to_json(const CandidateEntity& c) {
    Json j;
    j["phrase"] = c.phrase;
    j["canonical_key"] = c.canonical_key;
    j["parent_subject"] = c.parent_subject;
    j["parent_hop"] = c.parent_hop;
    if (c.confidence) j["confidence"] = rational_to_json(*c.confidence);
    if (c.malformed) j["malformed"] = true;
    j["stage"] = to_string(c.stage);
    if (c.rejection_reason) j["rejection_reason"] = to_string(*c.rejection_reason);
    return j;
}

CandidateEntity candidate_from_json(const Json& j) {
    CandidateEntity c;
    c.phrase = j.at("phrase").get<std::string>();
    c.canonical_key = j.at("canonical_key").get<std::string>();
    c.parent_subject = j.at("parent_subject").get<std::string>();
    c.parent_hop = j.at("parent_hop").get<int>();
    if (j.contains("confidence")) c.confidence = rational_from_json(j.at("confidence"));
    if (j.contains("malformed")) c.malformed = j.at("malformed").get<bool>();
    c.stage = candidate_stage_from_string(j.at("stage").get<std::string>());
    if (j.contains("rejection_reason"))
        c.rejection_reason = rejection_reason_from_string(j.at("rejection_reason").get<std::string>());
    return c;
}

Json to_json(const RunConfig& c) {
    Json j;
    j["mode"] = to_string(c.mode);
    j["seed_subject"] = c.seed_subject;
    if (c.root_subject) j["root_subject"] = *c.root_subject;
    j["persona"] = to_string(c.persona);
    j["strategy"] = to_string(c.strategy);
    j["self_grounding"] = c.self_grounding;
    j["confidence_threshold"] = rational_to_json(c.confidence_threshold);
    j["similarity_threshold"] = rational_to_json(c.similarity_threshold);
    j["avg_words_per_article"] = c.avg_words_per_article;
    if (c.depth_cap) j["depth_cap"] = *c.depth_cap;
    if (c.article_budget) j["article_budget"] = *c.article_budget;
    j["max_retries"] = c.max_retries;
    j["global_concurrency_cap"] = c.global_concurrency_cap;
    j["execution_mode"] = to_string(c.execution_mode);
    j["random_seed"] = c.random_seed;
    return j;
}

RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    if (j.contains("mode")) c.mode = run_mode_from_string(j.at("mode").get<std::string>());
    c.seed_subject = j.value("seed_subject", std::string());
    if (j.contains("root_subject")) c.root_subject = j.at("root_subject").get<std::string>();
    if (j.contains("persona")) c.persona = persona_from_string(j.at("persona").get<std::string>());
    if (j.contains("strategy")) c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    if (j.contains("self_grounding")) c.self_grounding = j.at("self_grounding").get<bool>();
    if (j.contains("confidence_threshold"))
        c.confidence_threshold = rational_from_json(j.at("confidence_threshold"));
    if (j.contains("similarity_threshold"))
        c.similarity_threshold = rational_from_json(j.at("similarity_threshold"));
    if (j.contains("avg_words_per_article"))
        c.avg_words_per_article = j.at("avg_words_per_article").get<int>();
    if (j.contains("depth_cap")) c.depth_cap = j.at("depth_cap").get<int>();
    if (j.contains("article_budget")) c.article_budget = j.at("article_budget").get<int>();
    if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
    if (j.contains("global_concurrency_cap"))
        c.global_concurrency_cap = j.at("global_concurrency_cap").get<int>();
    if (j.contains("execution_mode"))
        c.execution_mode = execution_mode_from_string(j.at("execution_mode").get<std::string>());
    if (j.contains("random_seed")) c.random_seed = j.at("random_seed").get<int64_t>();
    return c;
}

namespace {

Json counters_to_json(const FunnelCounters& c) {
    Json j;
    j["generated_articles"] = c.generated_articles;
    j["raw_candidates"] = c.raw_candidates;
    j["after_canonical"] = c.after_canonical;
    j["after_ner"] = c.after_ner;
    j["after_similarity"] = c.after_similarity;
    j["queued_subjects"] = c.queued_subjects;
    return j;
}

FunnelCounters counters_from_json(const Json& j) {
    FunnelCounters c;
    c.generated_articles = j.at("generated_articles").get<int64_t>();
    c.raw_candidates = j.at("raw_candidates").get<int64_t>();
    c.after_canonical = j.at("after_canonical").get<int64_t>();
    c.after_ner = j.at("after_ner").get<int64_t>();
    c.after_similarity = j.at("after_similarity").get<int64_t>();
    c.queued_subjects = j.at("queued_subjects").get<int64_t>();
    return c;
}

}  // namespace

Json to_json(const FunnelSnapshot& f) {
    Json j = counters_to_json(f.total);
    Json hops;
    for (const auto& [hop, counters] : f.per_hop)
        hops[std::to_string(hop)] = counters_to_json(counters);
    j["per_hop"] = std::move(hops);
    Json rej;
    for (const auto& [reason, n] : f.rejections) rej[reason] = n;
    j["rejections"] = std::move(rej);
    return j;
}

FunnelSnapshot funnel_from_json(const Json& j) {
    FunnelSnapshot f;
    f.total = counters_from_json(j);
    if (j.contains("per_hop")) {
        for (const auto& [key, value] : j.at("per_hop").items())
            f.per_hop[std::stoi(key)] = counters_from_json(value);
    }
    if (j.contains("rejections")) {
        for (const auto& [key, value] : j.at("rejections").items())
            f.rejections[key] = value.get<int64_t>();
    }
    return f;
}

}  // namespace parapedia
