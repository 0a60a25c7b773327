#include "parapedia/engine.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <tuple>

#include "parapedia/canonical.hpp"
#include "parapedia/hashing.hpp"
#include "parapedia/sanitizer.hpp"
#include "parapedia/wikitext.hpp"

namespace parapedia::engine {

using gateway::GenerationRequest;
using prompts::PromptStage;

namespace {

constexpr std::string_view kFormatVersion = "1";

std::string utf8_prefix(const std::string& text, size_t max_bytes) {
    if (text.size() <= max_bytes) return text;
    size_t end = max_bytes;
    while (end > 0 && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) --end;
    return text.substr(0, end);
}

struct CandidateRecord {
    CandidateEntity cand;
    int64_t seq = 0;  // link index within the parent article
};

// Per-subject unit of work for one wave. Online and batch execution fill
// the same structure through the same step functions, which is what makes
// the two modes produce identical outputs.
struct SubjectWork {
    Subject subject;
    std::optional<gateway::FactSheet> sheet;
    std::vector<std::string> outline;
    Article article;
    bool failed = false;
    std::string failure;
    std::vector<CandidateEntity> ner_input;  // canon survivors awaiting NER
    std::vector<CandidateEntity> ner_survivors;
    std::vector<CandidateRecord> records;
    int64_t next_seq = 0;
};

Json committed_to_json(const dedup::CommittedEntity& e) {
    Json j;
    j["canonical_key"] = e.canonical_key;
    j["display_name"] = e.display_name;
    j["vector"] = e.vector;
    j["wave"] = e.wave;
    j["hop"] = e.hop;
    return j;
}

dedup::CommittedEntity committed_from_json(const Json& j) {
    dedup::CommittedEntity e;
    e.canonical_key = j.at("canonical_key").get<std::string>();
    e.display_name = j.at("display_name").get<std::string>();
    e.vector = j.at("vector").get<std::vector<double>>();
    e.wave = j.at("wave").get<int>();
    e.hop = j.at("hop").get<int>();
    return e;
}

}  // namespace

struct FrontierEngine::State {
    RunConfig config;
    store::RunPaths paths;
    dedup::DedupIndex index;
    std::map<std::string, Subject> subjects;  // by canonical key
    std::vector<Article> articles;
    std::vector<CandidateRecord> candidate_log;
    int64_t generated = 0;
    int64_t failed = 0;
    int last_wave = -1;

    bool budget_left() const {
        return !config.article_budget || generated < *config.article_budget;
    }
};

FrontierEngine::FrontierEngine(gateway::ModelGateway& gw, const prompts::PromptLibrary& prompts,
                               EngineOptions options)
    : gw_(gw), prompts_(prompts), options_(options) {
    if (options_.worker_count <= 0) throw std::invalid_argument("worker_count must be positive");
    if (options_.ner_batch_size <= 0)
        throw std::invalid_argument("ner_batch_size must be positive");
}

FunnelSnapshot FrontierEngine::funnel_snapshot() const { return funnel_.snapshot(); }

RunReport FrontierEngine::run(const RunConfig& raw_config, const fs::path& run_dir,
                              const RunHooks& hooks) {
    State state;
    state.config = validate_config(raw_config);
    state.paths.dir = run_dir;
    funnel_.restore({});

    fs::create_directories(run_dir);
    Json config_json = to_json(state.config);
    Json meta;
    meta["format_version"] = std::string(kFormatVersion);
    meta["config"] = config_json;
    meta["config_checksum"] = store::checksum_text(config_json.dump());
    meta["template_checksum"] = prompts_.combined_checksum();
    store::write_json_atomic(state.paths.config(), meta);

    // The seed enters index and queue directly; it is not a funnel
    // candidate, so no counters move here.
    CandidateEntity seed;
    seed.phrase = state.config.seed_subject;
    seed.canonical_key = canonical::canonicalize(state.config.seed_subject);
    seed.parent_hop = -1;
    auto vec = gw_.embed({seed.phrase});
    state.index.commit(seed, vec[0], 0, true);

    return drive(state, hooks);
}

RunReport FrontierEngine::resume(const fs::path& run_dir, const RunHooks& hooks) {
    State state;
    state.paths.dir = run_dir;

    Json meta;
    try {
        meta = store::read_json(state.paths.config());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("cannot resume: ") + e.what());
    }
    Json config_json = meta.at("config");
    if (meta.at("config_checksum").get<std::string>() != store::checksum_text(config_json.dump()))
        throw std::runtime_error("cannot resume: config checksum mismatch");
    if (meta.at("template_checksum").get<std::string>() != prompts_.combined_checksum())
        throw std::runtime_error("cannot resume: template assets changed since the run started");
    state.config = validate_config(run_config_from_json(config_json));

    try {
        std::vector<dedup::CommittedEntity> entities;
        for (const auto& j : store::read_jsonl(state.paths.index()))
            entities.push_back(committed_from_json(j));
        state.index.restore_entities(std::move(entities));

        std::vector<Subject> queued;
        for (const auto& j : store::read_jsonl(state.paths.queues()))
            queued.push_back(subject_from_json(j));
        state.index.requeue(std::move(queued));

        funnel_.restore(funnel_from_json(store::read_json(state.paths.funnel())));
        for (const auto& j : store::read_jsonl(state.paths.subjects())) {
            Subject s = subject_from_json(j);
            if (s.status == SubjectStatus::failed) ++state.failed;
            state.subjects[s.canonical_key] = std::move(s);
        }
        for (const auto& j : store::read_jsonl(state.paths.articles()))
            state.articles.push_back(article_from_json(j));
        for (const auto& j : store::read_jsonl(state.paths.candidates())) {
            CandidateRecord r;
            r.seq = j.value("seq", 0);
            Json c = j;
            c.erase("seq");
            r.cand = candidate_from_json(c);
            state.candidate_log.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("cannot resume, snapshot unreadable: ") + e.what());
    }

    state.generated = funnel_.snapshot().total.generated_articles;
    return drive(state, hooks);
}

RunReport FrontierEngine::drive(State& state, const RunHooks& hooks) {
    RunReport report;
    report.run_dir = state.paths.dir;

    while (true) {
        std::vector<Subject> queued = state.index.queue_snapshot();
        if (queued.empty() || !state.budget_left()) break;

        int wave = queued.front().hop;
        state.last_wave = wave;

        // Budget slots are claimed at dequeue time, in queue order.
        int64_t slots = static_cast<int64_t>(queued.size());
        if (state.config.article_budget)
            slots = std::min<int64_t>(slots, *state.config.article_budget - state.generated);
        std::vector<Subject> generating(queued.begin(), queued.begin() + slots);
        for (int64_t i = 0; i < slots; ++i) state.index.pop_queued();

        // Children are enqueued only while expansion can continue past this
        // wave: within the depth cap and with budget still open.
        bool depth_ok = !state.config.depth_cap || wave + 1 <= *state.config.depth_cap;
        bool budget_open = !state.config.article_budget ||
                           state.generated + slots < *state.config.article_budget;
        process_wave(state, generating, wave, depth_ok && budget_open);

        snapshot(state);
        report.waves_completed = wave + 1;
        if (hooks.continue_after_wave && !hooks.continue_after_wave(wave)) {
            report.completed = false;
            break;
        }
    }

    if (report.completed) snapshot(state);
    report.funnel = funnel_.snapshot();
    report.generated_articles = state.generated;
    report.failed_subjects = state.failed;
    return report;
}

void FrontierEngine::process_wave(State& state, const std::vector<Subject>& wave_subjects,
                                  int wave, bool allow_enqueue) {
    const RunConfig& config = state.config;
    std::optional<std::string> root_key;
    if (config.root_subject) root_key = canonical::canonicalize(*config.root_subject);

    std::vector<SubjectWork> work(wave_subjects.size());
    for (size_t i = 0; i < wave_subjects.size(); ++i) work[i].subject = wave_subjects[i];

    auto outline_request = [&](SubjectWork& w) {
        GenerationRequest req;
        req.bundle = prompts_.render(PromptStage::outline, config, w.subject);
        req.tag = "outline:" + w.subject.canonical_key;
        return req;
    };
    auto parse_outline = [&](SubjectWork& w, const gateway::BackendResult& res) {
        if (res.outcome != gateway::Outcome::ok) {
            w.failed = true;
            w.failure = "outline_exhausted";
            return;
        }
        try {
            Json j = Json::parse(res.text);
            w.outline = j.at("sections").get<std::vector<std::string>>();
            if (w.outline.empty()) throw std::runtime_error("empty outline");
        } catch (const std::exception&) {
            w.failed = true;
            w.failure = "outline_parse_failure";
        }
    };
    auto elicitation_request = [&](SubjectWork& w) {
        prompts::Context ctx;
        ctx["outline_block"] = prompts::make_outline_block(w.outline);
        if (w.sheet) ctx["grounding_block"] = gateway::grounding_block(*w.sheet);
        GenerationRequest req;
        req.bundle = prompts_.render(PromptStage::elicitation, config, w.subject, ctx);
        req.tag = "elicit:" + w.subject.canonical_key;
        return req;
    };

    // Link extraction, Stage 1 canonical pre-check (read-only against the
    // committed key set), loop pre-filter and calibrated confidence gate.
    auto ingest_article = [&](SubjectWork& w, const gateway::BackendResult& res) {
        if (res.outcome != gateway::Outcome::ok) {
            w.failed = true;
            w.failure = "elicitation_exhausted";
            return;
        }
        w.article.subject = w.subject;
        w.article.subject.status = SubjectStatus::generated;
        w.article.wikitext = res.text;
        w.article.outline = w.outline;
        auto extraction = wikitext::extract_links(res.text, config.strategy);
        w.article.wikilinks = extraction.links;
        if (extraction.parse_warnings)
            funnel_.add_rejection("wikitext_parse_warning", extraction.parse_warnings);
        auto structure = wikitext::extract_structure(res.text);
        w.article.categories = structure.categories;
        w.article.has_infobox = structure.has_infobox;
        w.article.word_count = wikitext::word_count(res.text);
        funnel_.add_generated(w.subject.hop);

        std::vector<CandidateEntity> gate_input;
        for (const auto& link : w.article.wikilinks) {
            int64_t seq = w.next_seq++;
            funnel_.add_raw(w.subject.hop);
            std::string key = canonical::canonicalize(link.target);
            if (key.empty()) {
                // Unkeyable phrase (all punctuation); cannot enter a keyed
                // funnel, recorded as a warning only.
                funnel_.add_rejection("unusable_phrase");
                continue;
            }
            CandidateEntity cand;
            cand.phrase = link.target;
            cand.canonical_key = key;
            cand.parent_subject = w.subject.name;
            cand.parent_hop = w.subject.hop;
            cand.confidence = link.confidence;
            cand.malformed = link.malformed;
            if (state.index.contains(key)) {
                cand.stage = CandidateStage::rejected;
                cand.rejection_reason = RejectionReason::duplicate_canonical;
                funnel_.add_rejection("duplicate_canonical");
                w.records.push_back({std::move(cand), seq});
                continue;
            }
            funnel_.add_canonical(w.subject.hop);
            cand.stage = CandidateStage::canon_survivor;
            if (sanitizer::loop_filter_rejects(key, w.subject.canonical_key, root_key)) {
                cand.stage = CandidateStage::rejected;
                cand.rejection_reason = RejectionReason::loop_pattern;
                funnel_.add_rejection("loop_pattern");
                w.records.push_back({std::move(cand), seq});
                continue;
            }
            w.records.push_back({cand, seq});
            gate_input.push_back(std::move(cand));
        }
        if (config.strategy == Strategy::calibrated) {
            auto gated =
                sanitizer::gate_confidence(std::move(gate_input), config.confidence_threshold);
            for (auto& r : gated.rejected) {
                funnel_.add_rejection("below_threshold");
                for (auto& rec : w.records) {
                    if (rec.cand.stage == CandidateStage::canon_survivor &&
                        rec.cand.phrase == r.phrase) {
                        rec.cand = r;
                        break;
                    }
                }
            }
            gate_input = std::move(gated.passed);
        }
        w.ner_input = std::move(gate_input);
    };

    auto ner_batches = [&](SubjectWork& w) {
        std::vector<std::vector<CandidateEntity>> batches;
        size_t step = static_cast<size_t>(options_.ner_batch_size);
        for (size_t i = 0; i < w.ner_input.size(); i += step) {
            size_t end = std::min(w.ner_input.size(), i + step);
            batches.emplace_back(w.ner_input.begin() + i, w.ner_input.begin() + end);
        }
        return batches;
    };

    auto apply_ner = [&](SubjectWork& w, std::vector<CandidateEntity> batch,
                         const std::vector<sanitizer::NerVerdict>* verdicts) {
        auto finalize = [&](CandidateEntity cand) {
            for (auto& rec : w.records) {
                if (rec.cand.stage == CandidateStage::canon_survivor &&
                    rec.cand.phrase == cand.phrase) {
                    rec.cand = std::move(cand);
                    return;
                }
            }
        };
        if (!verdicts) {  // strict gate: the whole batch yields nothing
            for (auto& cand : batch) {
                cand.stage = CandidateStage::rejected;
                cand.rejection_reason = RejectionReason::ner_parse_failure;
                funnel_.add_rejection("ner_parse_failure");
                finalize(std::move(cand));
            }
            return;
        }
        for (size_t i = 0; i < batch.size(); ++i) {
            auto& cand = batch[i];
            if (sanitizer::ner_accepts((*verdicts)[i], config)) {
                cand.stage = CandidateStage::ner_survivor;
                funnel_.add_ner(cand.parent_hop);
                finalize(cand);
                w.ner_survivors.push_back(std::move(cand));
            } else {
                cand.stage = CandidateStage::rejected;
                cand.rejection_reason = RejectionReason::ner_reject;
                funnel_.add_rejection("ner_reject");
                finalize(std::move(cand));
            }
        }
    };

    if (config.execution_mode == ExecutionMode::online) {
        std::atomic<size_t> next{0};
        size_t workers = std::min<size_t>(options_.worker_count, std::max<size_t>(work.size(), 1));
        std::vector<std::thread> pool;
        for (size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    size_t i = next.fetch_add(1);
                    if (i >= work.size()) return;
                    SubjectWork& w = work[i];
                    if (config.self_grounding)
                        w.sheet = gateway::self_ground(gw_, prompts_, w.subject, config);
                    gateway::BackendResult res;
                    try {
                        res = gw_.complete(outline_request(w));
                    } catch (const gateway::GatewayExhausted&) {
                        res.outcome = gateway::Outcome::exhausted;
                    }
                    parse_outline(w, res);
                    if (w.failed) continue;
                    try {
                        res = gw_.complete(elicitation_request(w));
                    } catch (const gateway::GatewayExhausted&) {
                        res.outcome = gateway::Outcome::exhausted;
                    }
                    ingest_article(w, res);
                    if (w.failed) continue;
                    for (auto& batch : ner_batches(w)) {
                        try {
                            auto verdicts =
                                sanitizer::ner_filter(batch, w.subject, config, gw_, prompts_);
                            apply_ner(w, std::move(batch), &verdicts);
                        } catch (const sanitizer::NerParseError&) {
                            apply_ner(w, std::move(batch), nullptr);
                        }
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    } else {
        // Batch mode: requests accumulate per stage per wave and execute as
        // one group; results are delivered before the next stage starts.
        if (config.self_grounding) {
            std::vector<GenerationRequest> reqs;
            for (auto& w : work)
                reqs.push_back(gateway::make_self_ground_request(prompts_, w.subject, config));
            auto results = gw_.complete_batch(reqs);
            for (size_t i = 0; i < work.size(); ++i)
                work[i].sheet = gateway::parse_fact_sheet(results[i]);
        }
        {
            std::vector<GenerationRequest> reqs;
            for (auto& w : work) reqs.push_back(outline_request(w));
            auto results = gw_.complete_batch(reqs);
            for (size_t i = 0; i < work.size(); ++i) parse_outline(work[i], results[i]);
        }
        {
            std::vector<GenerationRequest> reqs;
            std::vector<size_t> live;
            for (size_t i = 0; i < work.size(); ++i) {
                if (!work[i].failed) {
                    live.push_back(i);
                    reqs.push_back(elicitation_request(work[i]));
                }
            }
            auto results = gw_.complete_batch(reqs);
            for (size_t k = 0; k < live.size(); ++k) ingest_article(work[live[k]], results[k]);
        }
        {
            std::vector<GenerationRequest> reqs;
            std::vector<std::pair<size_t, std::vector<CandidateEntity>>> pending;
            for (size_t i = 0; i < work.size(); ++i) {
                if (work[i].failed) continue;
                for (auto& batch : ner_batches(work[i])) {
                    reqs.push_back(
                        sanitizer::make_ner_request(batch, work[i].subject, config, prompts_));
                    pending.emplace_back(i, std::move(batch));
                }
            }
            auto results = gw_.complete_batch(reqs);
            for (size_t k = 0; k < pending.size(); ++k) {
                auto& [idx, batch] = pending[k];
                try {
                    auto verdicts = sanitizer::parse_ner_reply(batch, config, results[k]);
                    apply_ner(work[idx], std::move(batch), &verdicts);
                } catch (const sanitizer::NerParseError&) {
                    apply_ner(work[idx], std::move(batch), nullptr);
                }
            }
        }
    }

    // Subject bookkeeping for this wave.
    for (auto& w : work) {
        auto [it, inserted] = state.subjects.try_emplace(w.subject.canonical_key, w.subject);
        it->second.status = w.failed ? SubjectStatus::failed : SubjectStatus::generated;
        if (w.failed) {
            ++state.failed;
            funnel_.add_rejection(w.failure.empty() ? "subject_failed" : w.failure);
        } else {
            ++state.generated;
            state.articles.push_back(w.article);
        }
    }

    // Stage 3 wave barrier. Winners are chosen order-independently, then
    // commits run serialized in canonical-key order, so arbitration in wave
    // t sees exactly waves 0..t-1 plus earlier commits of wave t.
    std::vector<CandidateEntity> survivors;
    std::map<std::string, std::string> parent_excerpts;
    for (auto& w : work) {
        for (auto& cand : w.ner_survivors) survivors.push_back(std::move(cand));
        if (!w.failed) parent_excerpts[w.subject.name] = utf8_prefix(w.article.wikitext, 500);
    }

    auto record_final = [&](const CandidateEntity& cand) {
        for (auto& w : work) {
            if (w.subject.name != cand.parent_subject) continue;
            for (auto& rec : w.records) {
                if (rec.cand.stage == CandidateStage::ner_survivor &&
                    rec.cand.phrase == cand.phrase) {
                    rec.cand = cand;
                    return;
                }
            }
        }
    };

    std::vector<CandidateEntity> dup_rejected;
    survivors = dedup::within_wave_dedup(std::move(survivors), &dup_rejected);
    for (auto& cand : dup_rejected) {
        funnel_.add_rejection("within_wave_duplicate");
        record_final(cand);
    }

    if (!survivors.empty()) {
        std::vector<std::string> phrases;
        for (const auto& c : survivors) phrases.push_back(c.phrase);
        std::vector<std::vector<double>> vectors;
        bool embed_failed = false;
        try {
            vectors = gw_.embed(phrases);
        } catch (const gateway::GatewayExhausted&) {
            embed_failed = true;  // strict gate: the wave commits nothing
        }
        double threshold = config.similarity_threshold.to_double();
        for (size_t i = 0; i < survivors.size(); ++i) {
            auto& cand = survivors[i];
            if (embed_failed) {
                cand.stage = CandidateStage::rejected;
                cand.rejection_reason = RejectionReason::arbitration_failure;
                funnel_.add_rejection("arbitration_failure");
                record_final(cand);
                continue;
            }
            auto neighbor = state.index.nearest(vectors[i]);
            if (neighbor && neighbor->cosine >= threshold) {
                const std::string* existing = state.index.display_name_of(neighbor->key);
                auto excerpt = parent_excerpts.find(cand.parent_subject);
                auto verdict = dedup::arbitrate(
                    gw_, prompts_, config, cand, existing ? *existing : neighbor->key,
                    excerpt == parent_excerpts.end() ? "" : excerpt->second);
                if (verdict != dedup::Arbitration::distinct) {
                    cand.stage = CandidateStage::rejected;
                    bool same = verdict == dedup::Arbitration::same;
                    cand.rejection_reason = same ? RejectionReason::semantic_duplicate
                                                 : RejectionReason::arbitration_failure;
                    funnel_.add_rejection(same ? "semantic_duplicate" : "arbitration_failure");
                    record_final(cand);
                    continue;
                }
            }
            cand.stage = CandidateStage::sim_survivor;
            funnel_.add_similarity(cand.parent_hop);
            auto result = state.index.commit(cand, vectors[i], wave, allow_enqueue);
            if (result.outcome == dedup::CommitOutcome::committed) {
                cand.stage = CandidateStage::committed;
                if (result.enqueued) {
                    funnel_.add_queued(cand.parent_hop);
                    Subject child;
                    child.name = cand.phrase;
                    child.canonical_key = cand.canonical_key;
                    child.hop = cand.parent_hop + 1;
                    child.status = SubjectStatus::queued;
                    child.parent = cand.parent_subject;
                    state.subjects.emplace(child.canonical_key, std::move(child));
                } else {
                    funnel_.add_rejection("committed_not_enqueued");
                }
            } else {
                cand.stage = CandidateStage::rejected;
                cand.rejection_reason = RejectionReason::duplicate_canonical;
                funnel_.add_rejection("duplicate_canonical");
            }
            record_final(cand);
        }
    }

    for (auto& w : work)
        for (auto& rec : w.records) state.candidate_log.push_back(std::move(rec));
}

void FrontierEngine::snapshot(State& state) const {
    std::vector<Subject> subjects;
    subjects.reserve(state.subjects.size());
    for (const auto& [key, s] : state.subjects) subjects.push_back(s);
    std::sort(subjects.begin(), subjects.end(), [](const Subject& a, const Subject& b) {
        return std::tie(a.hop, a.canonical_key) < std::tie(b.hop, b.canonical_key);
    });
    std::vector<std::string> lines;
    lines.reserve(subjects.size());
    for (const auto& s : subjects) lines.push_back(to_json(s).dump());
    store::write_lines_atomic(state.paths.subjects(), lines);

    std::vector<const Article*> articles;
    for (const auto& a : state.articles) articles.push_back(&a);
    std::sort(articles.begin(), articles.end(), [](const Article* a, const Article* b) {
        return std::tie(a->subject.hop, a->subject.canonical_key) <
               std::tie(b->subject.hop, b->subject.canonical_key);
    });
    lines.clear();
    for (const Article* a : articles) {
        Json j = to_json(*a);
        j["outline_conformant"] =
            a->outline.empty() ? false : wikitext::outline_conformance(*a);
        lines.push_back(j.dump());
    }
    store::write_lines_atomic(state.paths.articles(), lines);

    std::sort(state.candidate_log.begin(), state.candidate_log.end(),
              [](const CandidateRecord& a, const CandidateRecord& b) {
                  return std::tie(a.cand.parent_hop, a.cand.parent_subject, a.seq) <
                         std::tie(b.cand.parent_hop, b.cand.parent_subject, b.seq);
              });
    lines.clear();
    for (const auto& rec : state.candidate_log) {
        Json j = to_json(rec.cand);
        j["seq"] = rec.seq;
        lines.push_back(j.dump());
    }
    store::write_lines_atomic(state.paths.candidates(), lines);

    store::write_json_atomic(state.paths.funnel(), to_json(funnel_.snapshot()));

    lines.clear();
    for (const auto& e : state.index.entities_snapshot())
        lines.push_back(committed_to_json(e).dump());
    store::write_lines_atomic(state.paths.index(), lines);

    lines.clear();
    for (const auto& s : state.index.queue_snapshot()) lines.push_back(to_json(s).dump());
    store::write_lines_atomic(state.paths.queues(), lines);
}

std::vector<Subject> sample_subjects(std::vector<Subject> pool, size_t k, uint64_t seed) {
    std::sort(pool.begin(), pool.end(), [](const Subject& a, const Subject& b) {
        return a.canonical_key < b.canonical_key;
    });
    SplitMixRng rng(splitmix64(seed));
    for (size_t i = pool.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(pool[i - 1], pool[j]);
    }
    if (k < pool.size()) pool.resize(k);
    return pool;
}

}  // namespace parapedia::engine
