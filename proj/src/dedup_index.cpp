#include "parapedia/dedup_index.hpp"

#include <algorithm>
#include <map>

namespace parapedia::dedup {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) dot += a[i] * b[i];
    return dot;  // inputs are unit vectors
}

bool DedupIndex::contains(const std::string& canonical_key) const {
    std::lock_guard lock(mu_);
    return by_key_.count(canonical_key) > 0;
}

size_t DedupIndex::size() const {
    std::lock_guard lock(mu_);
    return entities_.size();
}

std::optional<NearestResult> DedupIndex::nearest(const std::vector<double>& v) const {
    std::lock_guard lock(mu_);
    std::optional<NearestResult> best;
    for (const auto& e : entities_) {
        double c = cosine(v, e.vector);
        if (!best || c > best->cosine || (c == best->cosine && e.canonical_key < best->key)) {
            best = NearestResult{e.canonical_key, c};
        }
    }
    return best;
}

CommitResult DedupIndex::commit(const CandidateEntity& candidate, const std::vector<double>& vec,
                                int wave, bool enqueue) {
    std::lock_guard lock(mu_);
    if (by_key_.count(candidate.canonical_key)) return {CommitOutcome::already_present, false};
    CommittedEntity entity;
    entity.canonical_key = candidate.canonical_key;
    entity.display_name = candidate.phrase;
    entity.vector = vec;
    entity.wave = wave;
    entity.hop = candidate.parent_hop + 1;
    by_key_[entity.canonical_key] = entities_.size();
    entities_.push_back(std::move(entity));
    if (enqueue) {
        Subject s;
        s.name = candidate.phrase;
        s.canonical_key = candidate.canonical_key;
        s.hop = candidate.parent_hop + 1;
        s.status = SubjectStatus::queued;
        s.parent = candidate.parent_subject;
        canon_queue_.push_back(std::move(s));
    }
    return {CommitOutcome::committed, enqueue};
}

std::optional<Subject> DedupIndex::pop_queued() {
    std::lock_guard lock(mu_);
    if (canon_queue_.empty()) return std::nullopt;
    Subject s = std::move(canon_queue_.front());
    canon_queue_.pop_front();
    return s;
}

std::vector<Subject> DedupIndex::queue_snapshot() const {
    std::lock_guard lock(mu_);
    return {canon_queue_.begin(), canon_queue_.end()};
}

size_t DedupIndex::queue_size() const {
    std::lock_guard lock(mu_);
    return canon_queue_.size();
}

void DedupIndex::requeue(std::vector<Subject> subjects) {
    std::lock_guard lock(mu_);
    for (auto& s : subjects) canon_queue_.push_back(std::move(s));
}

std::vector<CommittedEntity> DedupIndex::entities_snapshot() const {
    std::lock_guard lock(mu_);
    return entities_;
}

void DedupIndex::restore_entities(std::vector<CommittedEntity> entities) {
    std::lock_guard lock(mu_);
    entities_ = std::move(entities);
    by_key_.clear();
    for (size_t i = 0; i < entities_.size(); ++i) by_key_[entities_[i].canonical_key] = i;
}

const std::string* DedupIndex::display_name_of(const std::string& canonical_key) const {
    std::lock_guard lock(mu_);
    auto it = by_key_.find(canonical_key);
    return it == by_key_.end() ? nullptr : &entities_[it->second].display_name;
}

std::vector<CandidateEntity> within_wave_dedup(std::vector<CandidateEntity> candidates,
                                               std::vector<CandidateEntity>* rejected) {
    // Winner per key: minimal (parent_hop, parent_subject); first-come order
    // never matters.
    std::map<std::string, size_t> winner;
    for (size_t i = 0; i < candidates.size(); ++i) {
        auto [it, inserted] = winner.try_emplace(candidates[i].canonical_key, i);
        if (inserted) continue;
        const auto& cur = candidates[it->second];
        const auto& cand = candidates[i];
        if (cand.parent_hop < cur.parent_hop ||
            (cand.parent_hop == cur.parent_hop && cand.parent_subject < cur.parent_subject)) {
            it->second = i;
        }
    }
    std::vector<CandidateEntity> survivors;
    survivors.reserve(winner.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        auto& c = candidates[i];
        if (winner.at(c.canonical_key) == i) {
            survivors.push_back(std::move(c));
        } else if (rejected) {
            c.stage = CandidateStage::rejected;
            c.rejection_reason = RejectionReason::duplicate_canonical;
            rejected->push_back(std::move(c));
        }
    }
    return survivors;
}

Arbitration arbitrate(gateway::ModelGateway& gw, const prompts::PromptLibrary& prompts,
                      const RunConfig& config, const CandidateEntity& candidate,
                      const std::string& existing_display, const std::string& parent_excerpt) {
    prompts::Context context;
    context["candidate_name"] = candidate.phrase;
    context["existing_name"] = existing_display;
    context["parent_excerpt"] = parent_excerpt;

    Subject subject;
    subject.name = candidate.parent_subject;
    subject.canonical_key = candidate.canonical_key;

    gateway::GenerationRequest request;
    request.bundle = prompts.render(prompts::PromptStage::arbitration, config, subject, context);
    request.tag = "arb:" + candidate.canonical_key;

    gateway::BackendResult result;
    try {
        result = gw.complete(request);
    } catch (const gateway::GatewayExhausted&) {
        return Arbitration::failure;
    }
    if (result.outcome != gateway::Outcome::ok) return Arbitration::failure;
    try {
        Json j = Json::parse(result.text);
        std::string verdict = j.at("verdict").get<std::string>();
        if (verdict == "same") return Arbitration::same;
        if (verdict == "distinct") return Arbitration::distinct;
    } catch (const std::exception&) {
    }
    return Arbitration::failure;
}

}  // namespace parapedia::dedup
