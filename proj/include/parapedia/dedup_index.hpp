#pragma once

#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "parapedia/domain.hpp"
#include "parapedia/gateway.hpp"
#include "parapedia/prompts.hpp"

// Stage 3: embedding index over committed entities, within-wave
// cross-candidate deduplication, model arbitration of near-duplicates, and
// the atomic commit guaranteeing a duplicate-free canon queue.
namespace parapedia::dedup {

struct CommittedEntity {
    std::string canonical_key;
    std::string display_name;
    std::vector<double> vector;  // L2-normalized
    int wave = 0;
    int hop = 0;
};

struct NearestResult {
    std::string key;
    double cosine = 0.0;
};

enum class CommitOutcome { committed, already_present };

struct CommitResult {
    CommitOutcome outcome = CommitOutcome::already_present;
    bool enqueued = false;
};

class DedupIndex {
public:
    bool contains(const std::string& canonical_key) const;
    size_t size() const;

    // Exact linear-scan maximum-cosine search; ties break to the
    // lexicographically smallest key so results are reproducible.
    std::optional<NearestResult> nearest(const std::vector<double>& v) const;

    // Atomic: if the key is absent, registers key and vector and (when
    // enqueue is set) pushes Subject{hop = parent_hop + 1} onto the canon
    // queue, all under one lock; otherwise reports already_present with no
    // side effects. enqueue=false is used when a depth or budget cap stops
    // expansion but the entity itself is recorded.
    CommitResult commit(const CandidateEntity& candidate, const std::vector<double>& vec,
                        int wave, bool enqueue = true);

    std::optional<Subject> pop_queued();
    std::vector<Subject> queue_snapshot() const;
    size_t queue_size() const;
    void requeue(std::vector<Subject> subjects);  // resume path

    std::vector<CommittedEntity> entities_snapshot() const;
    void restore_entities(std::vector<CommittedEntity> entities);

    const std::string* display_name_of(const std::string& canonical_key) const;

private:
    mutable std::mutex mu_;
    std::vector<CommittedEntity> entities_;
    std::unordered_map<std::string, size_t> by_key_;
    std::deque<Subject> canon_queue_;
};

// Collapses identical canonical keys within one wave: the survivor is the
// proposal whose parent has minimal hop, ties broken by lexicographic
// parent name; order of the input does not affect the outcome. Collapsed
// duplicates land in *rejected with reason duplicate_canonical.
std::vector<CandidateEntity> within_wave_dedup(std::vector<CandidateEntity> candidates,
                                               std::vector<CandidateEntity>* rejected);

enum class Arbitration { same, distinct, failure };

// Model decision on whether the candidate denotes the existing committed
// entity. Backend exhaustion or an unparseable reply yields failure and
// the caller rejects the candidate with arbitration_failure.
Arbitration arbitrate(gateway::ModelGateway& gw, const prompts::PromptLibrary& prompts,
                      const RunConfig& config, const CandidateEntity& candidate,
                      const std::string& existing_display, const std::string& parent_excerpt);

double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace parapedia::dedup
