#pragma once

#include <filesystem>
#include <functional>
#include <map>

#include "parapedia/corpus_store.hpp"
#include "parapedia/dedup_index.hpp"
#include "parapedia/domain.hpp"
#include "parapedia/gateway.hpp"
#include "parapedia/prompts.hpp"

// Orchestrates BFS waves: article generation, link extraction, the
// three-stage sanitization funnel, atomic commits into the canon queue,
// funnel statistics, and run-directory persistence with resume.
namespace parapedia::engine {

namespace fs = std::filesystem;

struct EngineOptions {
    int worker_count = 4;   // article/NER worker pool in online mode
    int ner_batch_size = 50;
};

struct RunHooks {
    // Called after each wave's snapshot; return false to stop (the run can
    // later continue via resume). Used by interrupt tests.
    std::function<bool(int wave)> continue_after_wave;
};

struct RunReport {
    FunnelSnapshot funnel;
    fs::path run_dir;
    int waves_completed = 0;
    int64_t generated_articles = 0;
    int64_t failed_subjects = 0;
    bool completed = true;  // false when stopped by hooks
};

class FrontierEngine {
public:
    FrontierEngine(gateway::ModelGateway& gw, const prompts::PromptLibrary& prompts,
                   EngineOptions options = {});

    // Seeds the canon queue at hop 0 and expands wave by wave until the
    // queue empties, the article budget is reached, or no subject within
    // the depth cap remains. The run directory is snapshotted after every
    // wave.
    RunReport run(const RunConfig& config, const fs::path& run_dir, const RunHooks& hooks = {});

    // Continues a persisted run. Refuses when the stored config checksum
    // or the template checksums do not match the current assets.
    RunReport resume(const fs::path& run_dir, const RunHooks& hooks = {});

    FunnelSnapshot funnel_snapshot() const;

private:
    struct State;
    RunReport drive(State& state, const RunHooks& hooks);
    void process_wave(State& state, const std::vector<Subject>& wave_subjects,
                      int wave, bool allow_enqueue);
    void snapshot(State& state) const;

    gateway::ModelGateway& gw_;
    const prompts::PromptLibrary& prompts_;
    EngineOptions options_;
    FunnelStats funnel_;
};

// Subject sampling shared by the evaluate command: deterministic
// Fisher-Yates over subjects sorted by canonical key.
std::vector<Subject> sample_subjects(std::vector<Subject> pool, size_t k, uint64_t seed);

}  // namespace parapedia::engine
