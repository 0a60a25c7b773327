#pragma once

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "parapedia/domain.hpp"
#include "parapedia/prompts.hpp"

// The single choke point for all generation and embedding calls:
// pluggable backends, retry with exponential backoff and seeded jitter,
// online/batch execution, and the global concurrency cap shared by every
// pipeline stage.
namespace parapedia::gateway {

struct GenerationRequest {
    prompts::PromptBundle bundle;
    int max_tokens = 4096;
    Rational temperature = Rational(0, 1);  // pipeline runs are temperature 0
    std::string tag;                        // correlation id, also salts retry jitter
};

enum class Outcome { ok, exhausted };

struct BackendResult {
    std::string text;
    int attempts = 0;
    Outcome outcome = Outcome::ok;
};

enum class FailureKind { transient, permanent };

class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& msg, FailureKind kind)
        : std::runtime_error(msg), kind(kind) {}
    FailureKind kind;
};

// Raised when embeddings cannot be produced after retries, and for
// permanent completion failures. Strict-gate handling is the caller's job.
class GatewayExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TextBackend {
public:
    virtual ~TextBackend() = default;
    virtual std::string complete(const GenerationRequest& request) = 0;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual size_t dimension() const = 0;
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

struct GatewayOptions {
    int max_retries = 3;
    int64_t backoff_base_ms = 500;
    int64_t backoff_cap_ms = 60000;
    int concurrency_cap = 8;
    uint64_t seed = 0;
    // Injectable for tests; nullptr sleeps for real.
    std::function<void(int64_t)> sleep_fn;
};

class ModelGateway {
public:
    ModelGateway(std::shared_ptr<TextBackend> text, std::shared_ptr<EmbeddingBackend> embedder,
                 GatewayOptions options);

    // Retries transient failures with delays base*2^k plus bounded jitter
    // from the seeded generator; returns outcome=exhausted after
    // max_retries failed retries. Permanent failures raise GatewayExhausted.
    BackendResult complete(const GenerationRequest& request);

    // Batch contract: the whole request group is executed together (worker
    // fan-out bounded by the concurrency cap) and results are delivered
    // positionally before the caller's commit phase.
    std::vector<BackendResult> complete_batch(const std::vector<GenerationRequest>& requests);

    // One unit vector per input; retried like complete, exhaustion raises.
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);

    size_t embedding_dimension() const { return embedder_->dimension(); }

    // Deterministic backoff schedule, exposed so tests can assert it.
    int64_t backoff_delay_ms(const std::string& tag, int attempt) const;

    int concurrency_cap() const { return options_.concurrency_cap; }
    int max_observed_inflight() const;

private:
    class Slot;
    void acquire();
    void release();
    void sleep_ms(int64_t ms) const;

    std::shared_ptr<TextBackend> text_;
    std::shared_ptr<EmbeddingBackend> embedder_;
    GatewayOptions options_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    int inflight_ = 0;
    int max_inflight_ = 0;
};

// Structured fact sheet produced by the optional self-grounding stage.
struct Fact {
    std::string predicate;
    std::string object;
    Rational confidence;
    bool flagged = false;  // confidence below the 0.75 threshold
};

struct FactSheet {
    std::string summary;
    std::vector<std::string> aliases;
    std::vector<Fact> facts;
};

// Request/parse halves for batch grouping.
GenerationRequest make_self_ground_request(const prompts::PromptLibrary& prompts,
                                           const Subject& subject, const RunConfig& config);
std::optional<FactSheet> parse_fact_sheet(const BackendResult& result);

// Runs the self-grounding prompt and parses the sheet; facts with
// confidence < 0.75 are flagged. Returns nullopt on parse failure or
// backend exhaustion (grounding is optional, callers proceed without it).
std::optional<FactSheet> self_ground(ModelGateway& gw, const prompts::PromptLibrary& prompts,
                                     const Subject& subject, const RunConfig& config);

// Renders a fact sheet into the elicitation grounding block.
std::string grounding_block(const FactSheet& sheet);

}  // namespace parapedia::gateway
