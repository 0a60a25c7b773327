#include "parapedia/gateway.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "parapedia/hashing.hpp"

namespace parapedia::gateway {

ModelGateway::ModelGateway(std::shared_ptr<TextBackend> text,
                           std::shared_ptr<EmbeddingBackend> embedder, GatewayOptions options)
    : text_(std::move(text)), embedder_(std::move(embedder)), options_(std::move(options)) {
    if (options_.concurrency_cap <= 0)
        throw std::invalid_argument("concurrency cap must be positive");
}

void ModelGateway::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return inflight_ < options_.concurrency_cap; });
    ++inflight_;
    if (inflight_ > max_inflight_) max_inflight_ = inflight_;
}

void ModelGateway::release() {
    {
        std::lock_guard lock(mu_);
        --inflight_;
    }
    cv_.notify_one();
}

int ModelGateway::max_observed_inflight() const {
    std::lock_guard lock(mu_);
    return max_inflight_;
}

void ModelGateway::sleep_ms(int64_t ms) const {
    if (ms <= 0) return;
    if (options_.sleep_fn) {
        options_.sleep_fn(ms);
    } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
}

int64_t ModelGateway::backoff_delay_ms(const std::string& tag, int attempt) const {
    int64_t base = options_.backoff_base_ms;
    if (base <= 0) return 0;
    int64_t window = base;
    for (int k = 0; k < attempt && window < options_.backoff_cap_ms; ++k) window *= 2;
    if (window > options_.backoff_cap_ms) window = options_.backoff_cap_ms;
    SplitMixRng rng(derive_seed(options_.seed, tag) + static_cast<uint64_t>(attempt));
    int64_t jitter = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(window)));
    int64_t delay = window + jitter;
    return delay > options_.backoff_cap_ms ? options_.backoff_cap_ms : delay;
}

BackendResult ModelGateway::complete(const GenerationRequest& request) {
    BackendResult result;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        result.attempts = attempt + 1;
        acquire();
        try {
            result.text = text_->complete(request);
            release();
            result.outcome = Outcome::ok;
            return result;
        } catch (const BackendError& err) {
            release();
            if (err.kind == FailureKind::permanent)
                throw GatewayExhausted(std::string("permanent backend failure: ") + err.what());
            if (attempt < options_.max_retries)
                sleep_ms(backoff_delay_ms(request.tag, attempt));
        }
    }
    result.text.clear();
    result.outcome = Outcome::exhausted;
    return result;
}

std::vector<BackendResult> ModelGateway::complete_batch(
    const std::vector<GenerationRequest>& requests) {
    std::vector<BackendResult> results(requests.size());
    if (requests.empty()) return results;
    size_t workers = static_cast<size_t>(options_.concurrency_cap);
    if (workers > requests.size()) workers = requests.size();
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex err_mu;
    std::exception_ptr first_error;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= requests.size()) return;
                try {
                    results[i] = complete(requests[i]);
                } catch (...) {
                    std::lock_guard lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    results[i] = BackendResult{"", options_.max_retries + 1, Outcome::exhausted};
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

std::vector<std::vector<double>> ModelGateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw std::invalid_argument("embed requires non-empty input");
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        acquire();
        try {
            auto vectors = embedder_->embed(texts);
            release();
            return vectors;
        } catch (const BackendError& err) {
            release();
            if (err.kind == FailureKind::permanent)
                throw GatewayExhausted(std::string("permanent embedding failure: ") + err.what());
            if (attempt < options_.max_retries) sleep_ms(backoff_delay_ms("embed", attempt));
        }
    }
    throw GatewayExhausted("embedding backend exhausted after retries");
}

GenerationRequest make_self_ground_request(const prompts::PromptLibrary& prompts,
                                           const Subject& subject, const RunConfig& config) {
    GenerationRequest request;
    request.bundle = prompts.render(prompts::PromptStage::self_grounding, config, subject);
    request.tag = "ground:" + subject.canonical_key;
    return request;
}

std::optional<FactSheet> self_ground(ModelGateway& gw, const prompts::PromptLibrary& prompts,
                                     const Subject& subject, const RunConfig& config) {
    BackendResult result;
    try {
        result = gw.complete(make_self_ground_request(prompts, subject, config));
    } catch (const GatewayExhausted&) {
        return std::nullopt;
    }
    return parse_fact_sheet(result);
}

std::optional<FactSheet> parse_fact_sheet(const BackendResult& result) {
    if (result.outcome != Outcome::ok) return std::nullopt;

    const Rational threshold(3, 4);
    try {
        Json j = Json::parse(result.text);
        FactSheet sheet;
        sheet.summary = j.at("summary").get<std::string>();
        sheet.aliases = j.at("aliases").get<std::vector<std::string>>();
        for (const auto& fj : j.at("facts")) {
            Fact f;
            f.predicate = fj.at("predicate").get<std::string>();
            f.object = fj.at("object").get<std::string>();
            f.confidence = rational_from_json(fj.at("confidence"));
            f.flagged = f.confidence < threshold;
            sheet.facts.push_back(std::move(f));
        }
        return sheet;
    } catch (const std::exception&) {
        return std::nullopt;  // proceed ungrounded, caller records a warning
    }
}

std::string grounding_block(const FactSheet& sheet) {
    std::string out = "\nFact sheet (self-grounded):\nSummary: " + sheet.summary + "\n";
    if (!sheet.aliases.empty()) {
        out += "Aliases: ";
        for (size_t i = 0; i < sheet.aliases.size(); ++i) {
            if (i) out += ", ";
            out += sheet.aliases[i];
        }
        out += "\n";
    }
    for (const auto& f : sheet.facts) {
        out += "- " + f.predicate + ": " + f.object + " (" + f.confidence.to_exact_string() + ")";
        if (f.flagged) out += " [flagged: below threshold]";
        out += "\n";
    }
    return out;
}

}  // namespace parapedia::gateway
