#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "codevo/common.hpp"

namespace codevo {

// Sampling weights of the two model tiers. Weights must sum to 1.
struct TierWeights {
    double fast = 0.8;
    double strong = 0.2;
};

struct GenerationRequest {
    std::string prompt;            // non-empty
    std::string tier = "fast";     // "fast" | "strong"
    long max_output = 8192;        // output size cap, in bytes of text
    double temperature = 0.7;      // diversity knob, >= 0
    std::int64_t request_id = 0;   // unique per call within a run
};

// Exactly one of text/failure is meaningful: failure unset means text is the
// model output (possibly empty string only for degenerate backends — the stub
// never produces one). Model-side errors are data, never exceptions.
struct GenerationResult {
    std::string text;
    std::string tier_used;
    double latency_s = 0.0;
    std::optional<std::string> failure;  // "Timeout" | "StubExhausted" | "HttpError" | "BadResponse"

    bool ok() const { return !failure.has_value(); }
};

// Samples "fast"/"strong" with the given probabilities. Deterministic given
// the generator state.
std::string pick_tier(const TierWeights& weights, std::mt19937_64& rng);

// Uniform interface over the two backends. Copyable handle (shared state);
// generate is safe to call from multiple workers concurrently.
class ModelProvider {
  public:
    ModelProvider() = default;

    // Deterministic scripted backend. The script is a plain-text document of
    // records:
    //
    //   ### match: <substring or *>
    //   <response text, any number of lines>
    //
    // generate() serves the first not-yet-consumed record whose predicate
    // matches the prompt ("*" matches everything); each record is consumed
    // once, so repeating a predicate yields a response sequence. No remaining
    // match -> failure=StubExhausted.
    static ModelProvider stub(const std::string& script);
    static ModelProvider stub_from_file(const std::string& path);

    // Remote HTTP backend: POSTs {prompt, tier, temperature, max_output,
    // request_id} as JSON to the endpoint URL and expects {"text": ...} back.
    // Endpoint/token may also come from EVOLVE_MODEL_ENDPOINT /
    // EVOLVE_MODEL_TOKEN when the arguments are empty. At most `max_in_flight`
    // requests run concurrently; a request exceeding deadline_s yields
    // failure=Timeout.
    static ModelProvider remote(const std::string& endpoint, const std::string& token,
                                double deadline_s = 120.0, int max_in_flight = 16);

    // Throws ConfigError if no backend is configured; everything the backend
    // itself gets wrong comes back as a failure tag.
    GenerationResult generate(const GenerationRequest& req) const;

    // True for backends whose outputs are a pure function of the call
    // sequence (the stub). The controller serializes generate calls for such
    // backends so runs stay bit-reproducible.
    bool deterministic() const;

    bool configured() const { return impl_ != nullptr; }

    // Number of script records not yet consumed (stub only; 0 otherwise).
    std::size_t stub_remaining() const;

    struct Backend;

  private:
    std::shared_ptr<Backend> impl_;
};

}  // namespace codevo
