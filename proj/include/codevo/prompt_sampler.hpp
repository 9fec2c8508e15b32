#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "codevo/model_provider.hpp"
#include "codevo/taskspec.hpp"

namespace codevo {

// A database candidate rendered for prompting: its full current program text,
// its metrics, and (optionally) a truncated excerpt of its evaluation output.
struct RenderedCandidate {
    std::string code;
    MetricMap metrics;
    std::string excerpt;
};

// A co-evolved instruction snippet injected into evolution prompts.
struct MetaPrompt {
    std::string text;
    double score = 0.0;  // running mean child improvement
    long uses = 0;
};

struct MetaStore {
    std::vector<MetaPrompt> items;
};

// Assembles one evolution prompt. Section order: system instructions (the
// template with placeholders resolved by weighted sampling), explicit context
// attachments, prior programs (inspirations, in the given order), the current
// program we are trying to improve, output-format rules (diff blocks or a
// full-block rewrite per cfg.full_rewrite), and finally the optional meta
// snippet. With include_results=false no metric values or execution excerpts
// appear anywhere. Pure function of (arguments, rng state).
//
// Throws MissingPlaceholder if the template references a placeholder that has
// no configured alternatives.
std::string build_prompt(const RenderedCandidate& parent,
                         const std::vector<RenderedCandidate>& inspirations,
                         const PromptConfig& cfg, const std::optional<std::string>& meta_text,
                         std::mt19937_64& rng);

// Epsilon-greedy snippet choice: with probability 0.2 a uniformly random
// snippet, otherwise the best-scoring one (uniform among ties). Returns the
// index into store.items; nullopt when the store is empty.
std::optional<std::size_t> select_meta(const MetaStore& store, std::mt19937_64& rng);

// Folds a child's improvement into the used snippet's running mean score.
// Throws UnknownMeta if no stored snippet has the given text.
void update_meta(MetaStore& store, const std::string& used_text, double child_improvement);

// One generate call asking the model for an improved instruction snippet,
// showing the current best snippets. Provider failures and empty responses
// yield nullopt (no snippet is added); a new snippet starts at score 0/uses 0.
std::optional<MetaPrompt> propose_meta(const ModelProvider& provider, const MetaStore& store,
                                       std::int64_t request_id, const std::string& tier = "fast");

}  // namespace codevo
