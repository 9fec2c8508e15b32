#include "codevo/prompt_sampler.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace codevo {

namespace {

std::string resolve_placeholders(const PromptConfig& cfg, std::mt19937_64& rng) {
    const std::string& tpl = cfg.template_text;
    std::string out;
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        std::size_t open = tpl.find("{{", pos);
        if (open == std::string::npos) {
            out += tpl.substr(pos);
            break;
        }
        std::size_t close = tpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out += tpl.substr(pos);
            break;
        }
        out += tpl.substr(pos, open - pos);
        std::string name = trim(tpl.substr(open + 2, close - open - 2));
        auto it = cfg.placeholder_alternatives.find(name);
        if (it == cfg.placeholder_alternatives.end() || it->second.empty())
            throw Error("MissingPlaceholder", "template placeholder has no alternatives: " + name);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double draw = u(rng), acc = 0.0;
        const std::string* chosen = &it->second.back().first;
        for (const auto& [text, p] : it->second) {
            acc += p;
            if (draw < acc) {
                chosen = &text;
                break;
            }
        }
        out += *chosen;
        pos = close + 2;
    }
    return out;
}

double mean_of(const MetricMap& m) {
    if (m.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [k, v] : m) s += v;
    return s / static_cast<double>(m.size());
}

std::string format_score(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void render_candidate(std::string& out, const RenderedCandidate& c, const PromptConfig& cfg) {
    if (cfg.include_results) {
        out += "## Program (average_score: " + format_score(mean_of(c.metrics)) + ")\n";
        out += "Metrics: " + nlohmann::json(c.metrics).dump() + "\n";
        if (!c.excerpt.empty()) {
            out += "Output:\n";
            out += truncate_middle(c.excerpt, cfg.excerpt_cap);
            if (out.back() != '\n') out += '\n';
        }
    } else {
        out += "## Program\n";
    }
    out += "Code:\n";
    out += c.code;
    if (out.back() != '\n') out += '\n';
    out += '\n';
}

const char* kDiffRules =
    "Propose your changes as one or more blocks, each in exactly this form:\n"
    "<<<<<<< SEARCH\n"
    "(exact text that appears in the current program)\n"
    "=======\n"
    "(the replacement text)\n"
    ">>>>>>> REPLACE\n"
    "The SEARCH text must match the current program byte for byte. Only text\n"
    "inside the marked evolve regions may be changed; everything else is\n"
    "immutable skeleton. Text outside the blocks is treated as commentary.\n";

const char* kRewriteRules =
    "Output the complete replacement text for the evolve block, and nothing\n"
    "else. You may wrap it in a single fenced code block.\n";

}  // namespace

std::string build_prompt(const RenderedCandidate& parent,
                         const std::vector<RenderedCandidate>& inspirations,
                         const PromptConfig& cfg, const std::optional<std::string>& meta_text,
                         std::mt19937_64& rng) {
    std::string out;
    out += "# System instructions\n";
    out += resolve_placeholders(cfg, rng);
    if (out.back() != '\n') out += '\n';
    out += '\n';

    if (!cfg.explicit_context.empty()) {
        out += "# Context\n";
        for (const auto& att : cfg.explicit_context) {
            out += att;
            if (out.back() != '\n') out += '\n';
        }
        out += '\n';
    }

    if (!inspirations.empty()) {
        out += "# Prior programs\n";
        out += "Previously discovered solutions, for inspiration:\n";
        for (const auto& insp : inspirations) render_candidate(out, insp, cfg);
    }

    out += "# Current program\n";
    out += "Here is the program we are trying to improve:\n";
    render_candidate(out, parent, cfg);

    out += "# Output format\n";
    out += cfg.full_rewrite ? kRewriteRules : kDiffRules;

    if (meta_text && !meta_text->empty()) {
        out += "\n# Guidance\n";
        out += *meta_text;
        if (out.back() != '\n') out += '\n';
    }
    return out;
}

std::optional<std::size_t> select_meta(const MetaStore& store, std::mt19937_64& rng) {
    if (store.items.empty()) return std::nullopt;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < 0.2) {
        std::uniform_int_distribution<std::size_t> pick(0, store.items.size() - 1);
        return pick(rng);
    }
    double best = store.items[0].score;
    for (const auto& m : store.items) best = std::max(best, m.score);
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < store.items.size(); ++i)
        if (store.items[i].score == best) ties.push_back(i);
    if (ties.size() == 1) return ties[0];
    std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
    return ties[pick(rng)];
}

void update_meta(MetaStore& store, const std::string& used_text, double child_improvement) {
    for (auto& m : store.items) {
        if (m.text != used_text) continue;
        m.score = (m.score * static_cast<double>(m.uses) + child_improvement) /
                  static_cast<double>(m.uses + 1);
        ++m.uses;
        return;
    }
    throw Error("UnknownMeta", "no stored snippet with the given text");
}

std::optional<MetaPrompt> propose_meta(const ModelProvider& provider, const MetaStore& store,
                                       std::int64_t request_id, const std::string& tier) {
    std::string prompt;
    prompt += "# Instruction snippet improvement\n";
    prompt += "You maintain short guidance snippets that steer code rewrites.\n";
    if (store.items.empty()) {
        prompt += "There are no snippets yet.\n";
    } else {
        std::vector<const MetaPrompt*> ranked;
        for (const auto& m : store.items) ranked.push_back(&m);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const MetaPrompt* a, const MetaPrompt* b) { return a->score > b->score; });
        prompt += "Current snippets with their mean observed improvement:\n";
        std::size_t shown = std::min<std::size_t>(ranked.size(), 5);
        for (std::size_t i = 0; i < shown; ++i)
            prompt += "- (" + std::to_string(ranked[i]->score) + ") " + ranked[i]->text + "\n";
    }
    prompt += "Propose one improved snippet. Reply with the snippet text only.\n";

    GenerationRequest req;
    req.prompt = std::move(prompt);
    req.tier = tier;
    req.request_id = request_id;
    GenerationResult res = provider.generate(req);
    if (!res.ok()) return std::nullopt;
    std::string text = trim(res.text);
    if (text.empty()) return std::nullopt;
    return MetaPrompt{text, 0.0, 0};
}

}  // namespace codevo
