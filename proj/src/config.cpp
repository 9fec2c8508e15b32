#include "codevo/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace codevo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw Error("ConfigParseError", field + ": " + why);
}

const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void expect_object(const json& v, const std::string& field) {
    if (!v.is_object()) fail(field, "expected an object");
}

std::string get_string(const json& v, const std::string& field) {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
}

long get_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<long>();
}

bool get_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) fail(field, "expected a boolean");
    return v.get<bool>();
}

std::string read_file(const std::filesystem::path& p, const std::string& field) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(field, "cannot read file '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<MetricThreshold> parse_pass_rule(const json& v, const std::string& field) {
    std::vector<MetricThreshold> rule;
    const json& arr = v.is_array() ? v : json::array({v});
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        expect_object(arr[i], f);
        MetricThreshold t;
        const json* metric = find(arr[i], "metric");
        if (!metric) fail(f, "missing 'metric'");
        t.metric = get_string(*metric, f + ".metric");
        if (const json* g = find(arr[i], "gte")) t.gte = get_number(*g, f + ".gte");
        if (const json* l = find(arr[i], "lte")) t.lte = get_number(*l, f + ".lte");
        if (!t.gte && !t.lte) fail(f, "needs 'gte' and/or 'lte'");
        rule.push_back(std::move(t));
    }
    return rule;
}

void parse_prompt(const json& v, PromptConfig& pc) {
    expect_object(v, "prompt");
    if (const json* c = find(v, "context")) {
        pc.explicit_context.clear();
        if (c->is_string()) {
            pc.explicit_context.push_back(c->get<std::string>());
        } else if (c->is_array()) {
            for (std::size_t i = 0; i < c->size(); ++i)
                pc.explicit_context.push_back(
                    get_string((*c)[i], "prompt.context[" + std::to_string(i) + "]"));
        } else {
            fail("prompt.context", "expected a string or array of strings");
        }
    }
    if (const json* t = find(v, "template")) pc.template_text = get_string(*t, "prompt.template");
    if (const json* a = find(v, "alternatives")) {
        expect_object(*a, "prompt.alternatives");
        pc.placeholder_alternatives.clear();
        for (const auto& [name, choices] : a->items()) {
            const std::string f = "prompt.alternatives." + name;
            expect_object(choices, f);
            std::vector<std::pair<std::string, double>> weighted;
            for (const auto& [text, w] : choices.items())
                weighted.emplace_back(text, get_number(w, f));
            if (weighted.empty()) fail(f, "needs at least one alternative");
            pc.placeholder_alternatives[name] = std::move(weighted);
        }
    }
    if (const json* n = find(v, "inspirations"))
        pc.num_inspirations = static_cast<int>(get_integer(*n, "prompt.inspirations"));
    if (const json* r = find(v, "include_results"))
        pc.include_results = get_bool(*r, "prompt.include_results");
    if (const json* m = find(v, "meta_prompt"))
        pc.meta_prompt_enabled = get_bool(*m, "prompt.meta_prompt");
    if (const json* fr = find(v, "full_rewrite"))
        pc.full_rewrite = get_bool(*fr, "prompt.full_rewrite");
    if (const json* e = find(v, "excerpt_cap"))
        pc.excerpt_cap = static_cast<std::size_t>(get_integer(*e, "prompt.excerpt_cap"));
}

void parse_archive(const json& v, ArchiveConfig& ac) {
    expect_object(v, "archive");
    if (const json* n = find(v, "islands"))
        ac.num_islands = static_cast<int>(get_integer(*n, "archive.islands"));
    if (const json* p = find(v, "migration_period"))
        ac.migration_period = get_integer(*p, "archive.migration_period");
    if (const json* c = find(v, "migration_count"))
        ac.migration_count = static_cast<int>(get_integer(*c, "archive.migration_count"));
    if (const json* pp = find(v, "parent_policy"))
        ac.parent_policy = get_number(*pp, "archive.parent_policy");
    if (const json* f = find(v, "features")) {
        expect_object(*f, "archive.features");
        ac.feature_dims.clear();
        for (const auto& [name, buckets] : f->items())
            ac.feature_dims.emplace_back(
                name, static_cast<int>(get_integer(buckets, "archive.features." + name)));
        if (ac.feature_dims.empty()) fail("archive.features", "needs at least one descriptor");
    }
}

ModelProvider parse_provider(const json* v, const std::string& base_dir) {
    if (!v) {
        // No provider section: fall back to the environment-configured HTTP
        // backend when present, else stay unconfigured (a CLI --stub-script or
        // caller-supplied provider may still take over).
        if (std::getenv("EVOLVE_MODEL_ENDPOINT") != nullptr) return ModelProvider::remote("", "");
        return ModelProvider();
    }
    expect_object(*v, "provider");
    std::string backend = "http";
    if (const json* b = find(*v, "backend")) backend = get_string(*b, "provider.backend");
    if (backend == "stub") {
        const json* script = find(*v, "stub_script");
        if (!script) fail("provider.stub_script", "required for the stub backend");
        std::filesystem::path p = get_string(*script, "provider.stub_script");
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return ModelProvider::stub_from_file(p.string());
    }
    if (backend == "http") {
        std::string endpoint, token;
        double deadline_s = 120.0;
        int max_in_flight = 16;
        if (const json* e = find(*v, "endpoint")) endpoint = get_string(*e, "provider.endpoint");
        if (const json* t = find(*v, "token")) token = get_string(*t, "provider.token");
        if (const json* d = find(*v, "deadline_s"))
            deadline_s = get_number(*d, "provider.deadline_s");
        if (const json* m = find(*v, "max_in_flight"))
            max_in_flight = static_cast<int>(get_integer(*m, "provider.max_in_flight"));
        return ModelProvider::remote(endpoint, token, deadline_s, max_in_flight);
    }
    fail("provider.backend", "unknown backend '" + backend + "' (expected stub or http)");
}

}  // namespace

LoadedConfig parse_config(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw Error("ConfigParseError", e.what());
    }
    expect_object(doc, "(document)");

    LoadedConfig out;

    const json* files = find(doc, "files");
    if (!files || !files->is_array() || files->empty())
        fail("files", "required non-empty array of {path, source|from}");
    std::vector<std::pair<std::string, std::string>> raw;
    for (std::size_t i = 0; i < files->size(); ++i) {
        const std::string f = "files[" + std::to_string(i) + "]";
        expect_object((*files)[i], f);
        const json* path = find((*files)[i], "path");
        if (!path) fail(f, "missing 'path'");
        std::string name = get_string(*path, f + ".path");
        std::string content;
        if (const json* src = find((*files)[i], "source")) {
            content = get_string(*src, f + ".source");
        } else if (const json* from = find((*files)[i], "from")) {
            std::filesystem::path p = get_string(*from, f + ".from");
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            content = read_file(p, f + ".from");
        } else {
            fail(f, "needs 'source' (inline text) or 'from' (file reference)");
        }
        raw.emplace_back(std::move(name), std::move(content));
    }
    try {
        out.task = parse_task(raw);
    } catch (const Error& e) {
        fail("files", std::string(e.code()) + ": " + e.what());
    }

    const json* eval_command = find(doc, "eval_command");
    const json* stages = find(doc, "stages");
    if (!eval_command && !stages) fail("eval_command", "required (or provide 'stages')");
    if (eval_command) out.task.eval_command = get_string(*eval_command, "eval_command");
    if (stages) {
        if (!stages->is_array()) fail("stages", "expected an array");
        for (std::size_t i = 0; i < stages->size(); ++i) {
            const std::string f = "stages[" + std::to_string(i) + "]";
            expect_object((*stages)[i], f);
            CascadeStage st;
            if (const json* n = find((*stages)[i], "name")) st.name = get_string(*n, f + ".name");
            else st.name = "stage" + std::to_string(i);
            if (const json* c = find((*stages)[i], "command"))
                st.command_args = get_string(*c, f + ".command");
            if (const json* t = find((*stages)[i], "timeout_s"))
                st.timeout_s = get_number(*t, f + ".timeout_s");
            if (const json* p = find((*stages)[i], "pass"))
                st.pass_rule = parse_pass_rule(*p, f + ".pass");
            out.task.cascade.push_back(std::move(st));
        }
    }

    if (const json* m = find(doc, "metric_names")) {
        if (!m->is_array()) fail("metric_names", "expected an array of strings");
        for (std::size_t i = 0; i < m->size(); ++i)
            out.task.metric_names.push_back(
                get_string((*m)[i], "metric_names[" + std::to_string(i) + "]"));
    }
    if (const json* o = find(doc, "objective")) {
        out.task.objective = get_string(*o, "objective");
        if (out.task.objective != "mean") fail("objective", "the only supported rule is 'mean'");
    }
    if (const json* b = find(doc, "budget")) {
        expect_object(*b, "budget");
        if (const json* c = find(*b, "candidates"))
            out.task.budget_candidates = get_integer(*c, "budget.candidates");
        if (const json* w = find(*b, "wallclock_s"))
            out.task.budget_wallclock_s = get_number(*w, "budget.wallclock_s");
    }
    if (const json* a = find(doc, "abstraction_mode"))
        out.task.abstraction_mode = get_string(*a, "abstraction_mode");
    if (const json* mb = find(doc, "mutable_blocks")) {
        if (!mb->is_array()) fail("mutable_blocks", "expected an array of block ids");
        for (std::size_t i = 0; i < mb->size(); ++i)
            out.task.mutable_blocks.insert(static_cast<int>(
                get_integer((*mb)[i], "mutable_blocks[" + std::to_string(i) + "]")));
    }
    if (const json* fr = find(doc, "feedback_rubric"))
        out.task.feedback_rubric = get_string(*fr, "feedback_rubric");
    if (const json* p = find(doc, "prompt")) parse_prompt(*p, out.task.prompt_config);

    out.run.budget_candidates = out.task.budget_candidates;
    out.run.budget_wallclock_s = out.task.budget_wallclock_s;
    if (const json* ar = find(doc, "archive")) parse_archive(*ar, out.run.archive);
    if (const json* ab = find(doc, "ablations")) {
        expect_object(*ab, "ablations");
        auto flag = [&](const char* name, bool& slot) {
            if (const json* f = find(*ab, name)) slot = get_bool(*f, std::string("ablations.") + name);
        };
        flag("no_evolution", out.run.ablations.no_evolution);
        flag("no_context", out.run.ablations.no_context);
        flag("no_meta_prompt", out.run.ablations.no_meta_prompt);
        flag("restrict_blocks", out.run.ablations.restrict_blocks);
        flag("fast_tier_only", out.run.ablations.fast_tier_only);
    }
    if (const json* rb = find(doc, "restricted_blocks")) {
        if (!rb->is_array()) fail("restricted_blocks", "expected an array of block ids");
        for (std::size_t i = 0; i < rb->size(); ++i)
            out.run.restricted_blocks.push_back(static_cast<int>(
                get_integer((*rb)[i], "restricted_blocks[" + std::to_string(i) + "]")));
    }
    if (const json* t = find(doc, "tiers")) {
        expect_object(*t, "tiers");
        if (const json* f = find(*t, "fast")) out.run.tier_weights.fast = get_number(*f, "tiers.fast");
        if (const json* s = find(*t, "strong"))
            out.run.tier_weights.strong = get_number(*s, "tiers.strong");
    }
    if (const json* c = find(doc, "concurrency"))
        out.run.concurrency = static_cast<int>(get_integer(*c, "concurrency"));
    if (const json* m = find(doc, "max_output"))
        out.run.max_output = get_integer(*m, "max_output");
    if (const json* t = find(doc, "temperature")) out.run.temperature = get_number(*t, "temperature");
    if (const json* mp = find(doc, "meta_period"))
        out.run.meta_period = get_integer(*mp, "meta_period");
    if (const json* cp = find(doc, "capture_prompts"))
        out.run.capture_prompts = get_bool(*cp, "capture_prompts");
    if (const json* r = find(doc, "refine")) {
        expect_object(*r, "refine");
        RefineConfig rc;
        if (const json* n = find(*r, "rounds"))
            rc.rounds = static_cast<int>(get_integer(*n, "refine.rounds"));
        if (const json* tb = find(*r, "time_budget_s"))
            rc.time_budget_s = get_number(*tb, "refine.time_budget_s");
        out.run.refine = rc;
    }
    if (const json* s = find(doc, "seed")) out.seed = static_cast<std::uint64_t>(get_integer(*s, "seed"));

    try {
        out.provider = parse_provider(find(doc, "provider"), base_dir);
    } catch (const Error& e) {
        if (std::string(e.code()) == "ConfigParseError") throw;
        fail("provider", std::string(e.code()) + ": " + e.what());
    }
    return out;
}

LoadedConfig load_config(const std::string& path) {
    std::filesystem::path p(path);
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("ConfigParseError", "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace codevo
