#include "codevo/controller.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <random>

#include "codevo/mutation.hpp"
#include "codevo/prompt_sampler.hpp"
#include "json.hpp"

namespace codevo {

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;

std::optional<double> objective_of(const MetricMap& metrics,
                                   const std::vector<std::string>& names) {
    double sum = 0.0;
    std::size_t count = 0;
    if (names.empty()) {
        for (const auto& [k, v] : metrics) {
            sum += v;
            ++count;
        }
    } else {
        for (const auto& name : names) {
            auto it = metrics.find(name);
            if (it == metrics.end()) return std::nullopt;
            sum += it->second;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    double mean = sum / static_cast<double>(count);
    if (!std::isfinite(mean)) return std::nullopt;
    return mean;
}

std::string full_text(const Files& files) {
    std::string out;
    for (const auto& [path, content] : files) out += content;
    return out;
}

struct JobOutcome {
    GenerationResult gen;
    MutationResult mut;
    EvaluationResult eval;
    bool reached_eval = false;
    std::vector<std::string> child_blocks;
    Files child_files;
};

struct Job {
    long seq = 0;
    int island = 0;
    std::optional<std::int64_t> parent_id;
    double parent_objective = 0.0;
    std::string tier;
    std::optional<std::string> meta_text;
    std::future<JobOutcome> outcome;
};

struct LoopState {
    MetaStore meta;
    std::int64_t meta_proposals = 0;
    long applied_since_meta = 0;
};

// One evolution round over an already seeded archive.
void run_loop(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
              std::mt19937_64& rng, ProgramDb& db, RunReport& report, LoopState& st,
              const std::string& warm_start, double wallclock_s, long round_budget) {
    TaskSpec local_task = task;
    if (cfg.ablations.restrict_blocks)
        local_task.mutable_blocks =
            std::set<int>(cfg.restricted_blocks.begin(), cfg.restricted_blocks.end());
    PromptConfig pc = local_task.prompt_config;
    if (cfg.ablations.no_context) pc.explicit_context.clear();
    const bool meta_enabled = pc.meta_prompt_enabled && !cfg.ablations.no_meta_prompt;
    const bool ordered_generation = provider.deterministic();

    const std::vector<std::string> initial = initial_blocks(local_task);
    // Island 0's copy of the initial program backs the no_evolution ablation.
    Candidate seed_cand;
    if (db.has(0)) seed_cand = db.get(0);
    else seed_cand.block_texts = initial;

    auto render = [&](const std::vector<std::string>& blocks, const MetricMap& metrics,
                      const std::string& excerpt) {
        RenderedCandidate rc;
        rc.code = full_text(assemble(local_task, blocks));
        rc.metrics = metrics;
        rc.excerpt = excerpt;
        return rc;
    };

    int full_rewrite_block = 0;
    if (!local_task.mutable_blocks.empty()) full_rewrite_block = *local_task.mutable_blocks.begin();

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::deque<Job> in_flight;
    long submitted = 0, processed = 0;

    auto submit = [&] {
        Job job;
        job.seq = report.proposed;
        job.island = static_cast<int>(job.seq % db.num_islands());

        std::vector<std::string> parent_blocks;
        RenderedCandidate parent_rc;
        std::vector<RenderedCandidate> insp_rc;
        if (cfg.ablations.no_evolution) {
            parent_blocks = initial;
            job.parent_objective = seed_cand.objective;
            parent_rc = render(initial, seed_cand.metrics, seed_cand.eval_excerpt);
        } else {
            Candidate parent = db.sample_parent(job.island);
            job.parent_id = parent.id;
            job.parent_objective = parent.objective;
            parent_blocks = parent.block_texts;
            parent_rc = render(parent.block_texts, parent.metrics, parent.eval_excerpt);
            for (const auto& insp :
                 db.sample_inspirations(job.island, pc.num_inspirations, parent.id))
                insp_rc.push_back(render(insp.block_texts, insp.metrics, insp.eval_excerpt));
        }
        if (meta_enabled && !st.meta.items.empty()) {
            if (auto idx = select_meta(st.meta, rng)) job.meta_text = st.meta.items[*idx].text;
        }
        job.tier = cfg.ablations.fast_tier_only ? "fast" : pick_tier(cfg.tier_weights, rng);

        std::string prompt = build_prompt(parent_rc, insp_rc, pc, job.meta_text, rng);
        if (cfg.capture_prompts) report.prompts.push_back(prompt);

        GenerationRequest req;
        req.prompt = std::move(prompt);
        req.tier = job.tier;
        req.max_output = cfg.max_output;
        req.temperature = cfg.temperature;
        req.request_id = job.seq;

        // Scripted backends answer here on the coordinator, so their response
        // order matches submission order and seeded runs stay reproducible;
        // remote backends generate inside the worker for throughput.
        GenerationResult pre;
        if (ordered_generation) pre = provider.generate(req);

        Files parent_files = assemble(local_task, parent_blocks);
        job.outcome = std::async(
            std::launch::async,
            [&local_task, &pc, &provider, ordered_generation, full_rewrite_block,
             req = std::move(req), pre = std::move(pre), parent_files = std::move(parent_files),
             warm_start]() mutable {
                JobOutcome out;
                out.gen = ordered_generation ? std::move(pre) : provider.generate(req);
                if (!out.gen.ok()) return out;
                if (pc.full_rewrite) {
                    out.mut = apply_full_rewrite(local_task, parent_files, out.gen.text,
                                                 full_rewrite_block);
                } else {
                    out.mut = apply_diffs(local_task, parent_files, parse_diffs(out.gen.text));
                }
                if (!out.mut.ok()) return out;
                out.child_blocks = extract_blocks(local_task, out.mut.child_files);
                out.child_files = std::move(out.mut.child_files);
                out.reached_eval = true;
                out.eval = evaluate(local_task, out.child_files, local_task.cascade, 0.0, warm_start);
                return out;
            });
        ++report.proposed;
        ++submitted;
        in_flight.push_back(std::move(job));
    };

    auto process_front = [&] {
        Job job = std::move(in_flight.front());
        in_flight.pop_front();
        JobOutcome out = job.outcome.get();
        ++processed;

        nlohmann::json log;
        log["seq"] = job.seq;
        log["island"] = job.island;
        log["tier"] = job.tier;
        if (job.parent_id) log["parent_id"] = *job.parent_id;

        std::string failure_tag;
        double child_objective = 0.0;
        bool child_ok = false;

        if (!out.gen.ok()) {
            failure_tag = *out.gen.failure;
        } else if (!out.mut.ok()) {
            failure_tag = *out.mut.failure;
        } else {
            MetricMap metrics = out.eval.metrics;
            if (local_task.feedback_rubric && out.eval.ok()) {
                auto [fb, fb_failure] =
                    llm_feedback(provider, full_text(out.child_files), *local_task.feedback_rubric,
                                 1000000 + job.seq);
                for (const auto& [k, v] : fb) metrics[k] = v;
                if (fb_failure) log["feedback_failure"] = *fb_failure;
            }
            auto obj = out.eval.ok() ? objective_of(metrics, local_task.metric_names)
                                     : std::nullopt;

            Candidate cand;
            cand.block_texts = std::move(out.child_blocks);
            cand.metrics = std::move(metrics);
            cand.parent_id = job.parent_id;
            cand.island = job.island;
            cand.birth_step = job.seq;
            cand.eval_excerpt = out.eval.output_excerpt;
            cand.construction = out.eval.construction;
            if (!out.eval.ok()) cand.failure = out.eval.failure;
            else if (!obj) cand.failure = "BadMetrics";
            else cand.objective = *obj;

            if (cand.failure) {
                failure_tag = *cand.failure;
            } else {
                child_objective = *obj;
                child_ok = true;
            }
            std::int64_t id = db.add(std::move(cand));
            log["id"] = id;
            log["metrics"] = db.get(id).metrics;
            if (child_ok) {
                ++report.applied;
                ++st.applied_since_meta;
                log["objective"] = child_objective;
                db.maybe_migrate();
            }
        }

        if (job.meta_text)
            update_meta(st.meta, *job.meta_text,
                        child_ok ? child_objective - job.parent_objective : 0.0);

        if (!failure_tag.empty()) {
            ++report.failed_by_tag[failure_tag];
            log["outcome"] = failure_tag;
        } else {
            log["outcome"] = "applied";
        }
        report.trajectory.push_back(db.best_objective_or(0.0));
        log["best"] = report.trajectory.back();
        report.log_lines.push_back(log.dump());

        if (meta_enabled && st.applied_since_meta >= cfg.meta_period) {
            st.applied_since_meta = 0;
            if (auto snippet = propose_meta(provider, st.meta, 2000000 + st.meta_proposals++))
                st.meta.items.push_back(std::move(*snippet));
        }
    };

    while (processed < round_budget) {
        bool can_submit =
            submitted < round_budget && (wallclock_s <= 0.0 || elapsed() < wallclock_s);
        if (can_submit && static_cast<int>(in_flight.size()) < std::max(1, cfg.concurrency)) {
            submit();
        } else if (!in_flight.empty()) {
            process_front();
        } else {
            break;  // wallclock exhausted with nothing left in flight
        }
    }
    while (!in_flight.empty()) process_front();
}

RunReport run_impl(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
                   std::uint64_t rng_seed, ProgramDb& db, bool need_seed_eval,
                   const std::string& warm_start) {
    if (cfg.budget_candidates < 0) throw Error("ConfigError", "budget_candidates must be >= 0");
    auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.seed = rng_seed;
    std::mt19937_64 rng(rng_seed);

    if (need_seed_eval) {
        Files initial_files;
        for (const auto& f : task.files) initial_files.emplace_back(f.path, f.original());
        EvaluationResult seed_eval = evaluate(task, initial_files, task.cascade, 0.0, warm_start);
        auto obj =
            seed_eval.ok() ? objective_of(seed_eval.metrics, task.metric_names) : std::nullopt;
        if (!obj)
            throw Error("SeedEvaluationFailed",
                        "initial program produced no valid metrics (" +
                            seed_eval.failure.value_or("BadMetrics") + ")");
        const std::vector<std::string> initial = initial_blocks(task);
        for (int i = 0; i < db.num_islands(); ++i) {
            Candidate c;
            c.block_texts = initial;
            c.metrics = seed_eval.metrics;
            c.objective = *obj;
            c.island = i;
            c.birth_step = -1;
            c.eval_excerpt = seed_eval.output_excerpt;
            c.construction = seed_eval.construction;
            db.add(std::move(c));
        }
    }
    report.trajectory.push_back(db.best_objective_or(0.0));

    LoopState st;
    if (cfg.refine) {
        std::string warm = warm_start;
        for (int round = 0; round < std::max(1, cfg.refine->rounds); ++round) {
            run_loop(task, cfg, provider, rng, db, report, st, warm, cfg.refine->time_budget_s,
                     cfg.budget_candidates);
            if (auto best = db.best(); best && !best->construction.empty())
                warm = best->construction;
        }
    } else {
        run_loop(task, cfg, provider, rng, db, report, st, warm_start, cfg.budget_wallclock_s,
                 cfg.budget_candidates);
    }

    report.best = db.best();
    if (report.best) report.best_construction = report.best->construction;
    report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.db_snapshot = db.snapshot();
    return report;
}

}  // namespace

RunReport run(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
              std::uint64_t rng_seed) {
    ProgramDb db(cfg.archive, rng_seed ^ 0x9E3779B97F4A7C15ULL);
    return run_impl(task, cfg, provider, rng_seed, db, true, "");
}

RunReport resume(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
                 std::uint64_t rng_seed, const std::string& db_snapshot) {
    ProgramDb db = ProgramDb::restore(db_snapshot);
    return run_impl(task, cfg, provider, rng_seed, db, db.successful() == 0, "");
}

RunReport refine_loop(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
                      std::uint64_t rng_seed, const std::string& warm_start) {
    RunConfig rcfg = cfg;
    if (!rcfg.refine) rcfg.refine = RefineConfig{};
    ProgramDb db(rcfg.archive, rng_seed ^ 0x9E3779B97F4A7C15ULL);
    return run_impl(task, rcfg, provider, rng_seed, db, true, warm_start);
}

}  // namespace codevo
