#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "codevo/controller.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace codevo;
using nlohmann::json;

namespace {

// One evolve block holding a shell variable; the skeleton reports it as the
// sole metric. Rewriting VALUE=k yields objective k, so stub scripts can
// steer the run to exact, easily asserted objective values.
const char* kToySource =
    "# EVOLVE-BLOCK-START\n"
    "VALUE=0\n"
    "# EVOLVE-BLOCK-END\n"
    "echo \"EVOLVE_METRICS: {\\\"score\\\": $VALUE}\"\n";

TaskSpec toy_task() {
    TaskSpec t = parse_task({{"main.sh", kToySource}});
    t.eval_command = "sh main.sh";
    t.metric_names = {"score"};
    t.prompt_config.num_inspirations = 0;
    return t;
}

// A scripted-provider record: served for the first prompt containing `pred`.
std::string record(const std::string& pred, const std::string& body) {
    return "### match: " + pred + "\n" + body;
}

// `from` and `to` carry their trailing newlines.
std::string diff_block(const std::string& from, const std::string& to) {
    return "<<<<<<< SEARCH\n" + from + "=======\n" + to + ">>>>>>> REPLACE\n";
}

RunConfig lean_cfg(long budget) {
    RunConfig cfg;
    cfg.budget_candidates = budget;
    cfg.concurrency = 1;
    cfg.archive.num_islands = 1;
    cfg.archive.parent_policy = 1.0;  // always exploit the island best
    return cfg;
}

std::vector<json> parsed_logs(const RunReport& r) {
    std::vector<json> out;
    for (const auto& line : r.log_lines) out.push_back(json::parse(line));
    return out;
}

}  // namespace

TEST_CASE("run applies scripted diffs and logs one record per child") {
    TaskSpec task = toy_task();
    RunConfig cfg = lean_cfg(2);
    cfg.capture_prompts = true;
    ModelProvider p = ModelProvider::stub(
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
        record("VALUE=1", diff_block("VALUE=1\n", "VALUE=2\n")));

    RunReport r = run(task, cfg, p, 42);

    CHECK(r.seed == 42);
    CHECK(r.proposed == 2);
    CHECK(r.applied == 2);
    CHECK(r.failed_by_tag.empty());
    CHECK(r.trajectory == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(r.elapsed_s > 0.0);
    CHECK(r.prompts.size() == 2);
    CHECK(r.log_lines.size() == 2);
    CHECK(p.stub_remaining() == 0);

    REQUIRE(r.best.has_value());
    CHECK(r.best->id == 2);
    CHECK(r.best->objective == doctest::Approx(2.0));
    CHECK(r.best->metrics.at("score") == doctest::Approx(2.0));
    CHECK(r.best->block_texts == std::vector<std::string>{"VALUE=2\n"});
    CHECK(r.best_construction.empty());

    auto logs = parsed_logs(r);
    CHECK(logs[0]["seq"] == 0);
    CHECK(logs[0]["island"] == 0);
    CHECK(logs[0]["parent_id"] == 0);  // the archived initial program
    CHECK(logs[0]["id"] == 1);
    CHECK(logs[0]["objective"] == 1.0);
    CHECK(logs[0]["outcome"] == "applied");
    CHECK(logs[0]["best"] == 1.0);
    CHECK(logs[0]["metrics"]["score"] == 1.0);
    CHECK(logs[1]["seq"] == 1);
    CHECK(logs[1]["parent_id"] == 1);  // chains off the first child
    CHECK(logs[1]["id"] == 2);
    CHECK(logs[1]["best"] == 2.0);
    // No timing data in the log records.
    for (const auto& l : logs) {
        CHECK_FALSE(l.contains("latency_s"));
        CHECK_FALSE(l.contains("elapsed_s"));
    }

    // The first prompt shows the initial program and asks for diff blocks.
    CHECK(r.prompts[0].find("VALUE=0") != std::string::npos);
    CHECK(r.prompts[0].find("# Current program") != std::string::npos);
    CHECK(r.prompts[0].find("<<<<<<< SEARCH") != std::string::npos);

    // The final snapshot is live: it restores to the same best candidate.
    ProgramDb restored = ProgramDb::restore(r.db_snapshot);
    REQUIRE(restored.best().has_value());
    CHECK(restored.best()->id == 2);
}

TEST_CASE("fixed seeds reproduce a run bit-for-bit and seeds change it") {
    TaskSpec task = toy_task();
    RunConfig cfg = lean_cfg(2);
    cfg.capture_prompts = true;
    const std::string script =
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
        record("VALUE=1", diff_block("VALUE=1\n", "VALUE=2\n"));
    auto once = [&](std::uint64_t seed) {
        ModelProvider p = ModelProvider::stub(script);
        return run(task, cfg, p, seed);
    };

    RunReport a = once(42);
    RunReport b = once(42);
    CHECK(a.log_lines == b.log_lines);
    CHECK(a.prompts == b.prompts);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.db_snapshot == b.db_snapshot);

    // Some nearby seed must draw different tiers or prompt wording.
    bool diverged = false;
    for (std::uint64_t seed = 1; seed <= 16 && !diverged; ++seed) {
        RunReport c = once(seed);
        diverged = c.log_lines != a.log_lines || c.prompts != a.prompts;
    }
    CHECK(diverged);
}

TEST_CASE("overlapping jobs are folded in submission order") {
    TaskSpec task = toy_task();
    task.prompt_config.full_rewrite = true;
    const std::string script =
        record("*", "VALUE=3\n") + record("*", "VALUE=1\n") +
        record("*", "VALUE=7\n") + record("*", "VALUE=5\n");
    auto once = [&](int concurrency) {
        RunConfig cfg = lean_cfg(4);
        cfg.archive.num_islands = 2;
        cfg.concurrency = concurrency;
        ModelProvider p = ModelProvider::stub(script);
        return run(task, cfg, p, 9);
    };

    RunReport wide_a = once(3);
    RunReport wide_b = once(3);
    CHECK(wide_a.log_lines == wide_b.log_lines);
    CHECK(wide_a.db_snapshot == wide_b.db_snapshot);

    RunReport narrow = once(1);
    // Responses land in submission order regardless of overlap, so the
    // objective trajectory and the winner are identical.
    CHECK(wide_a.trajectory == std::vector<double>{0.0, 3.0, 3.0, 7.0, 7.0});
    CHECK(narrow.trajectory == wide_a.trajectory);
    REQUIRE(wide_a.best.has_value());
    REQUIRE(narrow.best.has_value());
    CHECK(wide_a.best->id == 4);  // ids 0,1 seed the two islands
    CHECK(narrow.best->id == 4);
    CHECK(narrow.best->block_texts == std::vector<std::string>{"VALUE=7\n"});

    // Jobs alternate between the two islands.
    auto logs = parsed_logs(narrow);
    std::vector<int> islands;
    for (const auto& l : logs) islands.push_back(l["island"].get<int>());
    CHECK(islands == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("generation, mutation, evaluation, and metric failures are tallied") {
    TaskSpec task = toy_task();
    RunConfig cfg = lean_cfg(4);
    ModelProvider p = ModelProvider::stub(
        record("VALUE=0", "no diff here, just prose\n") +
        record("VALUE=0", diff_block("VALUE=9\n", "VALUE=1\n")) +
        record("VALUE=0", diff_block("VALUE=0\n", "exit 3\n")) +
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")));

    RunReport r = run(task, cfg, p, 3);

    CHECK(r.proposed == 4);
    CHECK(r.applied == 1);
    CHECK(r.failed_by_tag ==
          std::map<std::string, long>{
              {"NoDiffFound", 1}, {"SearchNotFound(0)", 1}, {"NonzeroExit", 1}});
    CHECK(r.trajectory == std::vector<double>{0.0, 0.0, 0.0, 0.0, 1.0});
    CHECK(r.prompts.empty());  // capture_prompts defaults off

    auto logs = parsed_logs(r);
    CHECK(logs[0]["outcome"] == "NoDiffFound");
    CHECK(logs[1]["outcome"] == "SearchNotFound(0)");
    CHECK(logs[2]["outcome"] == "NonzeroExit");
    CHECK(logs[3]["outcome"] == "applied");
    // Children that never produced a program are not archived.
    CHECK_FALSE(logs[0].contains("id"));
    CHECK_FALSE(logs[1].contains("id"));
    // The crashed child is archived as a failure, without an objective.
    CHECK(logs[2]["id"] == 1);
    CHECK(logs[2]["metrics"].empty());
    CHECK_FALSE(logs[2].contains("objective"));
    CHECK(logs[3]["id"] == 2);
    CHECK(logs[3]["objective"] == 1.0);
}

TEST_CASE("an exhausted scripted provider is charged per child") {
    TaskSpec task = toy_task();
    RunConfig cfg = lean_cfg(3);
    ModelProvider p =
        ModelProvider::stub(record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")));

    RunReport r = run(task, cfg, p, 0);
    CHECK(r.proposed == 3);
    CHECK(r.applied == 1);
    CHECK(r.failed_by_tag == std::map<std::string, long>{{"StubExhausted", 2}});
    CHECK(r.trajectory == std::vector<double>{0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("budget edge cases") {
    TaskSpec task = toy_task();
    ModelProvider p =
        ModelProvider::stub(record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")));

    SUBCASE("a zero budget still evaluates and archives the initial program") {
        RunReport r = run(task, lean_cfg(0), p, 1);
        CHECK(r.proposed == 0);
        CHECK(r.applied == 0);
        CHECK(r.log_lines.empty());
        CHECK(r.trajectory == std::vector<double>{0.0});
        REQUIRE(r.best.has_value());
        CHECK(r.best->id == 0);
        CHECK(p.stub_remaining() == 1);
    }
    SUBCASE("a negative budget is rejected") {
        CHECK_THROWS_WITH_AS(run(task, lean_cfg(-1), p, 1),
                             "ConfigError: budget_candidates must be >= 0", Error);
    }
    SUBCASE("an expired wallclock budget stops submissions") {
        RunConfig cfg = lean_cfg(5);
        cfg.budget_wallclock_s = 1e-12;
        RunReport r = run(task, cfg, p, 1);
        CHECK(r.proposed == 0);
        CHECK(r.trajectory == std::vector<double>{0.0});
    }
}

TEST_CASE("a failing initial program aborts the run") {
    TaskSpec task = parse_task({{"main.sh",
                                 "# EVOLVE-BLOCK-START\n"
                                 "VALUE=0\n"
                                 "# EVOLVE-BLOCK-END\n"
                                 "exit 1\n"}});
    task.eval_command = "sh main.sh";
    task.metric_names = {"score"};
    ModelProvider p = ModelProvider::stub(record("*", "unused\n"));
    CHECK_THROWS_WITH_AS(
        run(task, lean_cfg(1), p, 0),
        "SeedEvaluationFailed: initial program produced no valid metrics (NonzeroExit)", Error);
}

TEST_CASE("ablation: no_evolution always mutates the initial program") {
    TaskSpec task = toy_task();
    RunConfig cfg = lean_cfg(2);
    cfg.ablations.no_evolution = true;
    cfg.capture_prompts = true;
    // Both children must be derived from VALUE=0, not from each other.
    ModelProvider p = ModelProvider::stub(
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=2\n")));

    RunReport r = run(task, cfg, p, 5);
    CHECK(r.applied == 2);
    CHECK(r.trajectory == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(p.stub_remaining() == 0);
    CHECK(r.prompts[1].find("VALUE=0") != std::string::npos);
    for (const auto& l : parsed_logs(r)) CHECK_FALSE(l.contains("parent_id"));
}

TEST_CASE("ablation: no_context drops the context attachments") {
    TaskSpec task = toy_task();
    task.prompt_config.explicit_context = {"SECRETCONTEXT about the scorer"};
    RunConfig cfg = lean_cfg(1);
    cfg.capture_prompts = true;
    const std::string script = record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n"));

    ModelProvider with = ModelProvider::stub(script);
    RunReport keep = run(task, cfg, with, 2);
    CHECK(keep.prompts[0].find("# Context") != std::string::npos);
    CHECK(keep.prompts[0].find("SECRETCONTEXT") != std::string::npos);

    cfg.ablations.no_context = true;
    ModelProvider without = ModelProvider::stub(script);
    RunReport drop = run(task, cfg, without, 2);
    CHECK(drop.applied == 1);
    CHECK(drop.prompts[0].find("# Context") == std::string::npos);
    CHECK(drop.prompts[0].find("SECRETCONTEXT") == std::string::npos);
}

TEST_CASE("ablation: no_meta_prompt suppresses snippet proposals entirely") {
    TaskSpec task = toy_task();
    task.prompt_config.meta_prompt_enabled = true;
    RunConfig cfg = lean_cfg(2);
    cfg.meta_period = 1;
    cfg.capture_prompts = true;
    cfg.ablations.no_meta_prompt = true;
    ModelProvider p = ModelProvider::stub(
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
        record("VALUE=1", diff_block("VALUE=1\n", "VALUE=2\n")) +
        record("Instruction snippet improvement", "Be clever.\n"));

    RunReport r = run(task, cfg, p, 6);
    CHECK(r.applied == 2);
    CHECK(p.stub_remaining() == 1);  // the snippet record was never requested
    for (const auto& prompt : r.prompts)
        CHECK(prompt.find("# Guidance") == std::string::npos);
}

TEST_CASE("ablation: restrict_blocks rejects edits outside the whitelist") {
    const char* two_blocks =
        "# EVOLVE-BLOCK-START\n"
        "A=1\n"
        "# EVOLVE-BLOCK-END\n"
        "# fixed section\n"
        "# EVOLVE-BLOCK-START\n"
        "B=2\n"
        "# EVOLVE-BLOCK-END\n"
        "echo \"EVOLVE_METRICS: {\\\"score\\\": $((A + B))}\"\n";
    TaskSpec task = parse_task({{"main.sh", two_blocks}});
    task.eval_command = "sh main.sh";
    task.metric_names = {"score"};
    task.prompt_config.num_inspirations = 0;
    const std::string script = record("A=1", diff_block("B=2\n", "B=5\n"));

    ModelProvider open = ModelProvider::stub(script);
    RunReport free_run = run(task, lean_cfg(1), open, 4);
    CHECK(free_run.applied == 1);
    CHECK(free_run.best->objective == doctest::Approx(6.0));

    RunConfig cfg = lean_cfg(1);
    cfg.ablations.restrict_blocks = true;
    cfg.restricted_blocks = {0};
    ModelProvider walled = ModelProvider::stub(script);
    RunReport denied = run(task, cfg, walled, 4);
    CHECK(denied.applied == 0);
    CHECK(denied.failed_by_tag == std::map<std::string, long>{{"SkeletonViolated", 1}});
    CHECK(denied.best->objective == doctest::Approx(3.0));  // the initial program
}

TEST_CASE("ablation: fast_tier_only overrides the tier weights") {
    TaskSpec task = toy_task();
    const std::string script = record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
                               record("VALUE=1", diff_block("VALUE=1\n", "VALUE=2\n"));
    RunConfig cfg = lean_cfg(2);
    cfg.tier_weights = {0.0, 1.0};  // all draws land on the strong tier

    ModelProvider weighted = ModelProvider::stub(script);
    RunReport strong = run(task, cfg, weighted, 7);
    for (const auto& l : parsed_logs(strong)) CHECK(l["tier"] == "strong");

    cfg.ablations.fast_tier_only = true;
    ModelProvider forced = ModelProvider::stub(script);
    RunReport fast = run(task, cfg, forced, 7);
    CHECK(fast.applied == 2);
    for (const auto& l : parsed_logs(fast)) CHECK(l["tier"] == "fast");
}

TEST_CASE("children that stop reporting a required metric are rejected") {
    TaskSpec task = parse_task({{"main.sh",
                                 "# EVOLVE-BLOCK-START\n"
                                 "echo \"EVOLVE_METRICS: {\\\"score\\\": 1}\"\n"
                                 "# EVOLVE-BLOCK-END\n"}});
    task.eval_command = "sh main.sh";
    task.metric_names = {"score"};
    task.prompt_config.num_inspirations = 0;
    ModelProvider p = ModelProvider::stub(
        record("score", diff_block("echo \"EVOLVE_METRICS: {\\\"score\\\": 1}\"\n",
                                   "echo \"EVOLVE_METRICS: {\\\"wrong\\\": 1}\"\n")));

    RunReport r = run(task, lean_cfg(1), p, 0);
    CHECK(r.applied == 0);
    CHECK(r.failed_by_tag == std::map<std::string, long>{{"BadMetrics", 1}});
    CHECK(r.trajectory == std::vector<double>{1.0, 1.0});
    auto logs = parsed_logs(r);
    CHECK(logs[0]["outcome"] == "BadMetrics");
    CHECK(logs[0]["id"] == 1);
    CHECK(logs[0]["metrics"]["wrong"] == 1.0);
    CHECK_FALSE(logs[0].contains("objective"));
    CHECK(r.best->id == 0);
}

TEST_CASE("a feedback rubric merges graded metrics into each child") {
    TaskSpec task = toy_task();
    task.feedback_rubric = "Rate the clarity of";
    RunConfig cfg = lean_cfg(1);

    SUBCASE("grades are merged under the feedback prefix") {
        ModelProvider p = ModelProvider::stub(
            record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
            record("Rate the clarity of", "EVOLVE_METRICS: {\"quality\": 0.8}\n"));
        RunReport r = run(task, cfg, p, 1);
        CHECK(r.applied == 1);
        CHECK(p.stub_remaining() == 0);
        auto logs = parsed_logs(r);
        CHECK_FALSE(logs[0].contains("feedback_failure"));
        CHECK(logs[0]["metrics"]["fb_quality"] == 0.8);
        CHECK(logs[0]["metrics"]["score"] == 1.0);
        CHECK(logs[0]["objective"] == 1.0);  // graded metrics stay advisory
        CHECK(r.best->metrics.at("fb_quality") == doctest::Approx(0.8));
    }
    SUBCASE("a failed grading call is recorded but does not sink the child") {
        ModelProvider p =
            ModelProvider::stub(record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")));
        RunReport r = run(task, cfg, p, 1);
        CHECK(r.applied == 1);
        auto logs = parsed_logs(r);
        CHECK(logs[0]["feedback_failure"] == "StubExhausted");
        CHECK(logs[0]["outcome"] == "applied");
        CHECK_FALSE(logs[0]["metrics"].contains("fb_quality"));
    }
}

TEST_CASE("guidance snippets are proposed, scored, and injected into prompts") {
    TaskSpec task = toy_task();
    task.prompt_config.meta_prompt_enabled = true;
    RunConfig cfg = lean_cfg(3);
    cfg.meta_period = 1;
    cfg.capture_prompts = true;
    // The second proposal request must list the first snippet with its
    // observed mean improvement (2 - 1 = 1.0), proving the score update ran.
    ModelProvider p = ModelProvider::stub(
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
        record("Instruction snippet improvement", "Try bigger steps.\n") +
        record("VALUE=1", diff_block("VALUE=1\n", "VALUE=2\n")) +
        record("- (1.000000) Try bigger steps.", "Focus on loops.\n") +
        record("*", "just prose\n"));

    RunReport r = run(task, cfg, p, 12);
    CHECK(r.applied == 2);
    CHECK(r.failed_by_tag == std::map<std::string, long>{{"NoDiffFound", 1}});
    CHECK(r.trajectory == std::vector<double>{0.0, 1.0, 2.0, 2.0});
    CHECK(p.stub_remaining() == 0);  // both proposal requests were made
    REQUIRE(r.prompts.size() == 3);
    CHECK(r.prompts[0].find("# Guidance") == std::string::npos);  // store still empty
    CHECK(r.prompts[1].find("# Guidance") != std::string::npos);
    CHECK(r.prompts[1].find("Try bigger steps.") != std::string::npos);
    CHECK(r.prompts[2].find("# Guidance") != std::string::npos);
}

TEST_CASE("resume continues a snapshot without re-evaluating the seed") {
    TaskSpec task = toy_task();
    RunConfig cfg = lean_cfg(2);
    ModelProvider first = ModelProvider::stub(
        record("VALUE=0", diff_block("VALUE=0\n", "VALUE=1\n")) +
        record("VALUE=1", diff_block("VALUE=1\n", "VALUE=2\n")));
    RunReport before = run(task, cfg, first, 11);
    REQUIRE(before.best.has_value());
    CHECK(before.best->objective == doctest::Approx(2.0));

    ModelProvider second = ModelProvider::stub(
        record("VALUE=2", diff_block("VALUE=2\n", "VALUE=3\n")) +
        record("VALUE=3", diff_block("VALUE=3\n", "VALUE=4\n")));
    RunReport after = resume(task, cfg, second, 11, before.db_snapshot);

    CHECK(after.proposed == 2);
    CHECK(after.applied == 2);
    CHECK(after.trajectory == std::vector<double>{2.0, 3.0, 4.0});
    REQUIRE(after.best.has_value());
    CHECK(after.best->id == 4);
    CHECK(after.best->objective == doctest::Approx(4.0));

    // Only the original seed evaluation exists: 1 seed + 2 + 2 children.
    json snap = json::parse(after.db_snapshot);
    CHECK(snap["candidates"].size() == 5);
    int seeds = 0;
    for (const auto& c : snap["candidates"])
        if (c["birth_step"].get<long long>() == -1) ++seeds;
    CHECK(seeds == 1);
}

TEST_CASE("refinement rounds thread the best construction into later evaluations") {
    const char* refine_source =
        "# EVOLVE-BLOCK-START\n"
        "VALUE=0\n"
        "# EVOLVE-BLOCK-END\n"
        "W=0\n"
        "if [ -f warm_start.txt ]; then W=$(cat warm_start.txt); fi\n"
        "S=$((VALUE + W))\n"
        "printf '%s' \"$S\" > construction.txt\n"
        "echo \"EVOLVE_METRICS: {\\\"score\\\": $S}\"\n";
    TaskSpec task = parse_task({{"main.sh", refine_source}});
    task.eval_command = "sh main.sh";
    task.metric_names = {"score"};
    task.prompt_config.num_inspirations = 0;

    SUBCASE("each round starts from the previous round's artifact") {
        RunConfig cfg = lean_cfg(1);  // one child per round
        cfg.refine = RefineConfig{2, 0.0};
        ModelProvider p = ModelProvider::stub(
            record("VALUE=0", diff_block("VALUE=0\n", "VALUE=3\n")) +
            record("VALUE=3", diff_block("VALUE=3\n", "VALUE=4\n")));
        RunReport r = run(task, cfg, p, 21);
        CHECK(r.proposed == 2);
        CHECK(r.applied == 2);
        // Round 1: 3 + no warm start. Round 2: 4 + warm start "3" = 7.
        CHECK(r.trajectory == std::vector<double>{0.0, 3.0, 7.0});
        REQUIRE(r.best.has_value());
        CHECK(r.best->objective == doctest::Approx(7.0));
        CHECK(r.best->block_texts == std::vector<std::string>{"VALUE=4\n"});
        CHECK(r.best_construction == "7");
    }
    SUBCASE("a single round matches a plain run exactly") {
        const std::string script = record("VALUE=0", diff_block("VALUE=0\n", "VALUE=3\n"));
        RunConfig plain = lean_cfg(1);
        RunConfig one_round = plain;
        one_round.refine = RefineConfig{1, 0.0};
        ModelProvider pa = ModelProvider::stub(script);
        ModelProvider pb = ModelProvider::stub(script);
        RunReport a = run(task, plain, pa, 3);
        RunReport b = run(task, one_round, pb, 3);
        CHECK(a.log_lines == b.log_lines);
        CHECK(a.trajectory == b.trajectory);
        CHECK(a.best_construction == "3");
        CHECK(b.best_construction == "3");
    }
    SUBCASE("a caller-provided artifact reaches the very first evaluation") {
        RunConfig cfg = lean_cfg(1);
        ModelProvider p =
            ModelProvider::stub(record("VALUE=0", diff_block("VALUE=0\n", "VALUE=2\n")));
        RunReport r = refine_loop(task, cfg, p, 8, "5");
        // Seed: 0 + 5; child: 2 + 5.
        CHECK(r.trajectory == std::vector<double>{5.0, 7.0});
        CHECK(r.best_construction == "7");
    }
}
