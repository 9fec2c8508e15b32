#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codevo/evaluator.hpp"
#include "codevo/model_provider.hpp"
#include "codevo/program_db.hpp"
#include "codevo/taskspec.hpp"

namespace codevo {

struct Ablations {
    bool no_evolution = false;     // always mutate the initial program
    bool no_context = false;       // drop explicit context attachments
    bool no_meta_prompt = false;   // never select or propose meta snippets
    bool restrict_blocks = false;  // enforce the restricted_blocks whitelist
    bool fast_tier_only = false;   // route every request to the fast tier
};

struct RefineConfig {
    int rounds = 1;
    double time_budget_s = 0.0;  // per-round wallclock cap; 0 = uncapped
};

struct RunConfig {
    long budget_candidates = 100;      // children processed per run (or per refine round)
    double budget_wallclock_s = 3600.0;
    int concurrency = 4;               // generate+evaluate jobs in flight
    ArchiveConfig archive;
    Ablations ablations;
    std::optional<RefineConfig> refine;
    TierWeights tier_weights;
    std::vector<int> restricted_blocks;  // whitelist applied under restrict_blocks
    long max_output = 8192;
    double temperature = 0.7;
    long meta_period = 10;  // successful children between meta-snippet proposals
    bool capture_prompts = false;
};

struct RunReport {
    std::optional<Candidate> best;
    // Seed objective first, then the best objective after each processed
    // child; monotone nondecreasing by the archive's strict-improvement rule.
    std::vector<double> trajectory;
    long proposed = 0;  // children submitted; equals applied + sum of failures
    long applied = 0;   // children evaluated successfully and registered
    std::map<std::string, long> failed_by_tag;
    std::uint64_t seed = 0;
    double elapsed_s = 0.0;
    // One JSON record per processed child, in processing order. Contains no
    // timing data, so identical seeded runs produce identical logs.
    std::vector<std::string> log_lines;
    std::vector<std::string> prompts;  // captured evolution prompts (capture_prompts)
    std::string best_construction;     // construction artifact of the best candidate
    std::string db_snapshot;           // final archive snapshot
};

// Evolution loop: evaluates the initial program (throws SeedEvaluationFailed
// when it yields no valid metrics), seeds every island with it, then loops
// sample -> prompt -> generate -> mutate -> evaluate -> register until a
// budget is hit. Generations and evaluations overlap up to cfg.concurrency;
// completions are folded into the archive in submission order, which combined
// with the scripted provider makes whole runs bit-reproducible for a fixed
// seed. Jobs are assigned to islands round-robin.
RunReport run(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
              std::uint64_t rng_seed);

// Continues a run from an archive snapshot (seed evaluation is skipped when
// the archive already has successful candidates).
RunReport resume(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
                 std::uint64_t rng_seed, const std::string& db_snapshot);

// Time-budgeted refinement: cfg.refine.rounds rounds of the loop over one
// shared archive, each evaluation seeing the best construction artifact from
// the previous round via <scratch>/warm_start.txt. The first round uses the
// caller's warm_start text (possibly empty).
RunReport refine_loop(const TaskSpec& task, const RunConfig& cfg, const ModelProvider& provider,
                      std::uint64_t rng_seed, const std::string& warm_start = "");

}  // namespace codevo
