#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codevo/model_provider.hpp"
#include "codevo/taskspec.hpp"

namespace codevo {

struct EvaluationResult {
    MetricMap metrics;       // from the last stage that produced a metrics record
    int stages_passed = 0;   // completed stages (a StageGate stage still completed)
    std::string output_excerpt;
    double duration_s = 0.0;
    std::optional<std::string> failure;  // Timeout | NonzeroExit | BadMetrics | StageGate
    std::string construction;  // contents of <scratch>/construction.txt, if the program wrote one

    bool ok() const { return !failure.has_value(); }
};

// Materializes child_files in a fresh scratch directory and runs the cascade
// stages in order. Each stage runs `task.eval_command` (plus the stage's extra
// args) under /bin/sh with EVOLVE_STAGE and EVOLVE_SCRATCH set, capturing
// stdout+stderr. A stage must print one line `EVOLVE_METRICS: {...}` (a flat
// JSON object of finite numbers; the last such line wins). Promotion to the
// next stage requires the stage's pass rule to hold; a failing rule stops with
// failure=StageGate while still counting the completed stage. All failures are
// tags in the result — nothing model- or child-related is thrown. The scratch
// directory is unique per call and removed afterwards.
//
// An empty `stages` list behaves as one unnamed 60 s stage with no gate.
// budget_s > 0 caps the whole evaluation in addition to per-stage timeouts.
// A non-empty warm_start is written to <scratch>/warm_start.txt beforehand.
EvaluationResult evaluate(const TaskSpec& task,
                          const std::vector<std::pair<std::string, std::string>>& child_files,
                          const std::vector<CascadeStage>& stages, double budget_s = 0.0,
                          const std::string& warm_start = "");

// Runs evaluate over the children with at most pool_size in flight; results
// come back in input order and one child's failure never affects another.
std::vector<EvaluationResult> evaluate_parallel(
    const TaskSpec& task,
    const std::vector<std::vector<std::pair<std::string, std::string>>>& children, int pool_size,
    double budget_s = 0.0, const std::string& warm_start = "");

// Grades a child with one model call against the rubric. The response must
// contain a metrics record (an `EVOLVE_METRICS: {...}` line or a bare JSON
// object); keys are forced under the reserved "fb_" prefix. Unparsable
// responses and provider failures yield an empty map plus the failure tag.
std::pair<MetricMap, std::optional<std::string>> llm_feedback(const ModelProvider& provider,
                                                              const std::string& child_code,
                                                              const std::string& rubric,
                                                              std::int64_t request_id = 0);

// Parses the last `EVOLVE_METRICS: {...}` line of a program's output.
// Returns nullopt when no line parses as a flat numeric JSON object;
// bad_values is set when a line parsed but held non-numeric/non-finite data.
std::optional<MetricMap> parse_metrics_line(const std::string& output, bool& bad_values);

}  // namespace codevo
