#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "codevo/common.hpp"

namespace codevo {

// A contiguous piece of a source file. Skeleton segments (which include the
// marker comment lines themselves) are immutable; evolve segments hold the
// text between a START and END marker, excluding both marker lines.
struct Segment {
    enum class Kind { skeleton, evolve };
    Kind kind = Kind::skeleton;
    std::string text;
    // Index among evolve segments across the whole task, assigned in file
    // order then textual order. Unset for skeleton segments.
    std::optional<int> block_id;
};

struct SourceFile {
    std::string path;
    std::vector<Segment> segments;

    // Byte-for-byte original content.
    std::string original() const {
        std::string out;
        for (const auto& s : segments) out += s.text;
        return out;
    }
};

// One threshold predicate of a cascade stage's pass rule.
struct MetricThreshold {
    std::string metric;
    // At least one bound is set.
    std::optional<double> gte;
    std::optional<double> lte;

    bool holds(const MetricMap& m) const {
        auto it = m.find(metric);
        if (it == m.end()) return false;
        if (gte && !(it->second >= *gte)) return false;
        if (lte && !(it->second <= *lte)) return false;
        return true;
    }
};

struct CascadeStage {
    std::string name;
    std::string command_args;  // appended to eval_command for this stage
    double timeout_s = 60.0;
    std::vector<MetricThreshold> pass_rule;
};

struct PromptConfig {
    std::vector<std::string> explicit_context;
    std::string template_text = "You are optimizing the marked code regions. "
                                "{{tone}} Propose focused improvements.";
    // placeholder -> weighted alternatives; probabilities sum to 1.
    std::map<std::string, std::vector<std::pair<std::string, double>>> placeholder_alternatives = {
        {"tone", {{"Be precise and conservative.", 0.5}, {"Be bold and creative.", 0.5}}}};
    int num_inspirations = 2;
    bool include_results = true;
    bool meta_prompt_enabled = false;
    bool full_rewrite = false;       // request whole-block rewrites instead of diffs
    std::size_t excerpt_cap = 4096;  // byte cap for execution excerpts, head+tail
};

struct TaskSpec {
    std::vector<SourceFile> files;
    std::string eval_command;
    std::vector<CascadeStage> cascade;
    PromptConfig prompt_config;
    std::vector<std::string> metric_names;
    // Aggregation over metric_names; the only shipped rule is the arithmetic
    // mean ("mean"), kept as a field for provenance.
    std::string objective = "mean";
    long budget_candidates = 100;
    double budget_wallclock_s = 3600.0;
    // Free-form provenance tag: direct-solution | constructor | search-algorithm.
    std::string abstraction_mode = "direct-solution";
    // When non-empty, only these block ids may be mutated (block whitelist
    // behind the restrict_blocks ablation).
    std::set<int> mutable_blocks;
    // When set, each evaluated child is additionally graded by a model call
    // with this rubric; the resulting metrics are merged under the "fb_" prefix.
    std::optional<std::string> feedback_rubric;

    int num_blocks() const {
        int n = 0;
        for (const auto& f : files)
            for (const auto& s : f.segments)
                if (s.kind == Segment::Kind::evolve) ++n;
        return n;
    }
};

// True if the line is a marker line: after trimming whitespace and removing
// one leading comment leader (#, // or ;), the remaining content equals the
// marker token exactly.
bool is_marker_line(const std::string& line, bool& is_start);

// Splits raw files into skeleton/evolve segments.
// Throws UnmatchedMarker, NestedMarker, NoEvolveBlock.
TaskSpec parse_task(const std::vector<std::pair<std::string, std::string>>& raw_files);

// Reassembles full files from the skeleton plus the given block texts
// (block_id order). Throws ArityMismatch.
std::vector<std::pair<std::string, std::string>> assemble(const TaskSpec& task,
                                                          const std::vector<std::string>& block_texts);

// Reads back the current evolve-block texts of a candidate that shares the
// task's skeleton. Throws SkeletonMismatch if any skeleton byte differs (this
// includes candidates that add or remove marker lines).
std::vector<std::string> extract_blocks(const TaskSpec& task,
                                        const std::vector<std::pair<std::string, std::string>>& files);

// Current block texts of the task's own (initial) files.
std::vector<std::string> initial_blocks(const TaskSpec& task);

}  // namespace codevo
