#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codevo/taskspec.hpp"

namespace codevo {

// One SEARCH/REPLACE pair proposed by the model. `search` is non-empty.
struct DiffBlock {
    std::string search;
    std::string replace;

    bool operator==(const DiffBlock&) const = default;
};

struct MutationResult {
    std::vector<std::pair<std::string, std::string>> child_files;
    int applied = 0;
    enum class Mode { diff, full_rewrite } mode = Mode::diff;
    // Failure tag: NoDiffFound | SearchNotFound(i) | SkeletonViolated | EmptyOutput.
    std::optional<std::string> failure;

    bool ok() const { return !failure.has_value(); }
};

// Extracts well-formed <<<<<<< SEARCH / ======= / >>>>>>> REPLACE triples in
// textual order. Surrounding prose is ignored; malformed or empty-search
// blocks are skipped. An empty return list means NoDiffFound downstream.
std::vector<DiffBlock> parse_diffs(const std::string& model_output);

// Formats blocks back into marker syntax; parse_diffs(render_diffs(bs)) == bs.
std::string render_diffs(const std::vector<DiffBlock>& blocks);

// Applies diffs sequentially to a copy of parent_files: each search text must
// occur in the current (already partially patched) text, first occurrence
// replaced, files scanned in order. All-or-nothing: any failure discards the
// partial child. The result's skeleton is verified via extract_blocks, and a
// non-empty task.mutable_blocks whitelist additionally rejects changes to
// other blocks (both reported as SkeletonViolated).
MutationResult apply_diffs(const TaskSpec& task,
                           const std::vector<std::pair<std::string, std::string>>& parent_files,
                           const std::vector<DiffBlock>& diffs);

// Replaces the designated block's text with the model output (after
// stripping one optional fenced-code wrapper). Fails with EmptyOutput when
// the stripped output is empty.
MutationResult apply_full_rewrite(const TaskSpec& task,
                                  const std::vector<std::pair<std::string, std::string>>& parent_files,
                                  const std::string& model_output, int block_id);

}  // namespace codevo
