#include "codevo/mutation.hpp"

namespace codevo {

namespace {

enum class Line { other, search, sep, replace };

Line classify(const std::string& raw) {
    std::string t = trim(raw);
    if (t == "<<<<<<< SEARCH") return Line::search;
    if (t == "=======") return Line::sep;
    if (t == ">>>>>>> REPLACE") return Line::replace;
    return Line::other;
}

}  // namespace

std::vector<DiffBlock> parse_diffs(const std::string& model_output) {
    std::vector<DiffBlock> blocks;
    auto lines = split_keep_newlines(model_output);
    std::size_t i = 0;
    while (i < lines.size()) {
        if (classify(lines[i]) != Line::search) {
            ++i;
            continue;
        }
        std::string search, replace;
        std::size_t j = i + 1;
        bool has_sep = false, has_end = false;
        for (; j < lines.size(); ++j) {
            Line c = classify(lines[j]);
            if (c == Line::sep && !has_sep) {
                has_sep = true;
            } else if (c == Line::replace && has_sep) {
                has_end = true;
                break;
            } else if (c == Line::search) {
                break;  // malformed: a new block starts; drop the current one
            } else {
                (has_sep ? replace : search) += lines[j];
            }
        }
        if (has_end) {
            if (!search.empty()) blocks.push_back({std::move(search), std::move(replace)});
            i = j + 1;
        } else {
            i = j;  // resume at the line that broke the block (or EOF)
        }
    }
    return blocks;
}

std::string render_diffs(const std::vector<DiffBlock>& blocks) {
    std::string out;
    for (const auto& b : blocks) {
        out += "<<<<<<< SEARCH\n";
        out += b.search;
        if (!b.search.empty() && b.search.back() != '\n') out += '\n';
        out += "=======\n";
        out += b.replace;
        if (!b.replace.empty() && b.replace.back() != '\n') out += '\n';
        out += ">>>>>>> REPLACE\n";
    }
    return out;
}

namespace {

// Verifies skeleton integrity and the optional block whitelist; returns the
// failure tag, if any.
std::optional<std::string> check_child(const TaskSpec& task,
                                       const std::vector<std::pair<std::string, std::string>>& parent_files,
                                       const std::vector<std::pair<std::string, std::string>>& child_files) {
    std::vector<std::string> child_blocks;
    try {
        child_blocks = extract_blocks(task, child_files);
    } catch (const Error&) {
        return "SkeletonViolated";
    }
    if (!task.mutable_blocks.empty()) {
        std::vector<std::string> parent_blocks = extract_blocks(task, parent_files);
        for (std::size_t k = 0; k < child_blocks.size(); ++k) {
            if (child_blocks[k] != parent_blocks[k] && !task.mutable_blocks.count(static_cast<int>(k)))
                return "SkeletonViolated";
        }
    }
    return std::nullopt;
}

}  // namespace

MutationResult apply_diffs(const TaskSpec& task,
                           const std::vector<std::pair<std::string, std::string>>& parent_files,
                           const std::vector<DiffBlock>& diffs) {
    MutationResult res;
    res.mode = MutationResult::Mode::diff;
    if (diffs.empty()) {
        res.failure = "NoDiffFound";
        return res;
    }
    auto files = parent_files;
    for (std::size_t d = 0; d < diffs.size(); ++d) {
        bool found = false;
        for (auto& [path, text] : files) {
            std::size_t pos = text.find(diffs[d].search);
            if (pos != std::string::npos) {
                text.replace(pos, diffs[d].search.size(), diffs[d].replace);
                found = true;
                break;
            }
        }
        if (!found) {
            res.applied = 0;  // all-or-nothing: the partial child is discarded
            res.failure = "SearchNotFound(" + std::to_string(d) + ")";
            return res;
        }
        ++res.applied;
    }
    if (auto tag = check_child(task, parent_files, files)) {
        res.applied = 0;
        res.failure = *tag;
        return res;
    }
    res.child_files = std::move(files);
    return res;
}

namespace {

// Strips one ``` fence (with optional language tag) wrapping the whole text.
std::string strip_fence(const std::string& text) {
    auto lines = split_keep_newlines(text);
    // Skip leading/trailing blank lines around the fence.
    std::size_t b = 0, e = lines.size();
    while (b < e && trim(lines[b]).empty()) ++b;
    while (e > b && trim(lines[e - 1]).empty()) --e;
    if (e - b >= 2 && trim(lines[b]).rfind("```", 0) == 0 && trim(lines[e - 1]) == "```") {
        std::string out;
        for (std::size_t i = b + 1; i + 1 < e; ++i) out += lines[i];
        return out;
    }
    return text;
}

}  // namespace

MutationResult apply_full_rewrite(const TaskSpec& task,
                                  const std::vector<std::pair<std::string, std::string>>& parent_files,
                                  const std::string& model_output, int block_id) {
    MutationResult res;
    res.mode = MutationResult::Mode::full_rewrite;
    std::string body = strip_fence(model_output);
    if (trim(body).empty()) {
        res.failure = "EmptyOutput";
        return res;
    }
    std::vector<std::string> blocks = extract_blocks(task, parent_files);
    if (block_id < 0 || block_id >= static_cast<int>(blocks.size())) {
        res.failure = "SkeletonViolated";
        return res;
    }
    if (!task.mutable_blocks.empty() && !task.mutable_blocks.count(block_id)) {
        res.failure = "SkeletonViolated";
        return res;
    }
    blocks[static_cast<std::size_t>(block_id)] = body;
    auto files = assemble(task, blocks);
    if (auto tag = check_child(task, parent_files, files)) {
        res.failure = *tag;  // e.g. the rewrite smuggled in a marker line
        return res;
    }
    res.applied = 1;
    res.child_files = std::move(files);
    return res;
}

}  // namespace codevo
