#include "codevo/taskspec.hpp"

namespace codevo {

namespace {

const char* kStart = "EVOLVE-BLOCK-START";
const char* kEnd = "EVOLVE-BLOCK-END";

// Strips one leading comment leader. Order matters: "//" before "/".
std::string strip_comment_leader(const std::string& s) {
    if (s.rfind("//", 0) == 0) return s.substr(2);
    if (!s.empty() && (s[0] == '#' || s[0] == ';')) return s.substr(1);
    return s;
}

}  // namespace

bool is_marker_line(const std::string& line, bool& is_start) {
    std::string content = trim(strip_comment_leader(trim(line)));
    if (content == kStart) {
        is_start = true;
        return true;
    }
    if (content == kEnd) {
        is_start = false;
        return true;
    }
    return false;
}

TaskSpec parse_task(const std::vector<std::pair<std::string, std::string>>& raw_files) {
    TaskSpec task;
    int next_block = 0;
    for (const auto& [path, text] : raw_files) {
        SourceFile file;
        file.path = path;
        std::string skeleton;  // pending skeleton text, marker lines included
        std::string evolve;    // pending evolve text
        bool in_block = false;
        for (const auto& line : split_keep_newlines(text)) {
            bool is_start = false;
            if (is_marker_line(line, is_start)) {
                if (is_start) {
                    if (in_block) throw Error("NestedMarker", "START inside an open block in " + path);
                    skeleton += line;
                    file.segments.push_back({Segment::Kind::skeleton, skeleton, std::nullopt});
                    skeleton.clear();
                    in_block = true;
                } else {
                    if (!in_block) throw Error("UnmatchedMarker", "END without START in " + path);
                    file.segments.push_back({Segment::Kind::evolve, evolve, next_block++});
                    evolve.clear();
                    skeleton = line;
                    in_block = false;
                }
            } else if (in_block) {
                evolve += line;
            } else {
                skeleton += line;
            }
        }
        if (in_block) throw Error("UnmatchedMarker", "START without END in " + path);
        if (!skeleton.empty() || file.segments.empty())
            file.segments.push_back({Segment::Kind::skeleton, skeleton, std::nullopt});
        task.files.push_back(std::move(file));
    }
    if (next_block == 0) throw Error("NoEvolveBlock", "no evolve blocks in any file");
    return task;
}

std::vector<std::pair<std::string, std::string>> assemble(const TaskSpec& task,
                                                          const std::vector<std::string>& block_texts) {
    if (static_cast<int>(block_texts.size()) != task.num_blocks())
        throw Error("ArityMismatch", "expected " + std::to_string(task.num_blocks()) + " block texts, got " +
                                         std::to_string(block_texts.size()));
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& file : task.files) {
        std::string text;
        for (const auto& seg : file.segments) {
            if (seg.kind == Segment::Kind::skeleton)
                text += seg.text;
            else
                text += block_texts[static_cast<std::size_t>(*seg.block_id)];
        }
        out.emplace_back(file.path, std::move(text));
    }
    return out;
}

std::vector<std::string> extract_blocks(const TaskSpec& task,
                                        const std::vector<std::pair<std::string, std::string>>& files) {
    // Re-parse the candidate with the same marker grammar and require the
    // skeleton segments to match byte-for-byte. A mutation that adds, removes
    // or edits a marker line changes the parse structure and is rejected here.
    if (files.size() != task.files.size()) throw Error("SkeletonMismatch", "file count differs");
    TaskSpec reparsed;
    try {
        reparsed = parse_task(files);
    } catch (const Error&) {
        throw Error("SkeletonMismatch", "candidate does not parse with the task's marker structure");
    }
    std::vector<std::string> blocks;
    for (std::size_t fi = 0; fi < task.files.size(); ++fi) {
        const auto& a = task.files[fi];
        const auto& b = reparsed.files[fi];
        if (files[fi].first != a.path) throw Error("SkeletonMismatch", "file order/path differs");
        if (a.segments.size() != b.segments.size())
            throw Error("SkeletonMismatch", "segment structure differs in " + a.path);
        for (std::size_t si = 0; si < a.segments.size(); ++si) {
            const auto& sa = a.segments[si];
            const auto& sb = b.segments[si];
            if (sa.kind != sb.kind) throw Error("SkeletonMismatch", "segment kind differs in " + a.path);
            if (sa.kind == Segment::Kind::skeleton) {
                if (sa.text != sb.text) throw Error("SkeletonMismatch", "skeleton bytes differ in " + a.path);
            } else {
                blocks.push_back(sb.text);
            }
        }
    }
    return blocks;
}

std::vector<std::string> initial_blocks(const TaskSpec& task) {
    std::vector<std::string> blocks;
    for (const auto& f : task.files)
        for (const auto& s : f.segments)
            if (s.kind == Segment::Kind::evolve) blocks.push_back(s.text);
    return blocks;
}

}  // namespace codevo
