#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace codevo {

// Named scalar scores returned by evaluation. Maximized by convention.
using MetricMap = std::map<std::string, double>;

// Thrown for contract violations that callers are expected to handle by name
// (UnmatchedMarker, ArityMismatch, CorruptSnapshot, ...). Recoverable
// per-candidate problems (timeouts, bad diffs) are failure tags, not throws.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Keeps at most `cap` bytes of `s`, half from the head and half from the
// tail, with an ellipsis marker in between. Used for prompt excerpts and
// stored evaluation output.
inline std::string truncate_middle(const std::string& s, std::size_t cap) {
    static const std::string kMark = "\n...[truncated]...\n";
    if (s.size() <= cap) return s;
    std::size_t head = cap / 2;
    std::size_t tail = cap - head;
    return s.substr(0, head) + kMark + s.substr(s.size() - tail);
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits into lines, each keeping its trailing '\n' if present, so that
// concatenation reproduces the input byte-for-byte.
inline std::vector<std::string> split_keep_newlines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos + 1));
        pos = nl + 1;
    }
    return lines;
}

}  // namespace codevo
