#include "codevo/evaluator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

extern char** environ;

namespace codevo {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetricsPrefix = "EVOLVE_METRICS: ";
constexpr std::size_t kOutputCap = 4 << 20;  // bytes of child output kept per evaluation

struct ScratchDir {
    fs::path path;

    ScratchDir() {
        const char* base = std::getenv("TMPDIR");
        std::string tmpl = (base != nullptr ? std::string(base) : std::string("/tmp"));
        tmpl += "/evolve-XXXXXX";
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (mkdtemp(buf.data()) == nullptr)
            throw Error("ScratchError", std::string("mkdtemp: ") + std::strerror(errno));
        path = buf.data();
    }

    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);  // best effort; never throws out of a destructor
    }

    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
};

struct StageOutcome {
    bool timed_out = false;
    int exit_code = 0;
    std::string output;  // stdout and stderr, interleaved
};

// Runs `sh -c command` in `cwd` with the two protocol variables set, captures
// combined output, and kills the whole process group on deadline overrun.
StageOutcome run_command(const std::string& command, const fs::path& cwd,
                         const std::string& stage_name, double timeout_s) {
    int fds[2];
    if (pipe(fds) != 0) throw Error("ScratchError", std::string("pipe: ") + std::strerror(errno));

    std::vector<std::string> env_strings;
    for (char** e = environ; *e != nullptr; ++e) {
        if (std::strncmp(*e, "EVOLVE_STAGE=", 13) == 0) continue;
        if (std::strncmp(*e, "EVOLVE_SCRATCH=", 15) == 0) continue;
        env_strings.emplace_back(*e);
    }
    env_strings.push_back("EVOLVE_STAGE=" + stage_name);
    env_strings.push_back("EVOLVE_SCRATCH=" + cwd.string());
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw Error("ScratchError", std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        setpgid(0, 0);
        close(fds[0]);
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[1]);
        if (chdir(cwd.c_str()) != 0) _exit(127);
        const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
        execve("/bin/sh", const_cast<char**>(argv), envp.data());
        _exit(127);
    }

    setpgid(pid, pid);  // mirror the child's call so the group exists either way
    close(fds[1]);

    StageOutcome out;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    char buf[4096];
    bool open = true;
    while (open) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            out.timed_out = true;
            break;
        }
        struct pollfd pfd = {fds[0], POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 100)));
        if (rc < 0 && errno != EINTR) break;
        if (rc <= 0) continue;
        ssize_t n = read(fds[0], buf, sizeof(buf));
        if (n <= 0) {
            open = false;
        } else if (out.output.size() < kOutputCap) {
            out.output.append(buf, static_cast<std::size_t>(n));
        }
    }
    close(fds[0]);

    if (out.timed_out) {
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);  // in case the group vanished already
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (!out.timed_out)
        out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("ScratchError", "cannot write " + path.string());
    f << content;
}

MetricMap force_fb_prefix(const MetricMap& in) {
    MetricMap out;
    for (const auto& [k, v] : in) out[k.rfind("fb_", 0) == 0 ? k : "fb_" + k] = v;
    return out;
}

}  // namespace

std::optional<MetricMap> parse_metrics_line(const std::string& output, bool& bad_values) {
    bad_values = false;
    std::optional<MetricMap> result;
    for (const auto& raw : split_keep_newlines(output)) {
        if (raw.rfind(kMetricsPrefix, 0) != 0) continue;
        std::string body = raw.substr(std::strlen(kMetricsPrefix));
        auto j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            bad_values = true;
            result.reset();
            continue;
        }
        MetricMap m;
        bool ok = true;
        for (const auto& [key, value] : j.items()) {
            if (!value.is_number() || !std::isfinite(value.get<double>())) {
                ok = false;
                break;
            }
            m[key] = value.get<double>();
        }
        bad_values = !ok;
        if (ok) result = std::move(m);
        else result.reset();
    }
    return result;
}

EvaluationResult evaluate(const TaskSpec& task,
                          const std::vector<std::pair<std::string, std::string>>& child_files,
                          const std::vector<CascadeStage>& stages, double budget_s,
                          const std::string& warm_start) {
    EvaluationResult res;
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    ScratchDir scratch;
    for (const auto& [path, content] : child_files) write_file(scratch.path / path, content);
    if (!warm_start.empty()) write_file(scratch.path / "warm_start.txt", warm_start);

    std::vector<CascadeStage> plan = stages;
    if (plan.empty()) plan.push_back(CascadeStage{});

    std::string all_output;
    for (const auto& stage : plan) {
        double limit = stage.timeout_s;
        if (budget_s > 0.0) limit = std::min(limit, budget_s - elapsed());
        if (limit <= 0.0) {
            res.failure = "Timeout";
            break;
        }
        std::string cmd = task.eval_command;
        if (!stage.command_args.empty()) cmd += " " + stage.command_args;
        StageOutcome out = run_command(cmd, scratch.path, stage.name, limit);
        all_output += out.output;

        if (out.timed_out) {
            res.failure = "Timeout";
            break;
        }
        bool bad = false;
        auto metrics = parse_metrics_line(out.output, bad);
        if (out.exit_code != 0) {
            if (metrics) res.metrics = std::move(*metrics);  // emitted before the failure
            res.failure = "NonzeroExit";
            break;
        }
        if (!metrics) {
            res.failure = "BadMetrics";
            break;
        }
        res.metrics = std::move(*metrics);
        ++res.stages_passed;
        bool promoted = true;
        for (const auto& rule : stage.pass_rule)
            if (!rule.holds(res.metrics)) promoted = false;
        if (!promoted) {
            res.failure = "StageGate";
            break;
        }
    }

    std::ifstream cons(scratch.path / "construction.txt", std::ios::binary);
    if (cons) {
        std::ostringstream buf;
        buf << cons.rdbuf();
        res.construction = buf.str();
    }
    res.output_excerpt = truncate_middle(all_output, 4096);
    res.duration_s = elapsed();
    return res;
}

std::vector<EvaluationResult> evaluate_parallel(
    const TaskSpec& task,
    const std::vector<std::vector<std::pair<std::string, std::string>>>& children, int pool_size,
    double budget_s, const std::string& warm_start) {
    if (pool_size < 1) throw Error("ConfigError", "pool_size must be >= 1");
    std::vector<EvaluationResult> results(children.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= children.size()) return;
            results[i] = evaluate(task, children[i], task.cascade, budget_s, warm_start);
        }
    };
    std::vector<std::thread> pool;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(pool_size), children.size());
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

std::pair<MetricMap, std::optional<std::string>> llm_feedback(const ModelProvider& provider,
                                                              const std::string& child_code,
                                                              const std::string& rubric,
                                                              std::int64_t request_id) {
    GenerationRequest req;
    req.prompt = rubric + "\n\nProgram:\n" + child_code +
                 "\n\nReply with one line of the form EVOLVE_METRICS: {\"fb_name\": value, ...}\n";
    req.request_id = request_id;
    GenerationResult gen = provider.generate(req);
    if (!gen.ok()) return {{}, gen.failure};

    bool bad = false;
    if (auto m = parse_metrics_line(gen.text, bad)) return {force_fb_prefix(*m), std::nullopt};

    auto j = nlohmann::json::parse(trim(gen.text), nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
        MetricMap m;
        bool ok = true;
        for (const auto& [key, value] : j.items()) {
            if (!value.is_number() || !std::isfinite(value.get<double>())) {
                ok = false;
                break;
            }
            m[key] = value.get<double>();
        }
        if (ok) return {force_fb_prefix(m), std::nullopt};
    }
    return {{}, std::string("BadMetrics")};
}

}  // namespace codevo
