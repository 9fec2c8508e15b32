#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "codevo/bench_math.hpp"
#include "codevo/certificates.hpp"
#include "codevo/config.hpp"
#include "codevo/controller.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using codevo::Error;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;  // failed run / invalid certificate
constexpr int kExitUsage = 2;    // usage, config, or document errors

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ConfigParseError", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error("IoError", "cannot write '" + path.string() + "'");
}

void write_outputs(const fs::path& out_dir, const codevo::TaskSpec& task,
                   const codevo::RunReport& report) {
    nlohmann::json summary;
    summary["seed"] = report.seed;
    summary["proposed"] = report.proposed;
    summary["applied"] = report.applied;
    summary["failed_by_tag"] = report.failed_by_tag;
    summary["trajectory"] = report.trajectory;
    summary["elapsed_s"] = report.elapsed_s;
    if (report.best) {
        summary["best"]["id"] = report.best->id;
        summary["best"]["objective"] = report.best->objective;
        summary["best"]["metrics"] = report.best->metrics;
    }
    write_file(out_dir / "report.json", summary.dump(2) + "\n");

    std::string log;
    for (const auto& line : report.log_lines) log += line + "\n";
    write_file(out_dir / "candidates.jsonl", log);
    write_file(out_dir / "snapshot.json", report.db_snapshot);

    if (!report.prompts.empty()) {
        nlohmann::json arr = report.prompts;
        write_file(out_dir / "prompts.json", arr.dump(2) + "\n");
    }
    if (report.best) {
        for (const auto& [path, content] : assemble(task, report.best->block_texts))
            write_file(out_dir / "best" / path, content);
    }
    if (!report.best_construction.empty())
        write_file(out_dir / "best" / "construction.txt", report.best_construction);
}

int finish_run(const fs::path& out_dir, const codevo::TaskSpec& task,
               const codevo::RunReport& report) {
    write_outputs(out_dir, task, report);
    std::cout << "proposed " << report.proposed << ", applied " << report.applied << "\n";
    if (report.best)
        std::cout << "best objective " << report.best->objective << " (candidate "
                  << report.best->id << ")\n";
    std::cout << "outputs in " << out_dir.string() << "\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, long long seed_flag,
            bool seed_set, const std::string& stub_script, const std::string& snapshot_path) {
    codevo::LoadedConfig cfg = codevo::load_config(config_path);
    if (!stub_script.empty()) cfg.provider = codevo::ModelProvider::stub_from_file(stub_script);
    if (!cfg.provider.configured())
        throw Error("ConfigParseError",
                    "no model backend: add a provider section, set EVOLVE_MODEL_ENDPOINT, or pass "
                    "--stub-script");
    if (seed_set) cfg.seed = static_cast<std::uint64_t>(seed_flag);
    codevo::RunReport report;
    if (snapshot_path.empty()) {
        report = codevo::run(cfg.task, cfg.run, cfg.provider, cfg.seed);
    } else {
        report = codevo::resume(cfg.task, cfg.run, cfg.provider, cfg.seed, slurp(snapshot_path));
    }
    return finish_run(out_dir, cfg.task, report);
}

int cmd_best(const std::string& snapshot_path) {
    codevo::ProgramDb db = codevo::ProgramDb::restore(slurp(snapshot_path));
    auto best = db.best();
    if (!best) {
        std::cout << "no candidates\n";
        return kExitOk;
    }
    nlohmann::json metrics = best->metrics;
    std::cout << "candidate " << best->id << ", objective " << best->objective << "\n";
    std::cout << "metrics " << metrics.dump() << "\n";
    for (std::size_t i = 0; i < best->block_texts.size(); ++i)
        std::cout << "--- block " << i << " ---\n" << best->block_texts[i];
    return kExitOk;
}

int cmd_verify(const std::string& problem, const std::string& cert_path) {
    auto outcome = codevo::verify_certificate(problem, slurp(cert_path));
    std::cout << outcome.message << "\n";
    return outcome.exit_code;
}

// Built-in reference checks over the benchmark helpers, one line each.
int cmd_bench() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << " — " << detail;
        std::cout << "\n";
        if (!ok) ++failures;
    };

    auto t222 = codevo::matmul_tensor(2, 2, 2);
    auto strassen = codevo::verify_decomposition(t222, codevo::strassen_decomposition());
    check("decomposition: classical 7-term <2,2,2>", strassen.exact && strassen.rank == 7,
          "rank " + std::to_string(strassen.rank));
    bool trivial_ok = true;
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n)
            for (int p = 1; p <= 3; ++p)
                trivial_ok = trivial_ok &&
                             codevo::verify_decomposition(codevo::matmul_tensor(m, n, p),
                                                          codevo::trivial_decomposition(m, n, p))
                                 .exact;
    check("decomposition: trivial rank-mnp up to 3x3x3", trivial_ok, "");

    codevo::StepFunction box{-0.25, 0.25, {1.0}};
    double c1 = codevo::autocorr_c1_upper(box);
    check("autoconvolution: constant box C1", std::abs(c1 - 2.0) < 1e-12,
          "value " + std::to_string(c1));
    codevo::StepFunction half{0.0, 2.0, {0.5, 0.5, 0.5, 0.5}};
    double ov = codevo::min_overlap_objective(half);
    check("min-overlap: constant 1/2", std::abs(ov - 0.5) < 1e-12, "value " + std::to_string(ov));
    double sb = codevo::sumset_bound({0, 1});
    check("sumset: {0,1}", sb == 1.0, "value " + std::to_string(sb));

    std::vector<std::vector<long long>> simplex;
    for (int i = 0; i < 3; ++i)
        for (long long sgn : {1LL, -1LL}) {
            std::vector<long long> pt(3, 0);
            pt[i] = sgn;
            simplex.push_back(pt);
        }
    auto kiss = codevo::verify_kissing(simplex);
    check("kissing: cross-polytope d=3", kiss.valid && kiss.count == 6,
          "count " + std::to_string(kiss.count));

    auto fixture = codevo::make_binpack_fixture(20250814);
    auto fig = codevo::simulate_binpack(fixture.jobs, fixture.machines, codevo::binpack_score);
    auto naive =
        codevo::simulate_binpack(fixture.jobs, fixture.machines, codevo::cpu_best_fit_score);
    check("binpack: ratio scorer strands no more than cpu-best-fit",
          fig.stranded_total() <= naive.stranded_total(),
          "stranded " + std::to_string(fig.stranded_total()) + " vs " +
              std::to_string(naive.stranded_total()));

    std::cout << (failures == 0 ? "all checks passed\n"
                                : std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evolutionary code optimization driver"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", snapshot_path, stub_script, problem, cert_path;
    long long seed_flag = 0;

    auto* run_cmd = app.add_subcommand("run", "evolve a task from its initial program");
    run_cmd->add_option("--config", config_path, "config document")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    auto* seed_opt = run_cmd->add_option("--seed", seed_flag, "rng seed override");
    run_cmd->add_option("--stub-script", stub_script, "use this scripted provider instead");

    auto* resume_cmd = app.add_subcommand("resume", "continue a run from a database snapshot");
    resume_cmd->add_option("--config", config_path, "config document")->required();
    resume_cmd->add_option("--snapshot", snapshot_path, "snapshot.json from a previous run")
        ->required();
    resume_cmd->add_option("--out", out_dir, "output directory");
    auto* rseed_opt = resume_cmd->add_option("--seed", seed_flag, "rng seed override");
    resume_cmd->add_option("--stub-script", stub_script, "use this scripted provider instead");

    auto* best_cmd = app.add_subcommand("best", "print the best candidate of a snapshot");
    best_cmd->add_option("--snapshot", snapshot_path, "snapshot.json")->required();

    auto* verify_cmd = app.add_subcommand("verify", "check a certificate document");
    verify_cmd->add_option("problem", problem, "problem family name")->required();
    verify_cmd->add_option("certificate", cert_path, "certificate file")->required();

    auto* bench_cmd = app.add_subcommand("bench", "run the built-in reference checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        // CLI11 returns 0 for --help; map real parse errors onto the usage code.
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(config_path, out_dir, seed_flag, seed_opt->count() > 0,
                                     stub_script, "");
        if (*resume_cmd) return cmd_run(config_path, out_dir, seed_flag, rseed_opt->count() > 0,
                                        stub_script, snapshot_path);
        if (*best_cmd) return cmd_best(snapshot_path);
        if (*verify_cmd) return cmd_verify(problem, cert_path);
        if (*bench_cmd) return cmd_bench();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string& code = e.code();
        if (code == "ConfigParseError" || code == "ConfigError" || code == "CorruptSnapshot")
            return kExitUsage;
        return kExitInvalid;  // SeedEvaluationFailed and other runtime failures
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitUsage;
}
