// simulate — frame-clocked WiMAX-style uplink simulator.
//
// Runs one of the four link-adaptation scenarios (or all of them) and writes
// per-frame CSV records plus a steady-state summary per scenario. Exit codes:
// 0 success, 2 configuration or I/O error, 3 internal invariant violation.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ulsim/engine.hpp"

using namespace ulsim;

namespace {

struct Options {
    std::string scenario = "all";
    std::uint64_t seed = 1;
    std::optional<double> duration_s;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> downsample_s;
};

SimConfig resolve_config(const Options& opt, std::optional<ScenarioId> cli_scenario) {
    SimConfig c;
    if (!opt.config_path.empty()) c = load_config_file(opt.config_path, c);
    // The command line wins over the file for scenario, seed and duration.
    if (cli_scenario) apply_scenario_preset(c, *cli_scenario);
    if (!c.scenario_preset)
        throw ConfigError(ConfigError::Kind::Parse, "missing required key: scenario");
    c.seed = opt.seed;
    if (opt.duration_s) c.duration_s = *opt.duration_s;
    validate_config(c);
    return c;
}

struct ScenarioOutput {
    SimConfig config;
    std::vector<StatsRecord> records;
    ScenarioSummary summary;
};

ScenarioOutput run_one(const SimConfig& cfg) {
    ScenarioOutput out;
    out.config = cfg;
    out.records = run(cfg);
    out.summary = summarize(out.records, cfg.warmup_s);
    out.summary.scenario = cfg.scenario;
    out.summary.seed = cfg.seed;
    out.summary.config_digest = config_digest(cfg);
    return out;
}

void write_outputs(const ScenarioOutput& out, const Options& opt) {
    const std::filesystem::path dir(opt.out_dir);
    const std::string name = scenario_name(out.config.scenario);

    const std::vector<StatsRecord>& to_emit =
        opt.downsample_s ? *new std::vector<StatsRecord>(
                               downsample(out.records, *opt.downsample_s,
                                          out.config.frame_duration_s()))
                         : out.records;
    emit_csv_file(to_emit, (dir / (name + ".csv")).string());
    if (opt.downsample_s) delete &to_emit;

    const std::string summary_path = (dir / (name + ".summary.txt")).string();
    std::ofstream sum(summary_path, std::ios::binary);
    if (!sum) throw CsvError("cannot open for writing: " + summary_path);
    sum << summary_text(out.summary);

    std::printf("%s: %lld frames, usage %.2f %%, delay %.3f ms, throughput %.0f bps\n", name.c_str(),
                static_cast<long long>(out.records.size()), out.summary.ul_usage_pct,
                out.summary.mean_wimax_delay_s * 1e3, out.summary.mac_throughput_bps);
}

int run_cli(const Options& opt) {
    std::filesystem::create_directories(opt.out_dir);

    if (opt.scenario != "all") {
        const auto id = parse_scenario(opt.scenario);
        if (!id)
            throw ConfigError(ConfigError::Kind::Parse,
                              "unknown scenario '" + opt.scenario + "'");
        write_outputs(run_one(resolve_config(opt, *id)), opt);
        return 0;
    }

    // Batch mode: the four scenarios share the seed (hence the channel
    // realization) and run in parallel; results merge after completion.
    const ScenarioId ids[4] = {ScenarioId::Qpsk12, ScenarioId::AmcA, ScenarioId::AmcB,
                               ScenarioId::AmcAHarq};
    std::vector<std::future<ScenarioOutput>> futures;
    for (ScenarioId id : ids) {
        SimConfig cfg = resolve_config(opt, id);
        futures.push_back(std::async(std::launch::async, [cfg] { return run_one(cfg); }));
    }
    std::vector<ScenarioSummary> summaries;
    for (auto& f : futures) {
        const ScenarioOutput out = f.get();
        write_outputs(out, opt);
        summaries.push_back(out.summary);
    }

    const ComparisonReport rep = compare(summaries);
    const std::string comparison_path =
        (std::filesystem::path(opt.out_dir) / "comparison.csv").string();
    std::ofstream cmp(comparison_path, std::ios::binary);
    if (!cmp) throw CsvError("cannot open for writing: " + comparison_path);
    cmp << comparison_csv(rep);
    std::printf("\n%s", comparison_text(rep).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frame-clocked WiMAX-style uplink link-adaptation simulator"};
    Options opt;

    app.add_option("--scenario", opt.scenario,
                   "Scenario to run: qpsk12|amc-a|amc-b|amc-a-harq|all")
        ->default_val("all");
    app.add_option("--seed", opt.seed, "Random seed")->default_val(1);
    app.add_option("--duration", opt.duration_s, "Simulated seconds (default 300)");
    app.add_option("--config", opt.config_path, "key=value config file (see configs/)");
    app.add_option("--out", opt.out_dir, "Output directory")->default_val(".");
    app.add_option("--downsample", opt.downsample_s,
                   "Average CSV rows into bins of this many seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return run_cli(opt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CsvError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 2;
    } catch (const contract_violation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fatal: %s\n", e.what());
        return 3;
    }
}
