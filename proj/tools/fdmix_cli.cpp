// fdmix: analytic evaluation, simulation, sweeps and the benchmark from a config file.
//
// Exit codes: 0 ok, 1 other failure, 2 config or usage error, 3 numerical
// failure, 4 too few samples.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdmix/config.hpp"
#include "fdmix/errors.hpp"
#include "fdmix/experiments.hpp"
#include "fdmix/montecarlo.hpp"

#ifndef FDMIX_VERSION
#define FDMIX_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace fdmix;

namespace {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

struct Run {
    std::string command;
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::string out_dir;
    RunConfig cfg;
    fs::path dir;
    std::string started;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;

    void prepare() {
        cfg = load_config(config_path);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw ConfigError(o, "override must look like key=value");
            set_value(cfg, o.substr(0, eq), o.substr(eq + 1));
        }
        seed = cfg.window.master_seed;
        if (!out_dir.empty()) {
            dir = out_dir;
        } else {
            const char* root = std::getenv("FDMIX_OUTPUT_ROOT");
            dir = fs::path(root && *root ? root : "fdmix-runs") / (command + "-" + scenario_hash(cfg));
        }
        fs::create_directories(dir);
        started = utc_now();
    }

    void emit(const std::string& name, const std::string& content) {
        write_atomic(dir / name, content);
        outputs.push_back((dir / name).string());
    }

    void finish() {
        emit("config.txt", canonical_dump(cfg));
        nlohmann::ordered_json m;
        m["tool"] = "fdmix";
        m["version"] = FDMIX_VERSION;
        m["command"] = command;
        m["config_path"] = config_path;
        m["overrides"] = overrides;
        m["scenario_hash"] = scenario_hash(cfg);
        m["seed"] = seed;
        m["started_utc"] = started;
        m["finished_utc"] = utc_now();
        m["outputs"] = outputs;
        m["config"] = cfg.entries;
        m["reproduce"] = "fdmix " + command + " " + (dir / "config.txt").string();
        write_atomic(dir / "manifest.json", m.dump(2) + "\n");
        std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
    }
};

void add_common(CLI::App* sub, Run& run, const std::string& what) {
    sub->add_option(what, run.config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", run.out_dir, "output directory (default $FDMIX_OUTPUT_ROOT/<cmd>-<hash>)");
    sub->add_option("--set", run.overrides, "override a config key, key=value (repeatable)");
}

int cmd_analytic(Run& run, const std::string& direction, const std::string& cell, const std::string& grid) {
    if (direction != "dl" && direction != "ul") throw ConfigError("--direction", "expected dl or ul");
    if (cell != "fd" && cell != "hd") throw ConfigError("--cell", "expected fd or hd");
    run.prepare();
    std::vector<double> g;
    try {
        g = grid.empty() ? standard_grid() : parse_threshold_grid(grid);
    } catch (const InvalidParameter& e) {
        throw ConfigError("--grid", e.what());
    }
    const Scenario& scn = run.cfg.scenario;
    const std::string warn = validate(scn);
    if (!warn.empty()) std::cerr << "warning: " << warn << "\n";
    const Direction dir = direction == "dl" ? Direction::Downlink : Direction::Uplink;
    const CellMode mode = cell == "fd" ? CellMode::FullDuplex : CellMode::HalfDuplex;
    const LinkDirectionReport rep = link_report(dir, mode, scn, g);

    std::string table = "threshold_db,ccdf\n";
    for (std::size_t i = 0; i < rep.ccdf.size(); ++i)
        table += num(rep.ccdf.thresholds_db[i]) + "," + num(rep.ccdf.probabilities[i]) + "\n";
    run.emit("ccdf.csv", table);

    const MetricsReport mr = evaluate_metrics(scn);
    std::string metrics = "metric,value\n";
    metrics += "mean_rate," + num(rep.mean_rate) + "\n";
    metrics += "coverage," + num(rep.coverage) + "\n";
    metrics += "coverage_threshold_db," + num(scn.coverage_threshold_db) + "\n";
    metrics += "ase_dl," + num(mr.ase.downlink) + "\n";
    metrics += "ase_ul," + num(mr.ase.uplink) + "\n";
    if (mr.coverage_dl) metrics += "cov_dl," + num(*mr.coverage_dl) + "\n";
    if (mr.coverage_ul) metrics += "cov_ul," + num(*mr.coverage_ul) + "\n";
    run.emit("metrics.csv", metrics);
    std::cout << direction << "/" << cell << " mean_rate=" << num(rep.mean_rate)
              << " coverage=" << num(rep.coverage) << "\n";
    run.finish();
    return 0;
}

int cmd_simulate(Run& run, const std::string& grid) {
    run.prepare();
    std::vector<double> g;
    try {
        g = grid.empty() ? standard_grid() : parse_threshold_grid(grid);
    } catch (const InvalidParameter& e) {
        throw ConfigError("--grid", e.what());
    }
    const Scenario& scn = run.cfg.scenario;
    const std::string warn = validate(scn);
    if (!warn.empty()) std::cerr << "warning: " << warn << "\n";
    const SimulationResult sim = simulate(scn, run.cfg.window);

    std::ostringstream samples;
    write_samples(samples, sim,
                  {grid.empty() ? "-20:40:0.25" : grid, run.seed, scenario_hash(run.cfg)});
    run.emit("samples.csv", samples.str());

    const EmpiricalCurve dl = empirical_distribution(sim.sinr(Direction::Downlink), g);
    const EmpiricalCurve ul = empirical_distribution(sim.sinr(Direction::Uplink), g);
    std::string table = "threshold_db,ccdf_dl,ccdf_ul\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        table += num(g[i]) + "," + num(dl.ccdf.probabilities[i]) + "," + num(ul.ccdf.probabilities[i]) + "\n";
    run.emit("ccdf.csv", table);

    const auto rate = [](std::size_t a, std::size_t b) { return b ? double(a) / double(b) : 0.0; };
    std::string s = "metric,value\n";
    s += "drops," + std::to_string(sim.drops) + "\n";
    s += "bs_total," + std::to_string(sim.bs_total) + "\n";
    s += "ue_total," + std::to_string(sim.ue_total) + "\n";
    s += "empty_resamples," + std::to_string(sim.empty_resamples) + "\n";
    s += "skip_rate," + num(sim.skip_rate()) + "\n";
    s += "skip_rate_fd," + num(rate(sim.skipped_by_mode[0], sim.cells_by_mode[0])) + "\n";
    s += "skip_rate_hd_dl," + num(rate(sim.skipped_by_mode[1], sim.cells_by_mode[1])) + "\n";
    s += "skip_rate_hd_ul," + num(rate(sim.skipped_by_mode[2], sim.cells_by_mode[2])) + "\n";
    s += "mean_rate_dl," + num(sim.mean_rate(Direction::Downlink)) + "\n";
    s += "mean_rate_ul," + num(sim.mean_rate(Direction::Uplink)) + "\n";
    s += "cov_dl," + num(sim.coverage(Direction::Downlink, scn.coverage_threshold_db)) + "\n";
    s += "cov_ul," + num(sim.coverage(Direction::Uplink, scn.coverage_threshold_db)) + "\n";
    s += "ase_dl," + num(sim.ase(Direction::Downlink)) + "\n";
    s += "ase_ul," + num(sim.ase(Direction::Uplink)) + "\n";
    s += "dkw_dl," + num(dl.dkw_half_width) + "\n";
    s += "dkw_ul," + num(ul.dkw_half_width) + "\n";
    run.emit("summary.csv", s);
    std::cout << "drops=" << sim.drops << " skip_rate=" << num(sim.skip_rate()) << "\n";
    run.finish();
    return 0;
}

int cmd_sweep(Run& run) {
    run.prepare();
    SweepPlan plan = run.cfg.sweep;
    const std::string warn = validate(plan.base);
    if (!warn.empty()) std::cerr << "warning: " << warn << "\n";
    const SweepTable table = run_sweep(plan);
    std::ostringstream out;
    write_table(out, table);
    run.emit("sweep.csv", out.str());

    if (plan.thd_rows) {
        std::string cross = "direction,sic_db,p_bs_dbm,p_ue_dbm,engine,crossover_rho_f\n";
        std::vector<Engine> engines;
        if (plan.engine != Engine::MonteCarlo) engines.push_back(Engine::Analytic);
        if (plan.engine != Engine::Analytic) engines.push_back(Engine::MonteCarlo);
        for (double sic : plan.sic_db)
            for (const auto& pair : plan.power_pairs)
                for (Engine e : engines)
                    for (Direction d : {Direction::Downlink, Direction::Uplink}) {
                        const auto x = crossover_rho_f(table, d, sic, pair, e);
                        cross += std::string(to_string(d)) + "," + num(sic) + "," + num(pair.p_bs_dbm) + "," +
                                 num(pair.p_ue_dbm) + "," + to_string(e) + "," + (x ? num(*x) : "") + "\n";
                    }
        run.emit("crossover.csv", cross);
    }
    std::cout << "rows=" << table.rows.size() << "\n";
    run.finish();
    return 0;
}

int cmd_benchmark(Run& run) {
    run.prepare();
    const Scenario scn = benchmark_scenario(run.cfg.scenario);
    const BenchmarkSummary summary =
        run_benchmark(scn, run.cfg.window, run.cfg.benchmark, run.cfg.benchmark_budget);
    std::string curves = "direction,nu,threshold_db,analytic,empirical\n";
    for (const auto& c : summary.report.curves)
        for (std::size_t i = 0; i < c.analytic.size(); ++i)
            curves += std::string(to_string(c.direction)) + "," + num(c.nu) + "," +
                      num(c.analytic.thresholds_db[i]) + "," + num(c.analytic.probabilities[i]) + "," +
                      num(c.empirical.probabilities[i]) + "\n";
    run.emit("benchmark.csv", curves);
    std::string lines;
    for (const auto& l : summary.summary_lines()) lines += l + "\n";
    run.emit("summary.txt", lines);
    std::cout << lines;
    run.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed full/half-duplex small-cell network evaluator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FDMIX_VERSION);

    Run run;
    std::string direction = "dl", cell = "fd", grid;
    std::uint64_t drops = 0, seed = 0;
    unsigned threads = 0;
    std::string engine;

    auto* analytic = app.add_subcommand("analytic", "CCDF table and metrics from the analytic engine");
    add_common(analytic, run, "config");
    analytic->add_option("--direction", direction, "dl or ul");
    analytic->add_option("--cell", cell, "fd or hd");
    analytic->add_option("--grid", grid, "threshold grid lo:hi:step in dB");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo drops, tagged-link samples and empirical CCDFs");
    add_common(sim, run, "config");
    auto* drops_opt = sim->add_option("--drops", drops, "number of drops");
    auto* seed_opt = sim->add_option("--seed", seed, "master seed");
    auto* threads_opt = sim->add_option("--threads", threads, "worker threads (0: all cores)");
    sim->add_option("--grid", grid, "threshold grid lo:hi:step in dB");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweep over rho_F, SIC and power pairs");
    add_common(sweep, run, "plan");
    auto* engine_opt = sweep->add_option("--engine", engine, "analytic, montecarlo or both");
    auto* sweep_threads = sweep->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* bench = app.add_subcommand("benchmark", "All-FD benchmark of the analytic CCDFs against simulation");
    add_common(bench, run, "config");
    auto* bdrops = bench->add_option("--drops", drops, "number of drops");
    auto* bseed = bench->add_option("--seed", seed, "master seed");
    auto* bthreads = bench->add_option("--threads", threads, "worker threads (0: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto push = [&](CLI::Option* opt, const std::string& key, const std::string& value) {
        if (opt->count() > 0) run.overrides.push_back(key + "=" + value);
    };
    push(drops_opt, "simulation.drops", std::to_string(drops));
    push(bdrops, "simulation.drops", std::to_string(drops));
    push(seed_opt, "simulation.seed", std::to_string(seed));
    push(bseed, "simulation.seed", std::to_string(seed));
    push(threads_opt, "simulation.threads", std::to_string(threads));
    push(sweep_threads, "simulation.threads", std::to_string(threads));
    push(bthreads, "simulation.threads", std::to_string(threads));
    push(engine_opt, "sweep.engine", engine);

    try {
        if (analytic->parsed()) {
            run.command = "analytic";
            return cmd_analytic(run, direction, cell, grid);
        }
        if (sim->parsed()) {
            run.command = "simulate";
            return cmd_simulate(run, grid);
        }
        if (sweep->parsed()) {
            run.command = "sweep";
            return cmd_sweep(run);
        }
        run.command = "benchmark";
        return cmd_benchmark(run);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TooFewSamples& e) {
        std::cerr << "too few samples: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateMix& e) {
        std::cerr << "degenerate mix: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
