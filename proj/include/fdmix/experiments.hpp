#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdmix/analytic.hpp"
#include "fdmix/montecarlo.hpp"

namespace fdmix {

enum class Engine { Analytic, MonteCarlo, Both };

const char* to_string(Engine e);
Engine parse_engine(const std::string& name);

enum class Metric { AseDl, AseUl, CovDl, CovUl };

const char* to_string(Metric m);
Metric parse_metric(const std::string& name);

struct PowerPair {
    double p_bs_dbm = 24.0;
    double p_ue_dbm = 23.0;
};

struct SweepPlan {
    Scenario base;
    SimWindow window;
    std::vector<double> rho_f_grid = threshold_grid(0.0, 1.0, 0.05);
    std::vector<double> sic_db = {70.0, 85.0, 100.0, 110.0};
    std::vector<PowerPair> power_pairs = {{24.0, 23.0}, {24.0, 10.0}, {10.0, 23.0}};
    Engine engine = Engine::Analytic;
    std::vector<Metric> metrics = {Metric::AseDl, Metric::AseUl, Metric::CovDl, Metric::CovUl};
    bool thd_rows = true;
    /// When set, rho_D = rho_U = (1 - rho_F) / 2; otherwise the base HD split is rescaled.
    bool even_hd_split = true;
    std::string scenario_hash;
    unsigned threads = 0;
};

void validate(const SweepPlan& plan);

/// Scenario for one grid point of the plan.
Scenario sweep_point(const SweepPlan& plan, double rho_f, double sic_db, const PowerPair& pair);

struct SweepRow {
    std::optional<double> rho_f;  // empty on THD rows
    double sic_db = 0.0;
    double p_bs_dbm = 0.0;
    double p_ue_dbm = 0.0;
    std::string metric;
    double value = 0.0;
    Engine engine = Engine::Analytic;
    std::string scenario_hash;
    std::uint64_t seed = 0;
};

struct SweepTable {
    std::vector<SweepRow> rows;

    /// Value of a mixed-system metric, or nullopt when absent.
    std::optional<double> find(const std::string& metric, double rho_f, double sic_db,
                               const PowerPair& pair, Engine engine) const;
    std::optional<double> find_thd(const std::string& metric, double sic_db, const PowerPair& pair,
                                   Engine engine) const;
};

/// Rows ordered by (sic, power pair, rho_f, metric, engine), then THD rows for
/// each (sic, power pair).
SweepTable run_sweep(const SweepPlan& plan);

void write_table(std::ostream& out, const SweepTable& table);

struct FrontierPoint {
    double rho_f = 0.0;
    double coverage = 0.0;
    double ase = 0.0;
};

std::vector<FrontierPoint> frontier(const SweepTable& table, Direction dir, double sic_db,
                                    const PowerPair& pair, Engine engine = Engine::Analytic);

/// Smallest grid rho_F whose mixed ASE exceeds the THD ASE (time share applied).
std::optional<double> crossover_rho_f(const SweepTable& table, Direction dir, double sic_db,
                                      const PowerPair& pair, Engine engine = Engine::Analytic);

/// Benchmark conditions: all cells FD, no power control, no noise or residual
/// self-interference, every link on the BS-UE path loss and P_U = P_B.
Scenario benchmark_scenario(const Scenario& base);

struct BenchmarkVerdict {
    Direction direction = Direction::Downlink;
    double nu = 1.0;
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
    bool pass = false;
};

struct BenchmarkSummary {
    BenchmarkReport report;
    std::vector<BenchmarkVerdict> verdicts;
    double budget = 0.03;

    const BenchmarkVerdict& find(Direction dir, double nu) const;
    /// One "direction nu max mean PASS|FAIL" line per curve.
    std::vector<std::string> summary_lines() const;
};

BenchmarkSummary run_benchmark(const Scenario& scn, const SimWindow& window,
                               const BenchmarkOptions& options = {}, double budget = 0.03);
BenchmarkSummary judge_benchmark(BenchmarkReport report, double budget = 0.03);

}  // namespace fdmix
