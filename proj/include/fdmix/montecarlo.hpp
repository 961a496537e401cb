#pragma once

// Monte Carlo realization of the mixed-duplex network on a torus window:
// Poisson BSs with categorical duplex modes, Poisson UEs attached to their
// nearest BS, one scheduled UE per direction and cell, Rayleigh fades.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdmix/analytic.hpp"

namespace fdmix {

enum class BsMode : std::uint8_t { FullDuplex, HalfDuplexDl, HalfDuplexUl };

const char* to_string(BsMode m);

/// Which serving cell provides the per-drop sample for each direction.
enum class TaggingRule {
    UniformCell,  // uniformly among the cells serving that direction
    CentralCell,  // the serving cell whose BS is nearest the window center
};

struct SimWindow {
    double half_width = 1000.0;  // m; the torus has side 2 * half_width
    std::uint64_t master_seed = 1;
    std::size_t num_drops = 1000;
    std::size_t min_bs_per_drop = 1;
    TaggingRule tagging = TaggingRule::CentralCell;
    unsigned threads = 0;  // 0: hardware concurrency

    double side() const { return 2.0 * half_width; }
    double area() const { return side() * side(); }
};

void validate(const SimWindow& window, const RadioEnvironment& env);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Scheduled UE indices of one cell, -1 when absent.
struct CellSchedule {
    int dl_ue = -1;
    int ul_ue = -1;
    bool skipped = false;  // too few UEs for the cell's mode; the cell stays silent
};

/// Exponential power fades seen by one receiver, frozen for the drop.
struct FadeSet {
    std::vector<double> from_bs;     // indexed by BS
    std::vector<double> from_ul_ue;  // indexed by the cell whose UL UE transmits
};

struct DropRealization {
    double side = 0.0;
    std::vector<Point> bs_positions;
    std::vector<BsMode> bs_modes;
    std::vector<Point> ue_positions;
    std::vector<int> associations;  // UE -> BS
    std::vector<CellSchedule> scheduled;
    FadeSet dl_fades;  // at the tagged downlink UE
    FadeSet ul_fades;  // at the tagged uplink BS
    int tagged_dl_cell = -1;
    int tagged_ul_cell = -1;
    std::size_t empty_resamples = 0;

    bool transmits_dl(std::size_t cell) const;
    bool receives_ul(std::size_t cell) const;
};

double torus_distance(const Point& a, const Point& b, double side);

/// Per-drop RNG seed from (master_seed, drop_index) by counter-based mixing.
std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t drop_index);

DropRealization generate_drop(const RadioEnvironment& env, const DuplexMix& mix,
                              const SimWindow& window, std::uint64_t drop_index);

/// SINR values above this (zero interference and noise) are censored.
inline constexpr double kSinrCensor = 1e6;

double sample_sinr_downlink(const DropRealization& drop, const Scenario& scn, int tagged_cell);
double sample_sinr_uplink(const DropRealization& drop, const Scenario& scn, int tagged_cell);

struct EmpiricalCurve {
    DistributionCurve ccdf;
    std::size_t samples = 0;
    double dkw_half_width = 0.0;  // 95% uniform band
};

double dkw_half_width(std::size_t n, double confidence = 0.95);

EmpiricalCurve empirical_distribution(const std::vector<double>& sinr_linear,
                                      const std::vector<double>& grid_db = standard_grid());

struct TaggedSample {
    double sinr = 0.0;  // linear
    double distance = 0.0;
    BsMode mode = BsMode::FullDuplex;
    bool censored = false;
};

struct SimulationResult {
    std::vector<TaggedSample> downlink;
    std::vector<TaggedSample> uplink;
    std::size_t drops = 0;
    std::size_t empty_resamples = 0;
    std::size_t bs_total = 0;
    std::size_t ue_total = 0;
    std::size_t cells_by_mode[3] = {0, 0, 0};
    std::size_t skipped_by_mode[3] = {0, 0, 0};
    std::size_t dl_serving_cells = 0;
    std::size_t ul_serving_cells = 0;
    double area = 0.0;  // per drop, m^2

    double skip_rate() const;
    std::vector<double> sinr(Direction dir) const;
    std::vector<double> sinr(Direction dir, BsMode mode) const;
    double mean_rate(Direction dir) const;
    double coverage(Direction dir, double threshold_db) const;
    /// Served-cell density times the tagged-link mean rate, bits/s/Hz/m^2.
    double ase(Direction dir) const;
};

SimulationResult simulate(const Scenario& scn, const SimWindow& window);

struct DistanceHistogram {
    std::vector<double> edges;  // m, size = counts.size() + 1
    std::vector<std::size_t> counts;
    std::size_t samples = 0;
    double fitted_nu = 0.0;
    double fit_rms = 0.0;
};

/// Least-squares fit of nu in 1 - exp(-pi nu density r^2) to the empirical CDF.
DistanceHistogram fit_distance_law(const std::vector<double>& distances, double density,
                                   std::size_t min_samples = 10000);

struct DistanceFit {
    DistanceHistogram downlink;  // scheduled DL UEs
    DistanceHistogram uplink;    // scheduled UL UEs
    DistanceHistogram all_ues;
};

DistanceFit measure_distance_pdf(const std::vector<DropRealization>& drops, double bs_density);

struct BenchmarkCurve {
    Direction direction = Direction::Downlink;
    double nu = 1.0;
    DistributionCurve analytic;
    DistributionCurve empirical;
    double max_deviation = 0.0;
    double mean_deviation = 0.0;
};

struct BenchmarkOptions {
    std::vector<double> nus = {1.0, 1.25};
    double lo_db = -10.0;
    double hi_db = 30.0;
    double step_db = 0.25;
};

struct BenchmarkReport {
    std::vector<BenchmarkCurve> curves;
    SimulationResult simulation;
    double dkw_dl = 0.0;
    double dkw_ul = 0.0;

    const BenchmarkCurve& find(Direction dir, double nu) const;
};

/// Downlink CCDF mixed over FD and HD-DL cells, or uplink over FD and HD-UL.
double mixed_ccdf(Direction dir, double y, const Scenario& scn);

std::pair<double, double> curve_deviation(const DistributionCurve& a, const DistributionCurve& b);

BenchmarkReport benchmark_report(const Scenario& scn, const SimWindow& window,
                                 const BenchmarkOptions& options = {});
/// Same comparison against an existing simulation.
BenchmarkReport benchmark_report(const Scenario& scn, const SimulationResult& sim,
                                 const BenchmarkOptions& options = {});

struct SampleFileHeader {
    std::string grid;
    std::uint64_t seed = 0;
    std::string scenario_hash;
};

/// Delimited text: '#'-prefixed header lines, then direction,mode,sinr_db,distance_m,censored.
void write_samples(std::ostream& out, const SimulationResult& sim, const SampleFileHeader& header);

}  // namespace fdmix
