#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdmix/model.hpp"
#include "fdmix/quadrature.hpp"

namespace fdmix {

enum class Direction { Downlink, Uplink };
enum class CellMode { FullDuplex, HalfDuplex };

const char* to_string(Direction d);
const char* to_string(CellMode m);

struct Scenario {
    RadioEnvironment env = reference_environment();
    DuplexMix mix;
    PowerConfig power;
    QuadratureSpec quad;
    /// Drop thermal noise and residual self-interference.
    bool interference_limited = false;
    double coverage_threshold_db = -8.0;
    /// Fraction of slots a synchronous TDD baseline spends in each direction.
    double thd_time_share = 0.5;
};

/// Throws on invalid components; returns a non-fatal warning (possibly empty).
std::string validate(const Scenario& scn);

double effective_noise_dl(const Scenario& scn);
double effective_noise_ul(const Scenario& scn);
double effective_self_interference(const Scenario& scn);

/// s = mu y R^alpha1 / (P_B K1)
double downlink_laplace_argument(double y, double r, const Scenario& scn);
/// s = mu y K1^(eps-1) R^(alpha1 (1-eps)) / P_U
double uplink_laplace_argument(double y, double r, const Scenario& scn);

// ---- interference Laplace factors ----
double laplace_dl_from_bs(double s, double r, const Scenario& scn);
double laplace_dl_from_ues(double s, const Scenario& scn, double lower_limit);
double laplace_ul_from_bs(double s, const Scenario& scn);
double laplace_ul_from_ues(double s, const Scenario& scn);
/// Integration-by-parts route for the uplink UE factor (valid for all eps).
double laplace_ul_from_ues_by_parts(double s, const Scenario& scn);

// ---- SINR CCDFs, y is a linear SINR threshold ----
double ccdf_downlink_fd(double y, const Scenario& scn);
double ccdf_downlink_hd(double y, const Scenario& scn);
double ccdf_uplink_fd(double y, const Scenario& scn);
double ccdf_uplink_hd(double y, const Scenario& scn);
double ccdf(Direction dir, CellMode mode, double y, const Scenario& scn);

DistributionCurve tabulate_ccdf(Direction dir, CellMode mode, const Scenario& scn,
                                const std::vector<double>& grid_db = standard_grid());

/// E[log2(1 + SINR)] = int_0^inf ccdf(2^u - 1) du, truncated once the CCDF
/// drops below the quadrature tail cutoff.
double mean_rate(const std::function<double(double)>& ccdf_fn, const Scenario& scn);
double mean_rate(Direction dir, CellMode mode, const Scenario& scn);

struct DirectionPair {
    double downlink = 0.0;
    double uplink = 0.0;
};

/// Per-mode average rates in bits/s/Hz; modes with zero weight are left empty.
struct ModeRates {
    std::optional<double> fd_dl;
    std::optional<double> hd_dl;
    std::optional<double> fd_ul;
    std::optional<double> hd_ul;
};

ModeRates mode_rates(const Scenario& scn);
DirectionPair mixed_rates(const ModeRates& rates, const DuplexMix& mix);
DirectionPair mixed_rates(const Scenario& scn);
/// Area spectral efficiency in bits/s/Hz/m^2.
DirectionPair ase(const Scenario& scn);

double coverage_downlink(const Scenario& scn, double threshold_db);
double coverage_uplink(const Scenario& scn, double threshold_db);
DirectionPair coverage(const Scenario& scn, double threshold_db);

struct ThdBaseline {
    double ase_dl = 0.0;  // time share applied
    double ase_ul = 0.0;
    double ase_dl_full_slot = 0.0;  // time share of 1
    double ase_ul_full_slot = 0.0;
    double cov_dl = 0.0;
    double cov_ul = 0.0;
};

/// Synchronous TDD half-duplex baseline: every cell downlink in one slot,
/// every cell uplink in the other.
ThdBaseline thd_baseline(const Scenario& scn);

struct LinkDirectionReport {
    DistributionCurve ccdf;
    double mean_rate = 0.0;
    double coverage = 0.0;
};

LinkDirectionReport link_report(Direction dir, CellMode mode, const Scenario& scn,
                                const std::vector<double>& grid_db = standard_grid());

struct MetricsReport {
    ModeRates rates;
    DirectionPair ase;
    std::optional<double> coverage_dl;
    std::optional<double> coverage_ul;
    std::optional<double> coverage_fd_dl;
    std::optional<double> coverage_hd_dl;
    std::optional<double> coverage_fd_ul;
    std::optional<double> coverage_hd_ul;
};

/// Rates, ASE and coverage in one pass, computing each per-mode quantity once.
MetricsReport evaluate_metrics(const Scenario& scn);

}  // namespace fdmix
