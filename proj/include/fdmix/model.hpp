#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fdmix {

inline constexpr double kPi = 3.14159265358979323846;

// ---- unit conversions (dB only at I/O boundaries) ----
double db_to_linear(double x_db);
double linear_to_db(double x);
double dbm_to_watt(double x_dbm);
double watt_to_dbm(double w);

/// Log-distance path-loss class: gain(d) = K d^-alpha, d in metres.
struct LinkClass {
    double attenuation = 1.0;  // K, linear gain at d = 1 m
    double exponent = 4.0;     // alpha

    /// Build from the "A + B log10(R[km])" form used in propagation tables.
    static LinkClass from_km_formula(double loss_at_1km_db, double slope_db_per_decade);

    double loss_at_1km_db() const;
    double slope_db_per_decade() const { return 10.0 * exponent; }
};

struct RadioEnvironment {
    double bs_density = 1e-3;   // lambda_B, nodes/m^2
    double ue_density = 2e-2;   // lambda_U, nodes/m^2 (only the simulator drops UEs)
    double fading_rate = 1.0;   // mu; Rayleigh power fades ~ Exp(mu)
    LinkClass link_bs_ue;
    LinkClass link_ue_ue;
    LinkClass link_bs_bs;
    double noise_dl = 0.0;      // N0 at the downlink UE, W
    double noise_ul = 0.0;      // N1 at the BS, W
    double bandwidth = 10e6;    // Hz
    double nu_dl = 1.0;
    double nu_ul = 1.25;
};

struct DuplexMix {
    double rho_f = 0.5;
    double rho_d = 0.25;
    double rho_u = 0.25;

    /// Remaining cells split evenly between HD downlink and HD uplink.
    static DuplexMix even_split(double rho_f);

    double downlink_weight() const { return rho_f + rho_d; }
    double uplink_weight() const { return rho_f + rho_u; }
};

struct PowerConfig {
    double p_bs = 0.251188643150958;  // W (24 dBm)
    double p_ue = 0.199526231496888;  // W (23 dBm)
    double power_control_eps = 0.0;
    double sic_db = 110.0;            // +inf means perfect cancellation
};

void validate(const LinkClass& link);
/// Returns a warning (empty if none) for the lambda_U < 10 lambda_B regime.
std::string validate(const RadioEnvironment& env);
void validate(const DuplexMix& mix);
void validate(const PowerConfig& power);

/// Tabulated CCDF over a threshold grid in dB.
struct DistributionCurve {
    std::vector<double> thresholds_db;
    std::vector<double> probabilities;

    std::size_t size() const { return thresholds_db.size(); }
    bool is_non_increasing(double slack = 0.0) const;
};

/// Inclusive "lo:hi:step" grid; the step count is rounded to the nearest integer.
std::vector<double> threshold_grid(double lo_db, double hi_db, double step_db);
std::vector<double> parse_threshold_grid(const std::string& spec);
/// -20..40 dB in 0.25 dB steps.
const std::vector<double>& standard_grid();

double path_loss(const LinkClass& link, double d);
double noise_power(double density_dbm_hz, double bandwidth_hz, double noise_figure_db);

/// Nearest-transmitter distance law with correction factor nu:
/// CDF 1 - exp(-pi nu lambda R^2), PDF its derivative.
double nearest_distance_pdf(double r, double density, double nu);
double nearest_distance_cdf(double r, double density, double nu);

double residual_self_interference(const PowerConfig& power);

/// Canonical Table-I environment: 10 MHz, lambda_B = 1e-3, -174 dBm/Hz,
/// NF 9 dB (UE) / 8 dB (BS), 140.7 + 36.7 log10(R km) on every link.
RadioEnvironment reference_environment();

}  // namespace fdmix
