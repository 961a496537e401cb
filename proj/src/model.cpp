#include "fdmix/model.hpp"

#include <cmath>
#include <sstream>

#include "fdmix/errors.hpp"

namespace fdmix {

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

double dbm_to_watt(double x_dbm) { return std::pow(10.0, (x_dbm - 30.0) / 10.0); }

double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

LinkClass LinkClass::from_km_formula(double loss_at_1km_db, double slope_db_per_decade) {
    // A + B log10(d / 1000) = (A - 3B) + B log10(d)
    LinkClass link;
    link.exponent = slope_db_per_decade / 10.0;
    link.attenuation = db_to_linear(-(loss_at_1km_db - 3.0 * slope_db_per_decade));
    return link;
}

double LinkClass::loss_at_1km_db() const {
    return -linear_to_db(attenuation) + 3.0 * slope_db_per_decade();
}

void validate(const LinkClass& link) {
    if (!(link.attenuation > 0.0) || !std::isfinite(link.attenuation))
        throw InvalidParameter("link attenuation K must be positive");
    if (!(link.exponent > 2.0) || !std::isfinite(link.exponent))
        throw InvalidParameter("path-loss exponent must exceed 2");
}

std::string validate(const RadioEnvironment& env) {
    if (!(env.bs_density > 0.0)) throw InvalidParameter("bs_density must be positive");
    if (!(env.ue_density >= env.bs_density))
        throw InvalidParameter("ue_density must be at least bs_density");
    if (!(env.fading_rate > 0.0)) throw InvalidParameter("fading_rate must be positive");
    if (!(env.noise_dl >= 0.0) || !(env.noise_ul >= 0.0))
        throw InvalidParameter("noise powers must be non-negative");
    if (!(env.bandwidth > 0.0)) throw InvalidParameter("bandwidth must be positive");
    for (double nu : {env.nu_dl, env.nu_ul})
        if (!(nu >= 1.0 && nu <= 2.0)) throw InvalidParameter("nu must lie in [1, 2]");
    validate(env.link_bs_ue);
    validate(env.link_ue_ue);
    validate(env.link_bs_bs);
    if (env.ue_density < 10.0 * env.bs_density)
        return "ue_density below 10 x bs_density; cells may lack UEs to schedule";
    return {};
}

DuplexMix DuplexMix::even_split(double rho_f) {
    const double rest = 0.5 * (1.0 - rho_f);
    return DuplexMix{rho_f, rest, rest};
}

void validate(const DuplexMix& mix) {
    for (double p : {mix.rho_f, mix.rho_d, mix.rho_u})
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("mode probabilities must lie in [0, 1]");
    if (std::abs(mix.rho_f + mix.rho_d + mix.rho_u - 1.0) > 1e-12)
        throw InvalidParameter("mode probabilities must sum to 1");
}

void validate(const PowerConfig& power) {
    if (!(power.p_bs > 0.0) || !(power.p_ue > 0.0))
        throw InvalidParameter("transmit powers must be positive");
    if (!(power.power_control_eps >= 0.0 && power.power_control_eps <= 1.0))
        throw InvalidParameter("power-control exponent must lie in [0, 1]");
    if (!(power.sic_db >= 0.0)) throw InvalidParameter("sic_db must be non-negative");
}

bool DistributionCurve::is_non_increasing(double slack) const {
    for (std::size_t i = 1; i < probabilities.size(); ++i)
        if (probabilities[i] > probabilities[i - 1] + slack) return false;
    return true;
}

std::vector<double> threshold_grid(double lo_db, double hi_db, double step_db) {
    if (!(step_db > 0.0) || !(hi_db >= lo_db))
        throw InvalidParameter("threshold grid needs lo <= hi and a positive step");
    const auto n = static_cast<std::size_t>(std::llround((hi_db - lo_db) / step_db)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = lo_db + static_cast<double>(i) * step_db;
    return grid;
}

std::vector<double> parse_threshold_grid(const std::string& spec) {
    std::istringstream in(spec);
    double v[3];
    char sep = 0;
    for (int i = 0; i < 3; ++i) {
        if (!(in >> v[i])) throw InvalidParameter("grid must look like lo:hi:step, got '" + spec + "'");
        if (i < 2 && (!(in >> sep) || sep != ':'))
            throw InvalidParameter("grid must look like lo:hi:step, got '" + spec + "'");
    }
    in >> std::ws;
    if (!in.eof()) throw InvalidParameter("trailing characters in grid '" + spec + "'");
    return threshold_grid(v[0], v[1], v[2]);
}

const std::vector<double>& standard_grid() {
    static const std::vector<double> grid = threshold_grid(-20.0, 40.0, 0.25);
    return grid;
}

double path_loss(const LinkClass& link, double d) {
    if (!(d > 0.0)) throw NonPositiveDistance("path_loss: distance must be positive");
    return link.attenuation * std::pow(d, -link.exponent);
}

double noise_power(double density_dbm_hz, double bandwidth_hz, double noise_figure_db) {
    if (!(bandwidth_hz > 0.0)) throw InvalidParameter("noise_power: bandwidth must be positive");
    return dbm_to_watt(density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

double nearest_distance_pdf(double r, double density, double nu) {
    if (r <= 0.0) return 0.0;
    const double k = kPi * nu * density;
    return 2.0 * k * r * std::exp(-k * r * r);
}

double nearest_distance_cdf(double r, double density, double nu) {
    if (r <= 0.0) return 0.0;
    return -std::expm1(-kPi * nu * density * r * r);
}

double residual_self_interference(const PowerConfig& power) {
    if (std::isinf(power.sic_db)) return 0.0;
    return power.p_bs / db_to_linear(power.sic_db);
}

RadioEnvironment reference_environment() {
    RadioEnvironment env;
    env.bs_density = 1e-3;
    env.ue_density = 2e-2;
    env.fading_rate = 1.0;
    env.bandwidth = 10e6;
    env.link_bs_ue = LinkClass::from_km_formula(140.7, 36.7);
    env.link_ue_ue = env.link_bs_ue;
    env.link_bs_bs = env.link_bs_ue;
    env.noise_dl = noise_power(-174.0, env.bandwidth, 9.0);
    env.noise_ul = noise_power(-174.0, env.bandwidth, 8.0);
    env.nu_dl = 1.0;
    env.nu_ul = 1.25;
    return env;
}

}  // namespace fdmix
