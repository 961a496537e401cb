#include "fdmix/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "fdmix/errors.hpp"
#include "fdmix/laplace.hpp"

namespace fdmix {

const char* to_string(Direction d) { return d == Direction::Downlink ? "dl" : "ul"; }

const char* to_string(CellMode m) { return m == CellMode::FullDuplex ? "fd" : "hd"; }

std::string validate(const Scenario& scn) {
    std::string warning = validate(scn.env);
    validate(scn.mix);
    validate(scn.power);
    validate(scn.quad);
    if (!(scn.thd_time_share > 0.0 && scn.thd_time_share <= 1.0))
        throw InvalidParameter("thd_time_share must lie in (0, 1]");
    if (std::isnan(scn.coverage_threshold_db))
        throw InvalidParameter("coverage threshold must be a number");
    return warning;
}

double effective_noise_dl(const Scenario& scn) {
    return scn.interference_limited ? 0.0 : scn.env.noise_dl;
}

double effective_noise_ul(const Scenario& scn) {
    return scn.interference_limited ? 0.0 : scn.env.noise_ul;
}

double effective_self_interference(const Scenario& scn) {
    return scn.interference_limited ? 0.0 : residual_self_interference(scn.power);
}

double downlink_laplace_argument(double y, double r, const Scenario& scn) {
    const auto& link = scn.env.link_bs_ue;
    return scn.env.fading_rate * y * std::pow(r, link.exponent) /
           (scn.power.p_bs * link.attenuation);
}

double uplink_laplace_argument(double y, double r, const Scenario& scn) {
    const auto& link = scn.env.link_bs_ue;
    const double eps = scn.power.power_control_eps;
    return scn.env.fading_rate * y * std::pow(link.attenuation, eps - 1.0) *
           std::pow(r, link.exponent * (1.0 - eps)) / scn.power.p_ue;
}

namespace {

// Radius at which c * R^p reaches 1; infinite when c is zero.
double unit_radius(double c, double p) { return c > 0.0 ? std::pow(c, -1.0 / p) : INFINITY; }

void check_laplace_argument(double s) {
    if (!(s >= 0.0)) throw InvalidParameter("Laplace argument must be non-negative");
}

DistanceLaw uplink_serving_law(const Scenario& scn) {
    return DistanceLaw{scn.env.bs_density, scn.env.nu_ul};
}

double dl_bs_exponent(double s, double r, const Scenario& scn, const QuadratureSpec& q) {
    const auto& env = scn.env;
    const double a = s * scn.power.p_bs * env.link_bs_ue.attenuation / env.fading_rate;
    const double density = scn.mix.downlink_weight() * env.bs_density;
    return fixed_power_exponent(a, env.link_bs_ue.exponent, density, r, q);
}

double dl_from_bs(double s, double r, const Scenario& scn, const QuadratureSpec& q) {
    return std::exp(-dl_bs_exponent(s, r, scn, q));
}

double dl_from_ues(double s, const Scenario& scn, double lower, const QuadratureSpec& q) {
    const auto& env = scn.env;
    const double density = scn.mix.uplink_weight() * env.bs_density;
    const double eps = scn.power.power_control_eps;
    const double base = s * scn.power.p_ue * env.link_ue_ue.attenuation / env.fading_rate;
    if (eps == 0.0)
        return std::exp(-fixed_power_exponent(base, env.link_ue_ue.exponent, density, lower, q));
    const double c = base * std::pow(env.link_bs_ue.attenuation, -eps);
    return std::exp(-power_controlled_exponent(c, env.link_ue_ue.exponent,
                                               eps * env.link_bs_ue.exponent, density, lower,
                                               uplink_serving_law(scn), q));
}

double ul_bs_exponent(double s, const Scenario& scn, const QuadratureSpec& q) {
    const auto& env = scn.env;
    const double a = s * scn.power.p_bs * env.link_bs_bs.attenuation / env.fading_rate;
    const double density = scn.mix.downlink_weight() * env.bs_density;
    return fixed_power_exponent(a, env.link_bs_bs.exponent, density, 0.0, q);
}

double ul_from_bs(double s, const Scenario& scn, const QuadratureSpec& q) {
    return std::exp(-ul_bs_exponent(s, scn, q));
}

double ul_from_ues(double s, const Scenario& scn, const QuadratureSpec& q) {
    const auto& env = scn.env;
    const double density = scn.mix.uplink_weight() * env.bs_density;
    const double eps = scn.power.power_control_eps;
    const DistanceLaw law = uplink_serving_law(scn);
    if (eps == 0.0) {
        const double a = s * scn.power.p_ue * env.link_bs_ue.attenuation / env.fading_rate;
        return std::exp(-conditioned_fixed_power_exponent(
            a, env.link_bs_ue.exponent, density, law, q));
    }
    const double c = s * scn.power.p_ue * std::pow(env.link_bs_ue.attenuation, 1.0 - eps) /
                     env.fading_rate;
    return std::exp(-conditioned_power_controlled_exponent(c, env.link_bs_ue.exponent, eps,
                                                           density, law, q));
}

double downlink_ccdf(double y, const Scenario& scn, bool half_duplex) {
    if (!(y >= 0.0)) throw InvalidParameter("SINR threshold must be non-negative");
    if (y == 0.0) return 1.0;
    if (std::isinf(y)) return 0.0;
    const auto& env = scn.env;
    const double n0 = effective_noise_dl(scn);
    const QuadratureSpec inner = scn.quad.inner();
    // Every factor is exp(-c R^p); the smallest unit radius sets the length
    // scale of the outer integral, which can shrink far below the cell size.
    const double s1 = downlink_laplace_argument(y, 1.0, scn);
    const double alpha = env.link_bs_ue.exponent;
    const double scale = std::min(
        {1.0 / std::sqrt(kPi * env.nu_dl * env.bs_density), unit_radius(s1 * n0, alpha),
         unit_radius(dl_bs_exponent(s1, 1.0, scn, inner), 2.0)});
    auto integrand = [&](double r) {
        const double pdf = nearest_distance_pdf(r, env.bs_density, env.nu_dl);
        if (pdf == 0.0) return 0.0;
        const double s = downlink_laplace_argument(y, r, scn);
        const double noise = std::exp(-s * n0);
        if (noise == 0.0) return 0.0;
        const double lx = dl_from_bs(s, r, scn, inner);
        if (lx == 0.0) return 0.0;
        return noise * lx * dl_from_ues(s, scn, half_duplex ? r : 0.0, inner) * pdf;
    };
    return integrate(integrand, 0.0, INFINITY, scn.quad,
                     half_duplex ? "ccdf_downlink_hd over R" : "ccdf_downlink_fd over R", scale);
}

double uplink_ccdf(double y, const Scenario& scn, bool full_duplex) {
    if (!(y >= 0.0)) throw InvalidParameter("SINR threshold must be non-negative");
    if (y == 0.0) return 1.0;
    if (std::isinf(y)) return 0.0;
    const auto& env = scn.env;
    const double floor = effective_noise_ul(scn) + (full_duplex ? effective_self_interference(scn) : 0.0);
    const QuadratureSpec inner = scn.quad.inner();
    const double s1 = uplink_laplace_argument(y, 1.0, scn);
    const double power = env.link_bs_ue.exponent * (1.0 - scn.power.power_control_eps);
    const double scale = std::min(
        {1.0 / std::sqrt(kPi * env.nu_ul * env.bs_density), unit_radius(s1 * floor, power),
         unit_radius(ul_bs_exponent(s1, scn, inner), 2.0 * power / env.link_bs_bs.exponent)});
    auto integrand = [&](double r) {
        const double pdf = nearest_distance_pdf(r, env.bs_density, env.nu_ul);
        if (pdf == 0.0) return 0.0;
        const double s = uplink_laplace_argument(y, r, scn);
        const double noise = std::exp(-s * floor);
        if (noise == 0.0) return 0.0;
        const double hx = ul_from_bs(s, scn, inner);
        if (hx == 0.0) return 0.0;
        return noise * hx * ul_from_ues(s, scn, inner) * pdf;
    };
    return integrate(integrand, 0.0, INFINITY, scn.quad,
                     full_duplex ? "ccdf_uplink_fd over R" : "ccdf_uplink_hd over R", scale);
}

}  // namespace

double laplace_dl_from_bs(double s, double r, const Scenario& scn) {
    check_laplace_argument(s);
    if (!(r > 0.0)) throw NonPositiveDistance("laplace_dl_from_bs: R must be positive");
    return dl_from_bs(s, r, scn, scn.quad);
}

double laplace_dl_from_ues(double s, const Scenario& scn, double lower_limit) {
    check_laplace_argument(s);
    if (!(lower_limit >= 0.0)) throw InvalidParameter("lower limit must be non-negative");
    return dl_from_ues(s, scn, lower_limit, scn.quad);
}

double laplace_ul_from_bs(double s, const Scenario& scn) {
    check_laplace_argument(s);
    return ul_from_bs(s, scn, scn.quad);
}

double laplace_ul_from_ues(double s, const Scenario& scn) {
    check_laplace_argument(s);
    return ul_from_ues(s, scn, scn.quad);
}

double laplace_ul_from_ues_by_parts(double s, const Scenario& scn) {
    check_laplace_argument(s);
    const auto& env = scn.env;
    const double eps = scn.power.power_control_eps;
    const double c = s * scn.power.p_ue * std::pow(env.link_bs_ue.attenuation, 1.0 - eps) /
                     env.fading_rate;
    return std::exp(-conditioned_power_controlled_exponent_by_parts(
        c, env.link_bs_ue.exponent, eps, scn.mix.uplink_weight() * env.bs_density,
        uplink_serving_law(scn), scn.quad));
}

double ccdf_downlink_fd(double y, const Scenario& scn) { return downlink_ccdf(y, scn, false); }

double ccdf_downlink_hd(double y, const Scenario& scn) { return downlink_ccdf(y, scn, true); }

double ccdf_uplink_fd(double y, const Scenario& scn) { return uplink_ccdf(y, scn, true); }

double ccdf_uplink_hd(double y, const Scenario& scn) { return uplink_ccdf(y, scn, false); }

double ccdf(Direction dir, CellMode mode, double y, const Scenario& scn) {
    if (dir == Direction::Downlink)
        return downlink_ccdf(y, scn, mode == CellMode::HalfDuplex);
    return uplink_ccdf(y, scn, mode == CellMode::FullDuplex);
}

DistributionCurve tabulate_ccdf(Direction dir, CellMode mode, const Scenario& scn,
                                const std::vector<double>& grid_db) {
    DistributionCurve curve;
    curve.thresholds_db = grid_db;
    curve.probabilities.reserve(grid_db.size());
    for (double t : grid_db) curve.probabilities.push_back(ccdf(dir, mode, db_to_linear(t), scn));
    return curve;
}

double mean_rate(const std::function<double(double)>& ccdf_fn, const Scenario& scn) {
    const double cutoff = scn.quad.tail_mass_cutoff;
    auto at = [&](double u) { return ccdf_fn(std::exp2(u) - 1.0); };
    // Bracket the truncation point, then tighten it to a quarter bit.
    double lo = 0.0;
    double hi = 1.0;
    while (at(hi) >= cutoff) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1024.0) throw NonConvergence("mean_rate: CCDF tail does not decay over u");
    }
    while (hi - lo > 0.25) {
        const double mid = 0.5 * (lo + hi);
        (at(mid) >= cutoff ? lo : hi) = mid;
    }
    // Near u = 0 the CCDF falls like y^(2/alpha); u = v^3 smooths that edge.
    const double knee = std::min(1.0, hi);
    const double head = integrate([&](double v) { return 3.0 * v * v * at(v * v * v); }, 0.0,
                                  std::cbrt(knee), scn.quad, "mean_rate over u");
    return head + integrate(at, knee, hi, scn.quad, "mean_rate over u");
}

double mean_rate(Direction dir, CellMode mode, const Scenario& scn) {
    Scenario nested = scn;
    nested.quad = scn.quad.inner();
    return mean_rate([&](double y) { return ccdf(dir, mode, y, nested); }, scn);
}

ModeRates mode_rates(const Scenario& scn) {
    ModeRates r;
    if (scn.mix.rho_f > 0.0) {
        r.fd_dl = mean_rate(Direction::Downlink, CellMode::FullDuplex, scn);
        r.fd_ul = mean_rate(Direction::Uplink, CellMode::FullDuplex, scn);
    }
    if (scn.mix.rho_d > 0.0) r.hd_dl = mean_rate(Direction::Downlink, CellMode::HalfDuplex, scn);
    if (scn.mix.rho_u > 0.0) r.hd_ul = mean_rate(Direction::Uplink, CellMode::HalfDuplex, scn);
    return r;
}

DirectionPair mixed_rates(const ModeRates& rates, const DuplexMix& mix) {
    auto term = [](double weight, const std::optional<double>& rate) {
        return weight > 0.0 ? weight * rate.value() : 0.0;
    };
    return DirectionPair{term(mix.rho_f, rates.fd_dl) + term(mix.rho_d, rates.hd_dl),
                         term(mix.rho_f, rates.fd_ul) + term(mix.rho_u, rates.hd_ul)};
}

DirectionPair mixed_rates(const Scenario& scn) { return mixed_rates(mode_rates(scn), scn.mix); }

DirectionPair ase(const Scenario& scn) {
    const DirectionPair r = mixed_rates(scn);
    return DirectionPair{scn.env.bs_density * r.downlink, scn.env.bs_density * r.uplink};
}

double coverage_downlink(const Scenario& scn, double threshold_db) {
    const auto& m = scn.mix;
    if (!(m.downlink_weight() > 0.0))
        throw DegenerateMix("coverage: no cell serves the downlink (rho_f + rho_d = 0)");
    const double y = db_to_linear(threshold_db);
    double acc = 0.0;
    if (m.rho_f > 0.0) acc += m.rho_f * ccdf_downlink_fd(y, scn);
    if (m.rho_d > 0.0) acc += m.rho_d * ccdf_downlink_hd(y, scn);
    return acc / m.downlink_weight();
}

double coverage_uplink(const Scenario& scn, double threshold_db) {
    const auto& m = scn.mix;
    if (!(m.uplink_weight() > 0.0))
        throw DegenerateMix("coverage: no cell serves the uplink (rho_f + rho_u = 0)");
    const double y = db_to_linear(threshold_db);
    double acc = 0.0;
    if (m.rho_f > 0.0) acc += m.rho_f * ccdf_uplink_fd(y, scn);
    if (m.rho_u > 0.0) acc += m.rho_u * ccdf_uplink_hd(y, scn);
    return acc / m.uplink_weight();
}

DirectionPair coverage(const Scenario& scn, double threshold_db) {
    return DirectionPair{coverage_downlink(scn, threshold_db), coverage_uplink(scn, threshold_db)};
}

ThdBaseline thd_baseline(const Scenario& scn) {
    const double y = db_to_linear(scn.coverage_threshold_db);
    Scenario dl = scn;
    dl.mix = DuplexMix{0.0, 1.0, 0.0};
    Scenario ul = scn;
    ul.mix = DuplexMix{0.0, 0.0, 1.0};

    ThdBaseline b;
    b.ase_dl_full_slot =
        scn.env.bs_density * mean_rate(Direction::Downlink, CellMode::HalfDuplex, dl);
    b.ase_ul_full_slot =
        scn.env.bs_density * mean_rate(Direction::Uplink, CellMode::HalfDuplex, ul);
    b.ase_dl = scn.thd_time_share * b.ase_dl_full_slot;
    b.ase_ul = scn.thd_time_share * b.ase_ul_full_slot;
    b.cov_dl = ccdf_downlink_hd(y, dl);
    b.cov_ul = ccdf_uplink_hd(y, ul);
    return b;
}

LinkDirectionReport link_report(Direction dir, CellMode mode, const Scenario& scn,
                                const std::vector<double>& grid_db) {
    LinkDirectionReport rep;
    rep.ccdf = tabulate_ccdf(dir, mode, scn, grid_db);
    rep.mean_rate = mean_rate(dir, mode, scn);
    rep.coverage = ccdf(dir, mode, db_to_linear(scn.coverage_threshold_db), scn);
    return rep;
}

MetricsReport evaluate_metrics(const Scenario& scn) {
    MetricsReport rep;
    rep.rates = mode_rates(scn);
    const DirectionPair r = mixed_rates(rep.rates, scn.mix);
    rep.ase = DirectionPair{scn.env.bs_density * r.downlink, scn.env.bs_density * r.uplink};

    const double y = db_to_linear(scn.coverage_threshold_db);
    const auto& m = scn.mix;
    if (m.rho_f > 0.0) {
        rep.coverage_fd_dl = ccdf_downlink_fd(y, scn);
        rep.coverage_fd_ul = ccdf_uplink_fd(y, scn);
    }
    if (m.rho_d > 0.0) rep.coverage_hd_dl = ccdf_downlink_hd(y, scn);
    if (m.rho_u > 0.0) rep.coverage_hd_ul = ccdf_uplink_hd(y, scn);
    if (m.downlink_weight() > 0.0)
        rep.coverage_dl = (m.rho_f * rep.coverage_fd_dl.value_or(0.0) +
                           m.rho_d * rep.coverage_hd_dl.value_or(0.0)) /
                          m.downlink_weight();
    if (m.uplink_weight() > 0.0)
        rep.coverage_ul = (m.rho_f * rep.coverage_fd_ul.value_or(0.0) +
                           m.rho_u * rep.coverage_hd_ul.value_or(0.0)) /
                          m.uplink_weight();
    return rep;
}

}  // namespace fdmix
