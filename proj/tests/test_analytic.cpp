#include <doctest.h>

#include <cmath>
#include <random>

#include "fdmix/analytic.hpp"
#include "fdmix/errors.hpp"
#include "fdmix/laplace.hpp"

using namespace fdmix;
using doctest::Approx;

namespace {

Scenario reference_scenario(double rho_f = 0.5) {
    Scenario s;
    s.mix = DuplexMix::even_split(rho_f);
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Samples the SINR the analytic model describes: Poisson interferer fields on
// a disk around the receiver, Rayleigh fades, nearest-distance serving link.
class ModelOracle {
public:
    ModelOracle(const Scenario& scn, std::uint64_t seed) : scn_(scn), rng_(seed) {}

    double downlink(bool half_duplex) {
        const auto& env = scn_.env;
        const double r = serving(env.nu_dl);
        const double signal = scn_.power.p_bs * path_loss(env.link_bs_ue, r) * fade();
        double i = field(scn_.mix.downlink_weight() * env.bs_density, r, [&](double v) {
            return scn_.power.p_bs * path_loss(env.link_bs_ue, v);
        });
        i += field(scn_.mix.uplink_weight() * env.bs_density, half_duplex ? r : 0.0, [&](double v) {
            return scn_.power.p_ue * path_loss(env.link_ue_ue, v);
        });
        return signal / (i + effective_noise_dl(scn_));
    }

    double uplink(bool full_duplex) {
        const auto& env = scn_.env;
        const double r = serving(env.nu_ul);
        const double signal = scn_.power.p_ue * path_loss(env.link_bs_ue, r) * fade();
        double i = field(scn_.mix.downlink_weight() * env.bs_density, 0.0, [&](double v) {
            return scn_.power.p_bs * path_loss(env.link_bs_bs, v);
        });
        // A UE at distance v interferes only if its own BS is closer than v.
        i += field(scn_.mix.uplink_weight() * env.bs_density, 0.0, [&](double v) {
            return unit_(rng_) < nearest_distance_cdf(v, env.bs_density, env.nu_ul)
                       ? scn_.power.p_ue * path_loss(env.link_bs_ue, v)
                       : 0.0;
        });
        const double floor = effective_noise_ul(scn_) + (full_duplex ? effective_self_interference(scn_) : 0.0);
        return signal / (i + floor);
    }

private:
    static constexpr double kRadius = 600.0;

    double fade() { return -std::log1p(-unit_(rng_)) / scn_.env.fading_rate; }

    double serving(double nu) {
        return std::sqrt(-std::log1p(-unit_(rng_)) / (kPi * nu * scn_.env.bs_density));
    }

    template <class Gain>
    double field(double density, double lower, Gain gain) {
        if (density <= 0.0) return 0.0;
        const double area = kPi * (kRadius * kRadius - lower * lower);
        std::poisson_distribution<long> count(density * area);
        const long n = count(rng_);
        double acc = 0.0;
        for (long k = 0; k < n; ++k) {
            const double v = std::sqrt(lower * lower + unit_(rng_) * (kRadius * kRadius - lower * lower));
            const double g = gain(std::max(v, 1e-9));
            if (g > 0.0) acc += g * fade();
        }
        return acc;
    }

    Scenario scn_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("Laplace factors at s = 0 and with no interferers") {
    Scenario s = reference_scenario();
    CHECK(laplace_dl_from_bs(0.0, 10.0, s) == 1.0);
    CHECK(laplace_dl_from_ues(0.0, s, 0.0) == 1.0);
    CHECK(laplace_ul_from_bs(0.0, s) == 1.0);
    CHECK(laplace_ul_from_ues(0.0, s) == 1.0);
    s.mix = DuplexMix{0.0, 0.0, 1.0};
    CHECK(laplace_dl_from_bs(1e3, 10.0, s) == 1.0);
    CHECK(laplace_ul_from_bs(1e3, s) == 1.0);
    s.mix = DuplexMix{0.0, 1.0, 0.0};
    CHECK(laplace_dl_from_ues(1e3, s, 0.0) == 1.0);
    CHECK(laplace_ul_from_ues(1e3, s) == 1.0);
    CHECK_THROWS_AS(laplace_dl_from_bs(-1.0, 10.0, s), InvalidParameter);
    CHECK_THROWS_AS(laplace_dl_from_bs(1.0, 0.0, s), NonPositiveDistance);
}

TEST_CASE("domain monotonicity of the Laplace factors") {
    const Scenario s = reference_scenario();
    for (double r : {1.0, 5.0, 20.0, 80.0})
        for (double y_db : {-10.0, 0.0, 10.0, 30.0}) {
            const double arg = downlink_laplace_argument(db_to_linear(y_db), r, s);
            CHECK(laplace_dl_from_ues(arg, s, r) >= laplace_dl_from_ues(arg, s, 0.0));
            // Same link class and density: starting at 0 instead of R only adds interference.
            CHECK(laplace_ul_from_bs(arg, s) <= laplace_dl_from_bs(arg, r, s));
        }
}

TEST_CASE("conditioned UE factor reduces to the unconditioned form") {
    QuadratureSpec q;
    const double a = 2e5, alpha = 3.67, density = 5e-4;
    const double plain = fixed_power_exponent(a, alpha, density, 0.0, q);
    // Serving distances concentrated near zero make P(Z <= v) = 1 everywhere that matters.
    const DistanceLaw tight{1e4, 1.0};
    CHECK(rel(conditioned_fixed_power_exponent(a, alpha, density, tight, q), plain) < 1e-6);
    const DistanceLaw usual{1e-3, 1.25};
    CHECK(conditioned_fixed_power_exponent(a, alpha, density, usual, q) < plain);
}

TEST_CASE("by-parts route equals the direct route at eps = 0") {
    Scenario s = reference_scenario();
    s.power.power_control_eps = 0.0;
    for (double r : {3.0, 15.0, 40.0})
        for (double y_db : {-10.0, 0.0, 20.0}) {
            const double arg = uplink_laplace_argument(db_to_linear(y_db), r, s);
            const double direct = -std::log(laplace_ul_from_ues(arg, s));
            const double parts = -std::log(laplace_ul_from_ues_by_parts(arg, s));
            CHECK(rel(parts, direct) < 1e-6);
        }
}

TEST_CASE("density and by-parts forms agree with power control") {
    for (double eps : {0.2, 0.5, 0.8, 1.0}) {
        Scenario s = reference_scenario();
        s.power.power_control_eps = eps;
        for (double r : {5.0, 25.0})
            for (double y_db : {-5.0, 10.0}) {
                const double arg = uplink_laplace_argument(db_to_linear(y_db), r, s);
                const double dens = -std::log(laplace_ul_from_ues(arg, s));
                const double parts = -std::log(laplace_ul_from_ues_by_parts(arg, s));
                CHECK(rel(parts, dens) < 1e-5);
            }
    }
}

TEST_CASE("CCDF range, limits and monotonicity") {
    const Scenario s = reference_scenario();
    for (Direction d : {Direction::Downlink, Direction::Uplink})
        for (CellMode m : {CellMode::FullDuplex, CellMode::HalfDuplex}) {
            CAPTURE(to_string(d));
            CAPTURE(to_string(m));
            CHECK(ccdf(d, m, 0.0, s) == 1.0);
            CHECK(ccdf(d, m, 1e-12, s) == Approx(1.0).epsilon(1e-4));
            CHECK(ccdf(d, m, INFINITY, s) == 0.0);
            const DistributionCurve c = tabulate_ccdf(d, m, s);
            for (double p : c.probabilities) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
            CHECK(c.is_non_increasing(1e-9));
        }
    CHECK_THROWS_AS(ccdf(Direction::Downlink, CellMode::FullDuplex, -1.0, s), InvalidParameter);
}

TEST_CASE("HD cells dominate FD cells in both directions") {
    for (double rho_f : {0.2, 0.5, 0.9}) {
        const Scenario s = reference_scenario(rho_f);
        for (double t : threshold_grid(-20.0, 40.0, 2.0)) {
            const double y = db_to_linear(t);
            CHECK(ccdf_downlink_hd(y, s) >= ccdf_downlink_fd(y, s) - 1e-12);
            CHECK(ccdf_uplink_hd(y, s) >= ccdf_uplink_fd(y, s) - 1e-12);
        }
    }
}

TEST_CASE("perfect cancellation makes FD uplink cells HD-like") {
    Scenario s = reference_scenario();
    s.power.sic_db = INFINITY;
    for (double t : {-10.0, 0.0, 15.0}) CHECK(ccdf_uplink_fd(db_to_linear(t), s) == ccdf_uplink_hd(db_to_linear(t), s));
}

TEST_CASE("common power scaling leaves interference-limited CCDFs unchanged") {
    for (double eps : {0.0, 0.4}) {
        Scenario s = reference_scenario();
        s.interference_limited = true;
        s.power.power_control_eps = eps;
        Scenario loud = s;
        loud.power.p_bs *= 1e3;
        loud.power.p_ue *= 1e3;
        for (Direction d : {Direction::Downlink, Direction::Uplink})
            for (CellMode m : {CellMode::FullDuplex, CellMode::HalfDuplex})
                for (double t : {-10.0, 0.0, 10.0, 25.0}) {
                    const double y = db_to_linear(t);
                    CHECK(rel(ccdf(d, m, y, loud), ccdf(d, m, y, s)) < 1e-9);
                }
    }
}

TEST_CASE("all-downlink interference-limited CCDF matches the classical closed form") {
    // nu = 1, one BS tier: P = 1 / (1 + y^(2/a) int_{y^(-2/a)}^inf du / (1 + u^(a/2))).
    Scenario s;
    s.mix = DuplexMix{0.0, 1.0, 0.0};
    s.interference_limited = true;
    const double a = s.env.link_bs_ue.exponent;
    for (double t : {-10.0, -3.0, 0.0, 5.0, 15.0, 30.0}) {
        const double y = db_to_linear(t);
        const double u0 = std::pow(y, -2.0 / a);
        // u = u0 / w^p, p = 2 / (a/2 - 1), trapezoid on w in (0, 1].
        const double p = 2.0 / (0.5 * a - 1.0);
        const long n = 1000000;
        const double h = 1.0 / double(n);
        double acc = 0.0;
        for (long i = 1; i <= n; ++i) {
            const double w = h * double(i);
            const double u = u0 * std::pow(w, -p);
            const double f = 1.0 / (1.0 + std::pow(u, 0.5 * a)) * p * u / w;
            acc += (i == n ? 0.5 : 1.0) * f;
        }
        const double rho = std::pow(y, 2.0 / a) * acc * h;
        CHECK(rel(ccdf_downlink_hd(y, s), 1.0 / (1.0 + rho)) < 1e-4);
    }
}

TEST_CASE("mean rate of synthetic CCDFs") {
    Scenario s;
    CHECK(mean_rate([](double) { return 0.0; }, s) == 0.0);
    for (double g0 : {0.5, 3.0, 100.0}) {
        const double r = mean_rate([&](double y) { return y < g0 ? 1.0 : 0.0; }, s);
        CHECK(r == Approx(std::log2(1.0 + g0)).epsilon(1e-5));
    }
    // exp(-y) has E[log2(1 + Y)] = e E1(1) / ln 2
    const double e1 = 0.21938393439552029;
    CHECK(mean_rate([](double y) { return std::exp(-y); }, s) ==
          Approx(std::exp(1.0) * e1 / std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("mixed rates, ASE and coverage bookkeeping") {
    Scenario s = reference_scenario(1.0);
    const ModeRates fd = mode_rates(s);
    const DirectionPair mr = mixed_rates(fd, s.mix);
    CHECK(mr.downlink == fd.fd_dl.value());
    CHECK(mr.uplink == fd.fd_ul.value());
    CHECK_FALSE(fd.hd_dl.has_value());

    s.mix = DuplexMix{0.0, 0.5, 0.5};
    const ModeRates hd = mode_rates(s);
    const DirectionPair h = mixed_rates(hd, s.mix);
    CHECK(h.downlink == Approx(0.5 * hd.hd_dl.value()).epsilon(1e-15));
    CHECK(h.uplink == Approx(0.5 * hd.hd_ul.value()).epsilon(1e-15));

    // Linear in the per-mode rates for fixed rates.
    ModeRates all{1.3, 1.9, 1.1, 1.6};
    for (double rho : {0.0, 0.3, 0.7, 1.0}) {
        const DuplexMix m = DuplexMix::even_split(rho);
        const DirectionPair v = mixed_rates(all, m);
        CHECK(v.downlink == Approx(rho * 1.3 + m.rho_d * 1.9).epsilon(1e-15));
        CHECK(v.uplink == Approx(rho * 1.1 + m.rho_u * 1.6).epsilon(1e-15));
    }

    const Scenario t = reference_scenario();
    const DirectionPair a = ase(t);
    const DirectionPair r = mixed_rates(t);
    CHECK(a.downlink == Approx(t.env.bs_density * r.downlink).epsilon(1e-15));
    CHECK(a.uplink == Approx(t.env.bs_density * r.uplink).epsilon(1e-15));

    const DirectionPair c = coverage(t, -200.0);
    CHECK(c.downlink == Approx(1.0).epsilon(1e-6));
    CHECK(c.uplink == Approx(1.0).epsilon(1e-6));

    const Scenario full = reference_scenario(1.0);
    const DirectionPair cf = coverage(full, -8.0);
    CHECK(cf.downlink == ccdf_downlink_fd(db_to_linear(-8.0), full));
    CHECK(cf.uplink == ccdf_uplink_fd(db_to_linear(-8.0), full));

    Scenario dl_only = t;
    dl_only.mix = DuplexMix{0.0, 1.0, 0.0};
    CHECK_THROWS_AS(coverage_uplink(dl_only, -8.0), DegenerateMix);
}

TEST_CASE("THD baseline") {
    const Scenario a = reference_scenario(0.2);
    const Scenario b = reference_scenario(0.9);
    const ThdBaseline ta = thd_baseline(a);
    const ThdBaseline tb = thd_baseline(b);
    CHECK(ta.ase_dl == tb.ase_dl);
    CHECK(ta.ase_ul == tb.ase_ul);
    CHECK(ta.ase_dl == Approx(0.5 * ta.ase_dl_full_slot).epsilon(1e-15));

    Scenario quiet = a;
    quiet.interference_limited = true;
    Scenario loud = quiet;
    loud.power.p_bs = dbm_to_watt(40.0);
    quiet.mix = loud.mix = DuplexMix{0.0, 1.0, 0.0};
    for (double t : {-5.0, 5.0, 20.0})
        CHECK(rel(ccdf_downlink_hd(db_to_linear(t), loud), ccdf_downlink_hd(db_to_linear(t), quiet)) < 1e-9);
}

TEST_CASE("reference scenario regression values") {
    // Frozen after agreement with the model-level Monte Carlo oracle below.
    const Scenario s = reference_scenario();
    const MetricsReport m = evaluate_metrics(s);
    CHECK(rel(m.ase.downlink, 0.001045476468388173) < 1e-6);
    CHECK(rel(m.ase.uplink, 0.0011046422319116642) < 1e-6);
    CHECK(rel(m.coverage_dl.value(), 0.6964574288839213) < 1e-6);
    CHECK(rel(m.coverage_ul.value(), 0.6266895845588354) < 1e-6);
    CHECK(rel(m.rates.fd_dl.value(), 1.3201401297461124) < 1e-6);
    CHECK(m.coverage_hd_dl.value() >= m.coverage_fd_dl.value());
}

TEST_CASE("model-level Monte Carlo oracle") {
    constexpr int n = 20000;
    for (double rho_f : {0.3, 0.5}) {
        const Scenario s = reference_scenario(rho_f);
        ModelOracle oracle(s, 17 + std::uint64_t(rho_f * 100));
        struct Case {
            Direction d;
            CellMode m;
        };
        for (Case c : {Case{Direction::Downlink, CellMode::FullDuplex}, Case{Direction::Downlink, CellMode::HalfDuplex},
                       Case{Direction::Uplink, CellMode::FullDuplex}, Case{Direction::Uplink, CellMode::HalfDuplex}}) {
            CAPTURE(rho_f);
            CAPTURE(std::string(to_string(c.d)));
            CAPTURE(std::string(to_string(c.m)));
            std::vector<double> sinr(n);
            double rate = 0.0, rate_sq = 0.0;
            for (double& g : sinr) {
                g = c.d == Direction::Downlink ? oracle.downlink(c.m == CellMode::HalfDuplex)
                                               : oracle.uplink(c.m == CellMode::FullDuplex);
                const double b = std::log2(1.0 + g);
                rate += b / n;
                rate_sq += b * b / n;
            }
            const double rate_se = std::sqrt((rate_sq - rate * rate) / (n - 1));
            for (double t : {-8.0, 0.0, 10.0}) {
                const double y = db_to_linear(t);
                double hits = 0.0;
                for (double g : sinr) hits += g > y;
                CHECK(std::abs(hits / n - ccdf(c.d, c.m, y, s)) < 0.012);
            }
            const double expected = mean_rate(c.d, c.m, s);
            CAPTURE(rate_se);
            CHECK(std::abs(rate - expected) < 4.0 * rate_se);
        }
    }
}

TEST_CASE("Laplace factor against a Poisson-field oracle") {
    // BS-interference factor at y = 0 dB and the median serving distance.
    const Scenario s = reference_scenario();
    const double r = std::sqrt(std::log(2.0) / (kPi * s.env.nu_dl * s.env.bs_density));
    const double arg = downlink_laplace_argument(1.0, r, s);
    const double density = s.mix.downlink_weight() * s.env.bs_density;
    const double radius = 500.0;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::poisson_distribution<long> count(density * kPi * (radius * radius - r * r));
    double acc = 0.0;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        const long m = count(rng);
        double i = 0.0;
        for (long j = 0; j < m; ++j) {
            const double v = std::sqrt(r * r + unit(rng) * (radius * radius - r * r));
            i += s.power.p_bs * path_loss(s.env.link_bs_ue, v) * -std::log1p(-unit(rng));
        }
        acc += std::exp(-arg * i);
    }
    const double value = laplace_dl_from_bs(arg, r, s);
    CHECK(value > 0.0);
    CHECK(value < 1.0);
    CHECK(rel(acc / draws, value) < 0.01);
}

}  // TEST_SUITE
