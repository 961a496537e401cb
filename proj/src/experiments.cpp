#include "fdmix/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fdmix/errors.hpp"
#include "parallel.hpp"

namespace fdmix {

namespace {

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

bool same_pair(const SweepRow& r, double sic_db, const PowerPair& pair) {
    return same(r.sic_db, sic_db) && same(r.p_bs_dbm, pair.p_bs_dbm) &&
           same(r.p_ue_dbm, pair.p_ue_dbm);
}

const char* thd_name(Metric m, bool full_slot) {
    switch (m) {
    case Metric::AseDl: return full_slot ? "thd_ase_dl_full_slot" : "thd_ase_dl";
    case Metric::AseUl: return full_slot ? "thd_ase_ul_full_slot" : "thd_ase_ul";
    case Metric::CovDl: return "thd_cov_dl";
    case Metric::CovUl: return "thd_cov_ul";
    }
    return "?";
}

std::vector<Engine> engines_of(Engine e) {
    if (e == Engine::Both) return {Engine::Analytic, Engine::MonteCarlo};
    return {e};
}

double analytic_value(const MetricsReport& rep, Metric m) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    switch (m) {
    case Metric::AseDl: return rep.ase.downlink;
    case Metric::AseUl: return rep.ase.uplink;
    case Metric::CovDl: return rep.coverage_dl.value_or(nan);
    case Metric::CovUl: return rep.coverage_ul.value_or(nan);
    }
    return nan;
}

double simulated_value(const SimulationResult& sim, Metric m, double threshold_db) {
    switch (m) {
    case Metric::AseDl: return sim.ase(Direction::Downlink);
    case Metric::AseUl: return sim.ase(Direction::Uplink);
    case Metric::CovDl: return sim.coverage(Direction::Downlink, threshold_db);
    case Metric::CovUl: return sim.coverage(Direction::Uplink, threshold_db);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

const char* to_string(Engine e) {
    switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::MonteCarlo: return "montecarlo";
    case Engine::Both: return "both";
    }
    return "?";
}

Engine parse_engine(const std::string& name) {
    if (name == "analytic") return Engine::Analytic;
    if (name == "montecarlo") return Engine::MonteCarlo;
    if (name == "both") return Engine::Both;
    throw InvalidParameter("unknown engine '" + name + "' (analytic, montecarlo, both)");
}

const char* to_string(Metric m) {
    switch (m) {
    case Metric::AseDl: return "ase_dl";
    case Metric::AseUl: return "ase_ul";
    case Metric::CovDl: return "cov_dl";
    case Metric::CovUl: return "cov_ul";
    }
    return "?";
}

Metric parse_metric(const std::string& name) {
    for (Metric m : {Metric::AseDl, Metric::AseUl, Metric::CovDl, Metric::CovUl})
        if (name == to_string(m)) return m;
    throw InvalidParameter("unknown metric '" + name + "' (ase_dl, ase_ul, cov_dl, cov_ul)");
}

void validate(const SweepPlan& plan) {
    validate(plan.base);
    if (plan.rho_f_grid.empty()) throw InvalidParameter("sweep rho_f grid is empty");
    for (double r : plan.rho_f_grid)
        if (!(r >= 0.0 && r <= 1.0)) throw InvalidParameter("sweep rho_f grid must lie in [0, 1]");
    if (plan.sic_db.empty()) throw InvalidParameter("sweep SIC list is empty");
    if (plan.power_pairs.empty()) throw InvalidParameter("sweep power pair list is empty");
    if (plan.metrics.empty()) throw InvalidParameter("sweep requests no metrics");
    if (plan.engine != Engine::Analytic) validate(plan.window, plan.base.env);
}

Scenario sweep_point(const SweepPlan& plan, double rho_f, double sic_db, const PowerPair& pair) {
    Scenario s = plan.base;
    const double hd = plan.base.mix.rho_d + plan.base.mix.rho_u;
    if (plan.even_hd_split || !(hd > 0.0)) {
        s.mix = DuplexMix::even_split(rho_f);
    } else {
        const double scale = (1.0 - rho_f) / hd;
        s.mix = DuplexMix{rho_f, plan.base.mix.rho_d * scale, plan.base.mix.rho_u * scale};
    }
    s.power.sic_db = sic_db;
    s.power.p_bs = dbm_to_watt(pair.p_bs_dbm);
    s.power.p_ue = dbm_to_watt(pair.p_ue_dbm);
    return s;
}

std::optional<double> SweepTable::find(const std::string& metric, double rho_f, double sic_db,
                                       const PowerPair& pair, Engine engine) const {
    for (const auto& r : rows)
        if (r.rho_f && same(*r.rho_f, rho_f) && r.metric == metric && r.engine == engine &&
            same_pair(r, sic_db, pair))
            return r.value;
    return std::nullopt;
}

std::optional<double> SweepTable::find_thd(const std::string& metric, double sic_db,
                                           const PowerPair& pair, Engine engine) const {
    for (const auto& r : rows)
        if (!r.rho_f && r.metric == metric && r.engine == engine && same_pair(r, sic_db, pair))
            return r.value;
    return std::nullopt;
}

SweepTable run_sweep(const SweepPlan& plan) {
    validate(plan);
    const auto engines = engines_of(plan.engine);
    struct Unit {
        double sic;
        PowerPair pair;
        std::optional<double> rho_f;  // empty: THD unit
    };
    std::vector<Unit> units;
    for (double sic : plan.sic_db)
        for (const auto& pair : plan.power_pairs) {
            for (double rho : plan.rho_f_grid) units.push_back({sic, pair, rho});
            if (plan.thd_rows) units.push_back({sic, pair, std::nullopt});
        }

    std::vector<std::vector<SweepRow>> out(units.size());
    // Simulations parallelise over drops themselves.
    const unsigned outer = plan.engine == Engine::Analytic ? plan.threads : 1;
    detail::parallel_for(units.size(), outer, [&](std::size_t i) {
        const Unit& u = units[i];
        auto row = [&](const char* metric, double value, Engine e) {
            SweepRow r;
            r.rho_f = u.rho_f;
            r.sic_db = u.sic;
            r.p_bs_dbm = u.pair.p_bs_dbm;
            r.p_ue_dbm = u.pair.p_ue_dbm;
            r.metric = metric;
            r.value = value;
            r.engine = e;
            r.scenario_hash = plan.scenario_hash;
            r.seed = e == Engine::MonteCarlo ? plan.window.master_seed : 0;
            out[i].push_back(std::move(r));
        };
        const Scenario scn = sweep_point(plan, u.rho_f.value_or(0.0), u.sic, u.pair);
        if (u.rho_f) {
            std::optional<MetricsReport> analytic;
            std::optional<SimulationResult> sim;
            if (plan.engine != Engine::MonteCarlo) analytic = evaluate_metrics(scn);
            if (plan.engine != Engine::Analytic) sim = simulate(scn, plan.window);
            for (Metric m : plan.metrics)
                for (Engine e : engines)
                    row(to_string(m),
                        e == Engine::Analytic ? analytic_value(*analytic, m)
                                              : simulated_value(*sim, m, scn.coverage_threshold_db),
                        e);
            return;
        }
        for (Engine e : engines) {
            ThdBaseline thd;
            if (e == Engine::Analytic) {
                thd = thd_baseline(scn);
            } else {
                Scenario dl = scn;
                dl.mix = DuplexMix{0.0, 1.0, 0.0};
                Scenario ul = scn;
                ul.mix = DuplexMix{0.0, 0.0, 1.0};
                const SimulationResult sd = simulate(dl, plan.window);
                const SimulationResult su = simulate(ul, plan.window);
                thd.ase_dl_full_slot = sd.ase(Direction::Downlink);
                thd.ase_ul_full_slot = su.ase(Direction::Uplink);
                thd.ase_dl = scn.thd_time_share * thd.ase_dl_full_slot;
                thd.ase_ul = scn.thd_time_share * thd.ase_ul_full_slot;
                thd.cov_dl = sd.coverage(Direction::Downlink, scn.coverage_threshold_db);
                thd.cov_ul = su.coverage(Direction::Uplink, scn.coverage_threshold_db);
            }
            for (Metric m : plan.metrics) {
                switch (m) {
                case Metric::AseDl:
                    row(thd_name(m, false), thd.ase_dl, e);
                    row(thd_name(m, true), thd.ase_dl_full_slot, e);
                    break;
                case Metric::AseUl:
                    row(thd_name(m, false), thd.ase_ul, e);
                    row(thd_name(m, true), thd.ase_ul_full_slot, e);
                    break;
                case Metric::CovDl: row(thd_name(m, false), thd.cov_dl, e); break;
                case Metric::CovUl: row(thd_name(m, false), thd.cov_ul, e); break;
                }
            }
        }
    });

    SweepTable table;
    for (auto& rows : out)
        for (auto& r : rows) table.rows.push_back(std::move(r));
    return table;
}

void write_table(std::ostream& out, const SweepTable& table) {
    out << "rho_f,sic_db,p_bs_dbm,p_ue_dbm,metric,value,engine,scenario_hash,seed\n";
    char buf[256];
    for (const auto& r : table.rows) {
        char rho[32] = "";
        if (r.rho_f) std::snprintf(rho, sizeof rho, "%.10g", *r.rho_f);
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%s,%.12g,%s,%s,%llu\n", rho, r.sic_db,
                      r.p_bs_dbm, r.p_ue_dbm, r.metric.c_str(), r.value, to_string(r.engine),
                      r.scenario_hash.c_str(), static_cast<unsigned long long>(r.seed));
        out << buf;
    }
}

std::vector<FrontierPoint> frontier(const SweepTable& table, Direction dir, double sic_db,
                                    const PowerPair& pair, Engine engine) {
    const std::string ase = dir == Direction::Downlink ? "ase_dl" : "ase_ul";
    const std::string cov = dir == Direction::Downlink ? "cov_dl" : "cov_ul";
    std::vector<FrontierPoint> pts;
    for (const auto& r : table.rows) {
        if (!r.rho_f || r.metric != ase || r.engine != engine || !same_pair(r, sic_db, pair))
            continue;
        const auto c = table.find(cov, *r.rho_f, sic_db, pair, engine);
        if (c) pts.push_back({*r.rho_f, *c, r.value});
    }
    std::sort(pts.begin(), pts.end(),
              [](const FrontierPoint& a, const FrontierPoint& b) { return a.rho_f < b.rho_f; });
    return pts;
}

std::optional<double> crossover_rho_f(const SweepTable& table, Direction dir, double sic_db,
                                      const PowerPair& pair, Engine engine) {
    const Metric m = dir == Direction::Downlink ? Metric::AseDl : Metric::AseUl;
    const auto thd = table.find_thd(thd_name(m, false), sic_db, pair, engine);
    if (!thd) throw InvalidParameter("sweep table has no THD rows for the crossover");
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : table.rows)
        if (r.rho_f && r.metric == to_string(m) && r.engine == engine && same_pair(r, sic_db, pair))
            pts.emplace_back(*r.rho_f, r.value);
    std::sort(pts.begin(), pts.end());
    for (const auto& [rho, v] : pts)
        if (v > *thd) return rho;
    return std::nullopt;
}

Scenario benchmark_scenario(const Scenario& base) {
    Scenario s = base;
    s.mix = DuplexMix{1.0, 0.0, 0.0};
    s.power.power_control_eps = 0.0;
    s.power.p_ue = s.power.p_bs;
    s.interference_limited = true;
    s.env.link_ue_ue = s.env.link_bs_ue;
    s.env.link_bs_bs = s.env.link_bs_ue;
    return s;
}

const BenchmarkVerdict& BenchmarkSummary::find(Direction dir, double nu) const {
    for (const auto& v : verdicts)
        if (v.direction == dir && same(v.nu, nu)) return v;
    throw InvalidParameter("benchmark summary has no verdict for the requested direction and nu");
}

std::vector<std::string> BenchmarkSummary::summary_lines() const {
    std::vector<std::string> lines;
    char buf[160];
    for (const auto& v : verdicts) {
        std::snprintf(buf, sizeof buf, "%s nu=%.4g max_dev=%.4f mean_dev=%.4f budget=%.4g %s",
                      to_string(v.direction), v.nu, v.max_deviation, v.mean_deviation, budget,
                      v.pass ? "PASS" : "FAIL");
        lines.emplace_back(buf);
    }
    return lines;
}

BenchmarkSummary judge_benchmark(BenchmarkReport report, double budget) {
    BenchmarkSummary s;
    s.budget = budget;
    for (const auto& c : report.curves)
        s.verdicts.push_back(
            {c.direction, c.nu, c.max_deviation, c.mean_deviation, c.max_deviation <= budget});
    s.report = std::move(report);
    return s;
}

BenchmarkSummary run_benchmark(const Scenario& scn, const SimWindow& window,
                               const BenchmarkOptions& options, double budget) {
    if (!(budget > 0.0)) throw InvalidParameter("benchmark budget must be positive");
    return judge_benchmark(benchmark_report(scn, window, options), budget);
}

}  // namespace fdmix
