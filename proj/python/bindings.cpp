#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fdmix/config.hpp"
#include "fdmix/errors.hpp"
#include "fdmix/experiments.hpp"
#include "fdmix/montecarlo.hpp"

namespace py = pybind11;
using namespace fdmix;

namespace {

Direction direction_of(const std::string& s) {
    if (s == "dl") return Direction::Downlink;
    if (s == "ul") return Direction::Uplink;
    throw InvalidParameter("direction must be 'dl' or 'ul', got '" + s + "'");
}

CellMode mode_of(const std::string& s) {
    if (s == "fd") return CellMode::FullDuplex;
    if (s == "hd") return CellMode::HalfDuplex;
    throw InvalidParameter("cell must be 'fd' or 'hd', got '" + s + "'");
}

py::object opt(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict metrics(const RunConfig& cfg) {
    const MetricsReport m = evaluate_metrics(cfg.scenario);
    py::dict d;
    d["rate_fd_dl"] = opt(m.rates.fd_dl);
    d["rate_hd_dl"] = opt(m.rates.hd_dl);
    d["rate_fd_ul"] = opt(m.rates.fd_ul);
    d["rate_hd_ul"] = opt(m.rates.hd_ul);
    d["ase_dl"] = m.ase.downlink;
    d["ase_ul"] = m.ase.uplink;
    d["cov_dl"] = opt(m.coverage_dl);
    d["cov_ul"] = opt(m.coverage_ul);
    return d;
}

py::dict thd(const RunConfig& cfg) {
    const ThdBaseline t = thd_baseline(cfg.scenario);
    py::dict d;
    d["ase_dl"] = t.ase_dl;
    d["ase_ul"] = t.ase_ul;
    d["ase_dl_full_slot"] = t.ase_dl_full_slot;
    d["ase_ul_full_slot"] = t.ase_ul_full_slot;
    d["cov_dl"] = t.cov_dl;
    d["cov_ul"] = t.cov_ul;
    return d;
}

py::dict simulation(const RunConfig& cfg) {
    SimulationResult sim;
    {
        py::gil_scoped_release release;
        sim = simulate(cfg.scenario, cfg.window);
    }
    py::dict d;
    d["drops"] = sim.drops;
    d["skip_rate"] = sim.skip_rate();
    d["sinr_dl"] = sim.sinr(Direction::Downlink);
    d["sinr_ul"] = sim.sinr(Direction::Uplink);
    d["mean_rate_dl"] = sim.mean_rate(Direction::Downlink);
    d["mean_rate_ul"] = sim.mean_rate(Direction::Uplink);
    d["cov_dl"] = sim.coverage(Direction::Downlink, cfg.scenario.coverage_threshold_db);
    d["cov_ul"] = sim.coverage(Direction::Uplink, cfg.scenario.coverage_threshold_db);
    d["ase_dl"] = sim.ase(Direction::Downlink);
    d["ase_ul"] = sim.ase(Direction::Uplink);
    return d;
}

py::list sweep(const RunConfig& cfg) {
    SweepTable table;
    {
        py::gil_scoped_release release;
        table = run_sweep(cfg.sweep);
    }
    py::list rows;
    for (const auto& r : table.rows) {
        py::dict d;
        d["rho_f"] = opt(r.rho_f);
        d["sic_db"] = r.sic_db;
        d["p_bs_dbm"] = r.p_bs_dbm;
        d["p_ue_dbm"] = r.p_ue_dbm;
        d["metric"] = r.metric;
        d["value"] = r.value;
        d["engine"] = to_string(r.engine);
        d["scenario_hash"] = r.scenario_hash;
        d["seed"] = r.seed;
        rows.append(d);
    }
    return rows;
}

py::dict benchmark(const RunConfig& cfg) {
    BenchmarkSummary s;
    {
        py::gil_scoped_release release;
        s = run_benchmark(benchmark_scenario(cfg.scenario), cfg.window, cfg.benchmark, cfg.benchmark_budget);
    }
    py::list verdicts;
    for (const auto& v : s.verdicts) {
        py::dict d;
        d["direction"] = v.direction == Direction::Downlink ? "dl" : "ul";
        d["nu"] = v.nu;
        d["max_deviation"] = v.max_deviation;
        d["mean_deviation"] = v.mean_deviation;
        d["pass"] = v.pass;
        verdicts.append(d);
    }
    py::dict d;
    d["verdicts"] = verdicts;
    d["lines"] = s.summary_lines();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mixed full/half-duplex small-cell network: analytic engine and simulator";

    // Translators run newest first, so the base class goes in before its subclasses.
    auto& base_exc = py::register_exception<Error>(m, "FdmixError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base_exc);
    py::register_exception<InvalidParameter>(m, "InvalidParameter", base_exc);
    py::register_exception<NumericalError>(m, "NumericalError", base_exc);
    py::register_exception<TooFewSamples>(m, "TooFewSamples", base_exc);

    py::class_<RunConfig>(m, "Config")
        .def(py::init(&default_config))
        .def_static("from_string", &parse_config_string, py::arg("text"))
        .def_static("load", &load_config, py::arg("path"))
        .def("set", &set_value, py::arg("key"), py::arg("value"))
        .def("get", [](const RunConfig& c, const std::string& k) { return c.entries.at(k); }, py::arg("key"))
        .def("dump", &canonical_dump)
        .def_property_readonly("hash", [](const RunConfig& c) { return scenario_hash(c); })
        .def_property_readonly("entries", [](const RunConfig& c) { return c.entries; })
        .def("__repr__", [](const RunConfig& c) { return "<fdmix.Config " + scenario_hash(c) + ">"; });

    m.def("config_keys", &config_keys);
    m.def("threshold_grid", &parse_threshold_grid, py::arg("spec"));
    m.def("nearest_distance_pdf", &nearest_distance_pdf, py::arg("r"), py::arg("density"), py::arg("nu"));
    m.def("nearest_distance_cdf", &nearest_distance_cdf, py::arg("r"), py::arg("density"), py::arg("nu"));

    m.def(
        "ccdf",
        [](const RunConfig& c, const std::string& dir, const std::string& cell, double y_db) {
            return ccdf(direction_of(dir), mode_of(cell), db_to_linear(y_db), c.scenario);
        },
        py::arg("config"), py::arg("direction"), py::arg("cell"), py::arg("threshold_db"));
    m.def(
        "tabulate_ccdf",
        [](const RunConfig& c, const std::string& dir, const std::string& cell, const std::string& grid) {
            const auto curve = tabulate_ccdf(direction_of(dir), mode_of(cell), c.scenario, parse_threshold_grid(grid));
            return py::make_tuple(curve.thresholds_db, curve.probabilities);
        },
        py::arg("config"), py::arg("direction"), py::arg("cell"), py::arg("grid") = "-20:40:0.25");
    m.def(
        "mean_rate",
        [](const RunConfig& c, const std::string& dir, const std::string& cell) {
            return mean_rate(direction_of(dir), mode_of(cell), c.scenario);
        },
        py::arg("config"), py::arg("direction"), py::arg("cell"));
    m.def("metrics", &metrics, py::arg("config"), "Per-mode rates, mixed ASE and coverage");
    m.def("thd_baseline", &thd, py::arg("config"));
    m.def("simulate", &simulation, py::arg("config"), "Monte Carlo run over the config's window and drops");
    m.def("sweep", &sweep, py::arg("config"), "Rows of the config's sweep plan");
    m.def("benchmark", &benchmark, py::arg("config"), "All-FD analytic vs simulated CCDFs");
    m.attr("__version__") = FDMIX_VERSION;
}
