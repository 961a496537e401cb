#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("fdmix-cli-" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout.txt";
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = env + " \"" FDMIX_CLI_PATH "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::size_t lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

// Small window so simulations finish in about a second.
const char* kSmall = "simulation.half_width = 300\nsimulation.threads = 1\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analytic run writes the table, metrics and manifest") {
    const fs::path cfg = write_file("defaults.conf", "# defaults\n");
    const fs::path out = scratch() / "analytic";
    const Result r = run("analytic " + cfg.string() + " --direction dl --cell fd --grid=-10:30:0.5 --out " +
                         out.string());
    REQUIRE(r.code == 0);
    const std::string table = slurp(out / "ccdf.csv");
    CHECK(lines(table) == 82);
    std::string at_minus_8, coverage;
    std::istringstream t(table), m(slurp(out / "metrics.csv"));
    for (std::string line; std::getline(t, line);)
        if (line.rfind("-8,", 0) == 0) at_minus_8 = line.substr(3);
    for (std::string line; std::getline(m, line);)
        if (line.rfind("coverage,", 0) == 0) coverage = line.substr(9);
    CHECK_FALSE(coverage.empty());
    CHECK(at_minus_8 == coverage);

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["command"] == "analytic");
    CHECK(manifest["scenario_hash"].get<std::string>().size() == 16);
    CHECK(manifest["config"]["powers.p_bs_dbm"] == "24");
    CHECK(manifest["outputs"].size() == 3);
    CHECK(manifest.contains("started_utc"));
    CHECK(fs::exists(out / "config.txt"));
    CHECK_FALSE(fs::exists(out / "manifest.json.tmp"));
}

TEST_CASE("config and usage errors exit with 2") {
    const fs::path bad = write_file("bad.conf", "[powers]\np_bs_dbm = loud\n");
    Result r = run("analytic " + bad.string() + " --out " + (scratch() / "bad").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("powers.p_bs_dbm") != std::string::npos);

    const fs::path unknown = write_file("unknown.conf", "powers.volume = 11\n");
    r = run("analytic " + unknown.string() + " --out " + (scratch() / "bad").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("powers.volume") != std::string::npos);

    const fs::path cfg = write_file("plain.conf", "");
    r = run("sweep " + cfg.string() + " --engine abacus --out " + (scratch() / "bad").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("abacus") != std::string::npos);

    r = run("analytic " + cfg.string() + " --grid 1:2 --out " + (scratch() / "bad").string());
    CHECK(r.code == 2);
    CHECK(run("frobnicate").code == 2);
}

TEST_CASE("numerical failure exits with 3 and names the integral") {
    const fs::path cfg = write_file("tight.conf", "numerics.max_subdivisions = 1\nnumerics.rel_tol = 1e-14\n");
    const Result r = run("analytic " + cfg.string() + " --out " + (scratch() / "tight").string());
    CHECK(r.code == 3);
    CHECK(r.err.find("integral '") != std::string::npos);
}

TEST_CASE("zero drops exit with 4") {
    const fs::path cfg = write_file("small.conf", kSmall);
    CHECK(run("simulate " + cfg.string() + " --drops 0 --out " + (scratch() / "zero").string()).code == 4);
}

TEST_CASE("simulation results are byte-identical for a fixed seed") {
    const fs::path cfg = write_file("small.conf", kSmall);
    const fs::path root = scratch() / "runs";
    const std::string env = "FDMIX_OUTPUT_ROOT=\"" + root.string() + "\"";
    REQUIRE(run("simulate " + cfg.string() + " --drops 1000 --seed 9", env).code == 0);
    fs::path first;
    for (const auto& e : fs::directory_iterator(root)) first = e.path();
    CHECK(first.filename().string().rfind("simulate-", 0) == 0);
    const fs::path second = scratch() / "again";
    REQUIRE(run("simulate " + cfg.string() + " --drops 1000 --seed 9 --threads 2 --out " + second.string()).code == 0);
    for (const char* f : {"samples.csv", "ccdf.csv", "summary.csv"}) {
        CAPTURE(f);
        CHECK(slurp(first / f) == slurp(second / f));
    }
    const std::string samples = slurp(first / "samples.csv");
    CHECK(samples.find("# seed=9") != std::string::npos);
    CHECK(samples.find("# grid=") != std::string::npos);
    CHECK(samples.find("# scenario_hash=") != std::string::npos);
    const auto m1 = nlohmann::json::parse(slurp(first / "manifest.json"));
    const auto m2 = nlohmann::json::parse(slurp(second / "manifest.json"));
    CHECK(m1["scenario_hash"] == m2["scenario_hash"]);
    CHECK(m1["seed"] == 9);
}

TEST_CASE("sweep over rho_F only has grid x metrics x engines rows") {
    const fs::path plan = write_file("plan.conf",
                                     "[sweep]\nrho_f_grid = 0:1:0.25\nsic_db = 110\npower_pairs = 24/23\n"
                                     "metrics = ase_dl,ase_ul,cov_ul\nthd_rows = false\n");
    const fs::path out = scratch() / "sweep";
    REQUIRE(run("sweep " + plan.string() + " --out " + out.string()).code == 0);
    CHECK(lines(slurp(out / "sweep.csv")) == 1 + 5 * 3 * 1);
}

TEST_CASE("benchmark prints one verdict per direction and nu") {
    const fs::path cfg = write_file("bench.conf", std::string(kSmall) + "simulation.drops = 1000\n");
    const fs::path out = scratch() / "bench";
    const Result r = run("benchmark " + cfg.string() + " --out " + out.string());
    REQUIRE(r.code == 0);
    const std::string summary = slurp(out / "summary.txt");
    CHECK(lines(summary) == 4);
    CHECK(summary.find("dl nu=1 ") != std::string::npos);
    CHECK(summary.find("ul nu=1.25 ") != std::string::npos);
    CHECK(r.out.find(summary) != std::string::npos);
    CHECK(lines(slurp(out / "benchmark.csv")) == 1 + 4 * 161);
}

}  // TEST_SUITE
