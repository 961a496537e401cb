#pragma once

// Flat key/value run configuration:
//
//   # comment
//   environment.lambda_b = 1e-3
//   [powers]
//   p_bs_dbm = 24        # same as powers.p_bs_dbm
//
// dB and dBm values are accepted here and converted to linear units.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fdmix/analytic.hpp"
#include "fdmix/experiments.hpp"
#include "fdmix/montecarlo.hpp"

namespace fdmix {

struct RunConfig {
    /// Every recognised key with its normalised value; the typed fields below
    /// are derived from it.
    std::map<std::string, std::string> entries;

    Scenario scenario;
    SimWindow window;
    SweepPlan sweep;  // base and window mirror the fields above
    BenchmarkOptions benchmark;
    double benchmark_budget = 0.03;
};

/// Reference values, rho_F = 0.5 with an even HD split.
RunConfig default_config();

/// Throws ConfigError naming the offending key; `source` labels messages.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

/// Override one key and rebuild the typed fields.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

/// "key = value" lines in key order. Parsing the dump gives back the same entries.
std::string canonical_dump(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical dump minus simulation.threads (results do
/// not depend on it), as 16 hex digits.
std::string scenario_hash(const RunConfig& cfg);
std::string fnv1a_hex(const std::string& text);

}  // namespace fdmix
