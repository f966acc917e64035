// Run configuration (flat key=value with [grid] [solver] [initial] [output]
// sections), norm-series CSV, run manifest and the selftest identity suite.

#pragma once

#include "wns/classical.hpp"
#include "wns/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wns {

/// Bad configuration content. key is "section.name" (or the section header).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, int line, const std::string& what);
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

/// Unreadable or unwritable files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV content; line is 1-based.
class CsvError : public std::runtime_error {
public:
    CsvError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

struct InitialSpec {
    std::string type = "vortex";  // zero | shear | vortex | random
    double amplitude = 1e-3;
    double center = 4.5;
    double width = 0.6;
    double shear_s = 0.5;
    std::uint64_t seed = 0;
    int modes = 6;
};

struct OutputSpec {
    std::string dir = "wns_out";
    long snapshot_every = 0;  // 0: final snapshot only
};

struct RunConfig {
    SolverConfig solver;
    InitialSpec initial;
    OutputSpec output;
    KappaMode kappa_mode = KappaMode::theorem;
    int oracle_M = 128;
    double oracle_R = 16.0;
    double oracle_tol = 1e-4;

    /// Grid and solver validation with config key names; ConfigError on failure.
    void validate() const;
};

RunConfig parse_config(std::istream& in);
/// IoError if the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);
/// Canonical text that parses back to the same configuration.
std::string echo_config(const RunConfig& cfg);

VelocityState initial_state(const RunConfig& cfg);
/// Pointwise form of the initial data for the cosine oracle; only the zero
/// and vortex data have one (ConfigError otherwise).
VectorFunction classical_initial(const RunConfig& cfg);

void write_norm_csv(std::ostream& out, const NormSeries& s);
void write_norm_csv(const std::filesystem::path& path, const NormSeries& s);
/// Header t,lp_norm,l2_norm,div_norm,lower_bound; a non-empty lower_bound
/// column is read back but not turned into a fit.
NormSeries read_norm_csv(std::istream& in);
NormSeries read_norm_csv(const std::filesystem::path& path);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string command;
    std::string config_echo;
    std::string version;
    double wall_seconds = 0.0;
    std::string started_at;  // UTC, ISO 8601
    int threads = 1;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> results;
};

/// Writes <dir>/manifest.json, replacing any previous one.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

std::string utc_timestamp();

/// Closed-form identity suite on the desk grid with n_r radial nodes.
std::vector<std::string> selftest_names();
std::vector<CheckResult> run_selftest(int n_r);

}  // namespace wns
