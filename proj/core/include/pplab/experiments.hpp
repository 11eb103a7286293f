#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pplab/random_model.hpp"

namespace pplab {

/// Invalid experiment configuration (unknown name, bad ranges, malformed
/// JSON).  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One experiment run's knobs.  Sentinel values (0 for sizes, -1 for k and
/// trials) mean "use the experiment's default"; apply_defaults() resolves
/// them.  Every experiment reads only the fields it cares about.
struct ExperimentConfig {
    std::string experiment;
    int n = 0;              // instance size: sites, lines, planes or elements
    int d = 2;              // attribute dimension
    int k = -1;             // level / proxy parameter
    double gamma = 0.0;     // tail threshold factor, default 2e
    int trials = -1;        // repetitions (0 is a valid explicit choice)
    long long samples = 0;  // Monte Carlo sample count
    double delta = 0.0;     // volume threshold, default 0.1
    double c1 = 2.0;        // proxy parameter constant in k = ceil(c1 ln^d n)
    int r = 0;              // sample size for the moments experiment
    int queries = 0;        // per-trial query count
    uint64_t seed = 0;
    std::string out_path;   // empty: CSV to stdout, no manifest side file
    int threads = 1;
    std::optional<DistributionSpec> dist;  // absent: uniform attributes

    /// Parse from a JSON object; unknown keys are rejected.  Throws
    /// ConfigError on malformed input.
    static ExperimentConfig from_json_text(const std::string& text);

    /// Canonical JSON of the effective configuration: every field, keys
    /// sorted, independent of the order fields appeared in the input.
    std::string canonical_json() const;

    void apply_defaults();
    void validate() const;  // throws ConfigError
};

/// Registry entry: experiment name, the claim it checks (stated directly),
/// and whether a failure is a hard failure (nonzero exit) or a soft flag.
struct ExperimentInfo {
    std::string name;
    std::string claim;
    bool hard = false;
};

const std::vector<ExperimentInfo>& registry_list();

/// Tabular result of one run: a fixed header and one numeric row per trial,
/// sorted by trial id (always the first column).  `hard_pass` tracks the
/// deterministic-bound assertions of hard experiments; `soft_pass` tracks
/// statistical / trend checks.  Notes carry one-line human summaries.
struct ExperimentResult {
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool hard = false;
    bool hard_pass = true;
    bool soft_pass = true;
    std::vector<std::string> notes;
};

/// Side-file metadata for a run.  The digest is FNV-1a of the canonical
/// config JSON, so it is stable under reordering of input fields.
struct RunManifest {
    std::string experiment;
    std::string config_digest;  // 16 hex digits
    uint64_t base_seed = 0;
    std::string version;
    std::string started_utc;    // ISO 8601, UTC
    std::string finished_utc;
    long long row_count = 0;

    std::string to_json_text() const;
};

struct RunOutput {
    ExperimentResult result;
    RunManifest manifest;
};

/// Runs one experiment.  Deterministic given (config, seed): every trial
/// draws from its own seed substream, so results are independent of the
/// worker count.  Throws ConfigError for invalid configs.
RunOutput run_experiment(const ExperimentConfig& config);

/// CSV emission: header row, then data rows; reals with 9 significant
/// digits.  Byte-identical across runs of the same config and seed.
void write_csv(const ExperimentResult& result, std::ostream& os);

/// FNV-1a 64-bit hash (exposed for digest tests).
uint64_t fnv1a64(std::string_view s);

/// Library version string embedded in manifests.
std::string_view version_string();

}  // namespace pplab
