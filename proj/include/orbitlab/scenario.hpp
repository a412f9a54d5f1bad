#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbitlab/chain.hpp"
#include "orbitlab/gram_schmidt.hpp"
#include "orbitlab/operators.hpp"
#include "orbitlab/types.hpp"

namespace orbitlab::scenario {

// ordered_json keeps keys in insertion order, which is what makes report
// bodies byte-stable across runs.
using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "orbitlab";
inline constexpr const char* kToolVersion = "0.1.0";

struct SeedVectorSpec {
    enum class Kind { canonical, all_ones, random };
    Kind kind = Kind::canonical;
    std::size_t index = 1;      // canonical only, 1-based
    std::uint64_t seed = 0;     // random only
};

struct ProbeSpec {
    std::size_t canonical_max_index = 0;  // 0 resolves to depth at parse time
    bool include_seed_direction = true;
    std::size_t random_count = 8;
};

struct ScenarioConfig {
    std::string name;
    std::size_t dim = 0;
    std::size_t depth = 0;
    std::uint64_t seed = 0;
    ordered_json operator_desc;  // declarative operator description (see README)
    SeedVectorSpec seed_vector;
    ProbeSpec probes;
    gs::GSConfig gscfg;

    void validate() const;
    op::OperatorSpec build_operator() const;
    HVector build_seed() const;
    std::vector<std::string> probe_labels() const;
    std::vector<HVector> build_probes(const HVector& x) const;
    ordered_json to_json() const;
};

ScenarioConfig config_from_json(const ordered_json& j);
ScenarioConfig load_config(const std::filesystem::path& file);

struct RunReport {
    std::string name;
    ordered_json body;        // deterministic: identical (config, seed) => identical bytes
    double wall_time_ms = 0;  // excluded from the determinism contract
    int exit_code = 0;        // 0 ok; 1 usage, 2 numeric, 3 inconsistency when captured by run_batch
    std::string error;

    bool ok() const { return exit_code == 0; }
};

/// Executes the full pipeline for one scenario.  Throws on failure.
RunReport run_scenario(const ScenarioConfig& cfg);

/// Runs every scenario, capturing per-scenario failures in the returned
/// reports instead of throwing; the batch always completes.  Results are
/// identical to sequential execution for any parallelism.
std::vector<RunReport> run_batch(std::span<const ScenarioConfig> configs, unsigned parallelism);

/// Writes one CSV per probe (columns: n, value, bessel_bound) next to the
/// scenario name.  Empty probe set writes nothing and warns on stderr.
std::vector<std::filesystem::path> emit_plot_data(const ordered_json& report_body,
                                                  const std::filesystem::path& dir);

/// Full file form: {"report": body, "meta": {"wall_time_ms": ...}}.
ordered_json report_file_json(const RunReport& rep);

/// Atomic write (temp file + rename) of the report file form.
std::filesystem::path write_report_file(const RunReport& rep, const std::filesystem::path& dir);

/// Maps exception types onto the CLI exit-code contract:
/// rejected input / parse / filesystem -> 1, numeric failure -> 2,
/// internal inconsistency -> 3, anything else -> 2.
int exit_code_for(const std::exception& e);

}  // namespace orbitlab::scenario
