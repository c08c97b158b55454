#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "geostop/bounds.hpp"
#include "geostop/hazard.hpp"
#include "geostop/law.hpp"
#include "geostop/process.hpp"
#include "geostop/schedule.hpp"

namespace geostop {

using Json = nlohmann::json;

std::string version_string();

std::shared_ptr<const ProcessModel> parse_model(const Json& j);
ReturnSchedule parse_schedule(const Json& j);

enum class ExperimentKind { hazard, poisson };

struct ParsedExperiment {
    ExperimentKind kind = ExperimentKind::hazard;
    HazardExperimentConfig hazard;
    PoissonExperimentConfig poisson;
    Json bounds_section;  // null when absent
    Json raw;
};

// Collects every violated precondition instead of stopping at the first one;
// empty result means the config parses and satisfies the hypotheses.
std::vector<std::string> validate_config(const Json& raw, ExperimentKind kind);

// Throws std::invalid_argument with the aggregated error list.
ParsedExperiment parse_experiment(const Json& raw, ExperimentKind kind);

Json law_to_json(const DiscreteLaw& law);
DiscreteLaw law_from_json(const Json& j);

// FNV-1a over the canonical (key-sorted) dump; insensitive to key order.
std::string config_hash(const Json& raw);

struct RunManifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string subcommand;
    std::string created_utc;
    double wall_time_sec = 0.0;
};

RunManifest make_manifest(const Json& raw_config, std::uint64_t seed,
                          const std::string& subcommand);

Json report_to_json(const ExperimentReport& rep, const RunManifest& manifest,
                    const std::string& family, const Json& bounds = Json());

// Evaluates whichever bound formulas apply to the experiment (stopped-count,
// fixed-horizon, or the word/overlap variant), with the uncertified constant
// taken from the config (default 1).
Json bounds_report(const ParsedExperiment& parsed);

// k,count,empirical_prob,target_prob rows; empirical_prob is count/trials so
// the column sums to 1 - censored_fraction.
std::string histogram_csv(const ExperimentReport& rep);

// write-temp-then-rename
void write_file_atomic(const std::string& path, const std::string& contents);

// strip volatile fields (timestamps, wall time) for byte comparisons
Json strip_volatile(Json report);

}  // namespace geostop
