#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "mfnas/harness.hpp"

namespace mfnas {

using ordered_json = nlohmann::ordered_json;

/// One trial-log line; keys in fixed order, accuracy null when not evaluated.
ordered_json to_json(const TrialRecord& rec);
TrialRecord trial_record_from_json(const nlohmann::json& j, const SpaceSpec& space = SpaceSpec::default_space());

ordered_json to_json(const SpaceSpec& space);
ordered_json to_json(const RunConfig& cfg);
ordered_json to_json(const TopQuintile& q);
ordered_json to_json(const RunSummary& summary);
ordered_json to_json(const std::vector<ComparisonRow>& table);

/// Overlays the keys present in j onto cfg. Unknown keys are InvalidConfig.
void apply_config_json(const nlohmann::json& j, RunConfig& cfg);
RunConfig load_run_config(const std::string& path, RunConfig defaults = {});

/// Parses a JSONL trial log; throws Error naming the offending line.
std::vector<TrialRecord> read_trial_log(const std::string& path, const SpaceSpec& space = SpaceSpec::default_space());

}  // namespace mfnas
