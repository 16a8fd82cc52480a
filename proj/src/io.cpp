#include "mfnas/io.hpp"

#include <fstream>
#include <set>

#include "mfnas/errors.hpp"

namespace mfnas {

using nlohmann::json;

ordered_json to_json(const TrialRecord& rec) {
  ordered_json j;
  j["trial"] = rec.trial;
  j["arch_id"] = rec.arch_id;
  j["genotype"] = rec.genotype.str();
  j["params"] = rec.params;
  j["macs"] = rec.macs;
  j["accuracy"] = rec.accuracy ? ordered_json(*rec.accuracy) : ordered_json(nullptr);
  j["s_prime"] = rec.s_prime;
  j["m_value"] = rec.m_value;
  j["best_so_far"] = rec.best_so_far;
  j["wall_time"] = rec.wall_time;
  return j;
}

TrialRecord trial_record_from_json(const json& j, const SpaceSpec& space) {
  if (!j.is_object()) throw Error("trial record is not an object");
  try {
    TrialRecord rec;
    rec.trial = j.at("trial").get<int>();
    rec.arch_id = j.at("arch_id").get<ArchId>();
    rec.genotype = parse_genotype(j.at("genotype").get<std::string>(), space);
    if (encode(rec.genotype, space) != rec.arch_id) throw Error("arch_id does not match genotype");
    rec.params = j.at("params").get<std::int64_t>();
    rec.macs = j.at("macs").get<std::int64_t>();
    if (!j.at("accuracy").is_null()) rec.accuracy = j.at("accuracy").get<double>();
    rec.s_prime = j.at("s_prime").get<double>();
    rec.m_value = j.at("m_value").get<double>();
    rec.best_so_far = j.at("best_so_far").get<double>();
    rec.wall_time = j.at("wall_time").get<double>();
    return rec;
  } catch (const json::exception& e) {
    throw Error(std::string("bad trial record: ") + e.what());
  }
}

ordered_json to_json(const SpaceSpec& space) {
  ordered_json j;
  j["stem_in_channels"] = space.stem_in_channels;
  j["stem_out_channels"] = space.stem_out_channels;
  j["stage_widths"] = space.stage_widths;
  j["blocks_per_stage"] = space.blocks_per_stage;
  j["stage_strides"] = space.stage_strides;
  j["num_classes"] = space.num_classes;
  j["kernels"] = ordered_json::array();
  for (const auto& c : space.choices) j["kernels"].push_back(c.kernel);
  j["input_resolution"] = space.input_resolution;
  return j;
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["strategy"] = to_string(cfg.strategy);
  j["trials"] = cfg.trials;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  ordered_json ev;
  ev["kind"] = to_string(cfg.evaluator.kind);
  switch (cfg.evaluator.kind) {
    case EvaluatorKind::surrogate: {
      const auto& s = cfg.evaluator.surrogate;
      ev["surrogate"] = {{"target", s.target.str()},
                         {"base", s.base},
                         {"step", s.step},
                         {"noise_amplitude", s.noise_amplitude},
                         {"noise_seed", s.noise_seed}};
      break;
    }
    case EvaluatorKind::table: ev["table"] = cfg.evaluator.table_path; break;
    case EvaluatorKind::external:
      ev["command"] = cfg.evaluator.command;
      ev["timeout_s"] = cfg.evaluator.timeout_s;
      break;
  }
  j["evaluator"] = ev;
  j["space"] = to_json(cfg.space);
  j["max_params"] = cfg.max_params ? ordered_json(*cfg.max_params) : ordered_json(nullptr);
  j["evolution"] = {{"population_size", cfg.params.evolution.population_size},
                    {"sample_size", cfg.params.evolution.sample_size}};
  j["tpe"] = {{"gamma", cfg.params.tpe.gamma},
              {"n_startup", cfg.params.tpe.n_startup},
              {"n_candidates", cfg.params.tpe.n_candidates}};
  j["policy"] = {{"learning_rate", cfg.params.policy.learning_rate},
                 {"baseline_decay", cfg.params.policy.baseline_decay}};
  j["record_wall_time"] = cfg.record_wall_time;
  return j;
}

namespace {

ordered_json stats_json(const RangeStats& s) { return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}}; }

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidConfig(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw InvalidConfig("unknown config key '" + where + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ordered_json to_json(const TopQuintile& q) {
  ordered_json j;
  j["count"] = q.records.size();
  j["accuracy"] = q.accuracy ? stats_json(*q.accuracy) : ordered_json(nullptr);
  j["params"] = stats_json(q.params);
  j["records"] = ordered_json::array();
  for (const auto& r : q.records) j["records"].push_back(to_json(r));
  return j;
}

ordered_json to_json(const RunSummary& summary) {
  ordered_json j;
  j["config"] = to_json(summary.config);
  j["p_min"] = summary.p_min;
  j["trials"] = summary.trial_log.size();
  j["best"] = to_json(summary.best);
  j["top_quintile"] = summary.top_quintile ? to_json(*summary.top_quintile) : ordered_json(nullptr);
  return j;
}

ordered_json to_json(const std::vector<ComparisonRow>& table) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : table) {
    ordered_json r;
    r["strategy"] = row.strategy;
    r["best_m"] = row.best ? ordered_json(row.best->m_value) : ordered_json(nullptr);
    r["accuracy"] = row.best && row.best->accuracy ? ordered_json(*row.best->accuracy) : ordered_json(nullptr);
    r["params"] = row.best ? ordered_json(row.best->params) : ordered_json(nullptr);
    r["genotype"] = row.best ? ordered_json(row.best->genotype.str()) : ordered_json(nullptr);
    r["median_best_m"] = row.median_best_m ? ordered_json(*row.median_best_m) : ordered_json(nullptr);
    r["seeds"] = ordered_json::array();
    for (const auto& cell : row.cells) {
      ordered_json c;
      c["seed"] = cell.seed;
      if (cell.best) {
        c["best_m"] = cell.best->m_value;
        c["accuracy"] = cell.best->accuracy ? ordered_json(*cell.best->accuracy) : ordered_json(nullptr);
        c["params"] = cell.best->params;
        c["genotype"] = cell.best->genotype.str();
      } else {
        c["error"] = cell.error;
      }
      r["seeds"].push_back(c);
    }
    rows.push_back(r);
  }
  return rows;
}

void apply_config_json(const json& j, RunConfig& cfg) {
  try {
    require_keys(j,
                 {"strategy", "trials", "alpha", "seed", "evaluator", "space", "max_params", "evolution", "tpe",
                  "policy", "record_wall_time"},
                 "");
    if (j.contains("strategy")) cfg.strategy = parse_strategy_kind(j["strategy"].get<std::string>());
    read(j, "trials", cfg.trials);
    read(j, "alpha", cfg.alpha);
    read(j, "seed", cfg.seed);
    read(j, "record_wall_time", cfg.record_wall_time);
    if (j.contains("max_params")) {
      if (j["max_params"].is_null())
        cfg.max_params.reset();
      else
        cfg.max_params = j["max_params"].get<std::int64_t>();
    }
    if (j.contains("space")) {
      const auto& s = j["space"];
      require_keys(s,
                   {"stem_in_channels", "stem_out_channels", "stage_widths", "blocks_per_stage", "stage_strides",
                    "num_classes", "kernels", "input_resolution"},
                   "space.");
      read(s, "stem_in_channels", cfg.space.stem_in_channels);
      read(s, "stem_out_channels", cfg.space.stem_out_channels);
      read(s, "stage_widths", cfg.space.stage_widths);
      read(s, "blocks_per_stage", cfg.space.blocks_per_stage);
      read(s, "stage_strides", cfg.space.stage_strides);
      read(s, "num_classes", cfg.space.num_classes);
      read(s, "input_resolution", cfg.space.input_resolution);
      if (s.contains("kernels")) {
        cfg.space.choices.clear();
        for (int k : s["kernels"].get<std::vector<int>>())
          cfg.space.choices.push_back({static_cast<int>(cfg.space.choices.size()), k});
      }
      cfg.space.validate();
    }
    if (j.contains("evaluator")) {
      const auto& e = j["evaluator"];
      require_keys(e, {"kind", "surrogate", "table", "command", "timeout_s"}, "evaluator.");
      if (e.contains("kind")) cfg.evaluator.kind = parse_evaluator_kind(e["kind"].get<std::string>());
      read(e, "table", cfg.evaluator.table_path);
      read(e, "command", cfg.evaluator.command);
      read(e, "timeout_s", cfg.evaluator.timeout_s);
      if (e.contains("surrogate")) {
        const auto& s = e["surrogate"];
        require_keys(s, {"target", "base", "step", "noise_amplitude", "noise_seed"}, "evaluator.surrogate.");
        if (s.contains("target")) cfg.evaluator.surrogate.target = parse_genotype(s["target"].get<std::string>(), cfg.space);
        read(s, "base", cfg.evaluator.surrogate.base);
        read(s, "step", cfg.evaluator.surrogate.step);
        read(s, "noise_amplitude", cfg.evaluator.surrogate.noise_amplitude);
        read(s, "noise_seed", cfg.evaluator.surrogate.noise_seed);
      }
    }
    if (j.contains("evolution")) {
      const auto& e = j["evolution"];
      require_keys(e, {"population_size", "sample_size"}, "evolution.");
      read(e, "population_size", cfg.params.evolution.population_size);
      read(e, "sample_size", cfg.params.evolution.sample_size);
    }
    if (j.contains("tpe")) {
      const auto& t = j["tpe"];
      require_keys(t, {"gamma", "n_startup", "n_candidates"}, "tpe.");
      read(t, "gamma", cfg.params.tpe.gamma);
      read(t, "n_startup", cfg.params.tpe.n_startup);
      read(t, "n_candidates", cfg.params.tpe.n_candidates);
    }
    if (j.contains("policy")) {
      const auto& p = j["policy"];
      require_keys(p, {"learning_rate", "baseline_decay"}, "policy.");
      read(p, "learning_rate", cfg.params.policy.learning_rate);
      read(p, "baseline_decay", cfg.params.policy.baseline_decay);
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("bad config value: ") + e.what());
  } catch (const InvalidConfig&) {
    throw;
  } catch (const Error& e) {
    throw InvalidConfig(e.what());
  }
}

RunConfig load_run_config(const std::string& path, RunConfig defaults) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig(path + ": " + e.what());
  }
  apply_config_json(j, defaults);
  return defaults;
}

std::vector<TrialRecord> read_trial_log(const std::string& path, const SpaceSpec& space) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trial log '" + path + "'");
  std::vector<TrialRecord> log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      log.push_back(trial_record_from_json(json::parse(line), space));
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

}  // namespace mfnas
