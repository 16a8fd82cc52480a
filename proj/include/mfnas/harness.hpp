#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfnas/errors.hpp"
#include "mfnas/evaluators.hpp"
#include "mfnas/search_space.hpp"
#include "mfnas/strategies.hpp"

namespace mfnas {

struct RunConfig {
  StrategyKind strategy = StrategyKind::random;
  int trials = 50;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  EvaluatorConfig evaluator;
  SpaceSpec space;
  /// Parameter budget; genotypes above it score 0 without being evaluated.
  std::optional<std::int64_t> max_params;
  StrategyParams params;
  /// Off by default so identical configs give byte-identical logs.
  bool record_wall_time = false;

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  Genotype genotype;
  ArchId arch_id = 0;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  /// Empty when the trial violated max_params and was not evaluated.
  std::optional<double> accuracy;
  double s_prime = 0.0;
  double m_value = 0.0;
  double best_so_far = 0.0;
  double wall_time = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct RangeStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct TopQuintile {
  std::vector<TrialRecord> records;
  /// Over the records that carry an accuracy; empty if none do.
  std::optional<RangeStats> accuracy;
  RangeStats params;
};

struct RunSummary {
  RunConfig config;
  std::int64_t p_min = 0;
  TrialRecord best;
  /// Present when the run has at least five trials.
  std::optional<TopQuintile> top_quintile;
  std::vector<TrialRecord> trial_log;
};

/// An evaluator failure during a run, tagged with the failing trial.
class TrialFailure : public Error {
 public:
  TrialFailure(int trial, const std::string& cause, std::vector<TrialRecord> partial)
      : Error("trial " + std::to_string(trial) + ": " + cause), trial_(trial), partial_(std::move(partial)) {}

  int trial() const { return trial_; }
  /// Records completed before the failure.
  const std::vector<TrialRecord>& partial_log() const { return partial_; }

 private:
  int trial_;
  std::vector<TrialRecord> partial_;
};

/// Receives each record as soon as its trial completes.
using TrialSink = std::function<void(const TrialRecord&)>;

/// suggest -> budget check -> evaluate -> S' and M_alpha -> observe, for cfg.trials trials.
RunSummary run_experiment(const RunConfig& cfg, Evaluator& evaluator, const TrialSink& sink = {});
/// As above with the evaluator built from cfg.evaluator.
RunSummary run_experiment(const RunConfig& cfg, const TrialSink& sink = {});

/// Running maximum of m_value as (trial, best) pairs; ties keep the earlier trial.
std::vector<std::pair<int, double>> best_so_far_curve(std::span<const TrialRecord> log);

/// Best ceil(n / 5) records by m_value (ties: earlier trial). Needs n >= 5.
TopQuintile top_quintile_analysis(std::span<const TrialRecord> log);

struct ComparisonCell {
  std::uint64_t seed = 0;
  std::optional<TrialRecord> best;
  std::string error;
};

struct ComparisonRow {
  std::string strategy;
  std::vector<ComparisonCell> cells;
  /// Best record over all successful seeds.
  std::optional<TrialRecord> best;
  std::optional<double> median_best_m;
};

/// Runs every (config, seed) cell; with no seeds each config uses its own seed.
/// A failing cell records its error and leaves the others untouched.
std::vector<ComparisonRow> compare_strategies(const std::vector<RunConfig>& cfgs,
                                              const std::vector<std::uint64_t>& seeds, int jobs = 1);

struct OracleResult {
  Genotype genotype;
  ArchId arch_id = 0;
  double accuracy = 0.0;
  std::int64_t params = 0;
  double m_value = 0.0;
};

/// Exact argmax of M_alpha by full enumeration (ties: lowest arch_id).
/// Genotypes above max_params score 0. Refuses external evaluators.
OracleResult oracle_best(const SpaceSpec& space, Evaluator& evaluator, double alpha,
                         std::optional<std::int64_t> max_params = std::nullopt);

double median(std::vector<double> values);

}  // namespace mfnas
