#include "mfnas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "mfnas/cost_model.hpp"
#include "mfnas/metrics.hpp"

namespace mfnas {

void RunConfig::validate() const {
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  if (!(alpha >= 0)) throw InvalidConfig("alpha must be non-negative");
  if (max_params && *max_params <= 0) throw InvalidConfig("max_params must be positive");
  try {
    space.validate();
  } catch (const InvalidSpace& e) {
    throw InvalidConfig(e.what());
  }
  params.validate();
  if (evaluator.kind == EvaluatorKind::surrogate) evaluator.surrogate.validate();
  if (evaluator.kind == EvaluatorKind::table && evaluator.table_path.empty())
    throw InvalidConfig("table evaluator needs a table path");
  if (evaluator.kind == EvaluatorKind::external && evaluator.command.empty())
    throw InvalidConfig("external evaluator needs an evaluator command");
}

RunSummary run_experiment(const RunConfig& cfg, Evaluator& evaluator, const TrialSink& sink) {
  cfg.validate();
  RunSummary summary;
  summary.config = cfg;
  summary.p_min = p_min(cfg.space);

  auto strategy = make_strategy(cfg.strategy, cfg.seed, cfg.space, cfg.params);
  double best = 0.0;
  std::size_t best_index = 0;
  for (int t = 1; t <= cfg.trials; ++t) {
    TrialRecord rec;
    rec.trial = t;
    rec.genotype = strategy->suggest();
    rec.arch_id = encode(rec.genotype, cfg.space);
    const ModelCost cost = model_cost(rec.genotype, cfg.space);
    rec.params = cost.params;
    rec.macs = cost.macs;
    rec.s_prime = s_prime(rec.params, summary.p_min);

    if (cfg.max_params && rec.params > *cfg.max_params) {
      rec.m_value = 0.0;
    } else {
      Evaluation ev;
      try {
        ev = evaluator.evaluate(rec.genotype);
      } catch (const Error& e) {
        throw TrialFailure(t, e.what(), std::move(summary.trial_log));
      }
      rec.accuracy = ev.accuracy;
      rec.m_value = m_alpha(ev.accuracy, rec.s_prime, cfg.alpha);
      if (cfg.record_wall_time) rec.wall_time = ev.wall_time;
    }
    strategy->observe(rec.genotype, rec.m_value);

    if (t == 1 || rec.m_value > best) {
      best = rec.m_value;
      best_index = summary.trial_log.size();
    }
    rec.best_so_far = best;
    if (sink) sink(rec);
    summary.trial_log.push_back(std::move(rec));
  }
  summary.best = summary.trial_log[best_index];
  if (summary.trial_log.size() >= 5) summary.top_quintile = top_quintile_analysis(summary.trial_log);
  return summary;
}

RunSummary run_experiment(const RunConfig& cfg, const TrialSink& sink) {
  cfg.validate();
  auto evaluator = make_evaluator(cfg.evaluator, cfg.space);
  return run_experiment(cfg, *evaluator, sink);
}

std::vector<std::pair<int, double>> best_so_far_curve(std::span<const TrialRecord> log) {
  if (log.empty()) throw EmptyRun("empty trial log");
  std::vector<std::pair<int, double>> curve;
  curve.reserve(log.size());
  double best = log.front().m_value;
  for (const auto& rec : log) {
    best = std::max(best, rec.m_value);
    curve.emplace_back(rec.trial, best);
  }
  return curve;
}

namespace {

RangeStats range_stats(const std::vector<double>& v) {
  RangeStats s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

}  // namespace

TopQuintile top_quintile_analysis(std::span<const TrialRecord> log) {
  if (log.size() < 5) throw InsufficientData("top-quintile analysis needs at least 5 trials");
  std::vector<TrialRecord> sorted(log.begin(), log.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return a.m_value > b.m_value || (a.m_value == b.m_value && a.trial < b.trial);
  });
  const auto keep = (sorted.size() + 4) / 5;
  sorted.resize(keep);

  TopQuintile q;
  std::vector<double> acc;
  std::vector<double> params;
  for (const auto& rec : sorted) {
    if (rec.accuracy) acc.push_back(*rec.accuracy);
    params.push_back(static_cast<double>(rec.params));
  }
  if (!acc.empty()) q.accuracy = range_stats(acc);
  q.params = range_stats(params);
  q.records = std::move(sorted);
  return q;
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyRun("median of nothing");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<ComparisonRow> compare_strategies(const std::vector<RunConfig>& cfgs,
                                              const std::vector<std::uint64_t>& seeds, int jobs) {
  if (cfgs.empty()) throw InvalidConfig("compare needs at least one configuration");
  std::vector<ComparisonRow> rows(cfgs.size());
  struct Job {
    std::size_t row;
    std::size_t cell;
  };
  std::vector<Job> work;
  for (std::size_t r = 0; r < cfgs.size(); ++r) {
    rows[r].strategy = to_string(cfgs[r].strategy);
    const auto row_seeds = seeds.empty() ? std::vector<std::uint64_t>{cfgs[r].seed} : seeds;
    for (auto s : row_seeds) {
      rows[r].cells.push_back({s, std::nullopt, {}});
      work.push_back({r, rows[r].cells.size() - 1});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      auto& cell = rows[work[i].row].cells[work[i].cell];
      RunConfig cfg = cfgs[work[i].row];
      cfg.seed = cell.seed;
      try {
        cell.best = run_experiment(cfg).best;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, jobs));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, work.size()); ++t) pool.emplace_back(worker);
  }

  for (auto& row : rows) {
    std::vector<double> bests;
    for (const auto& cell : row.cells) {
      if (!cell.best) continue;
      bests.push_back(cell.best->m_value);
      if (!row.best || cell.best->m_value > row.best->m_value) row.best = cell.best;
    }
    if (!bests.empty()) row.median_best_m = median(bests);
  }
  return rows;
}

OracleResult oracle_best(const SpaceSpec& space, Evaluator& evaluator, double alpha,
                         std::optional<std::int64_t> max_params) {
  if (!evaluator.cheap()) throw RefusedExpensiveOracle("refusing to enumerate the space through an external evaluator");
  if (!(alpha >= 0)) throw InvalidAlpha("alpha must be non-negative");
  const std::int64_t pmin = p_min(space);
  OracleResult best;
  bool have = false;
  const auto range = enumerate(space);
  for (auto it = range.begin(); it != range.end(); ++it) {
    const Genotype g = *it;
    const std::int64_t params = count_params(g, space);
    double acc = 0.0;
    double m = 0.0;
    if (!max_params || params <= *max_params) {
      acc = evaluator.accuracy(g);
      m = m_alpha(acc, s_prime(params, pmin), alpha);
    }
    if (!have || m > best.m_value) {
      best = {g, it.id(), acc, params, m};
      have = true;
    }
  }
  return best;
}

}  // namespace mfnas
