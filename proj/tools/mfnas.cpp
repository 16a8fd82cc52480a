// mfnas: search, score and report on the ResNet kernel-choice space.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "mfnas/cost_model.hpp"
#include "mfnas/format.hpp"
#include "mfnas/harness.hpp"
#include "mfnas/io.hpp"
#include "mfnas/metrics.hpp"
#include "mfnas/report.hpp"

namespace {

using namespace mfnas;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

/// Options shared by run, compare and oracle. Flags override the config file.
struct RunFlags {
  std::string config_path;
  std::string strategy;
  int trials = 0;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  std::string evaluator;
  std::string table;
  std::string eval_cmd;
  double timeout_s = 0;
  std::int64_t max_params = 0;
  bool wall_time = false;

  CLI::Option* strategy_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* evaluator_opt = nullptr;
  CLI::Option* table_opt = nullptr;
  CLI::Option* eval_cmd_opt = nullptr;
  CLI::Option* timeout_opt = nullptr;
  CLI::Option* max_params_opt = nullptr;

  void add_to(CLI::App& app, bool with_strategy) {
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    if (with_strategy)
      strategy_opt = app.add_option("--strategy", strategy, "random | evolution | tpe | policy_rl")
                         ->check(CLI::IsMember({"random", "evolution", "tpe", "policy_rl"}));
    trials_opt = app.add_option("--trials", trials, "trial budget (default 50)")->check(CLI::PositiveNumber);
    seed_opt = app.add_option("--seed", seed, "rng seed (default 0)")->envname("MFNAS_SEED");
    alpha_opt = app.add_option("--alpha", alpha, "M-factor weight; 1 is balanced")->check(CLI::NonNegativeNumber);
    evaluator_opt = app.add_option("--evaluator", evaluator, "surrogate | table | external")
                        ->check(CLI::IsMember({"surrogate", "table", "external"}));
    table_opt = app.add_option("--table", table, "CSV accuracy table (arch_id,accuracy)");
    eval_cmd_opt = app.add_option("--eval-cmd", eval_cmd, "command line of an external evaluator");
    timeout_opt = app.add_option("--timeout", timeout_s, "external evaluator timeout in seconds")
                      ->check(CLI::PositiveNumber);
    max_params_opt = app.add_option("--max-params", max_params, "parameter budget; larger models score 0")
                         ->check(CLI::PositiveNumber);
    app.add_flag("--wall-time", wall_time, "record evaluator wall time in the trial log");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (strategy_opt && strategy_opt->count()) cfg.strategy = parse_strategy_kind(strategy);
    if (trials_opt->count()) cfg.trials = trials;
    if (seed_opt->count()) cfg.seed = seed;
    if (alpha_opt->count()) cfg.alpha = alpha;
    if (evaluator_opt->count()) cfg.evaluator.kind = parse_evaluator_kind(evaluator);
    if (table_opt->count()) cfg.evaluator.table_path = table;
    if (eval_cmd_opt->count()) cfg.evaluator.command = eval_cmd;
    if (timeout_opt->count()) cfg.evaluator.timeout_s = timeout_s;
    if (max_params_opt->count()) cfg.max_params = max_params;
    if (wall_time) cfg.record_wall_time = true;
    cfg.validate();
    return cfg;
  }
};

void print_record(const TrialRecord& rec) { std::cout << to_json(rec).dump() << '\n'; }

int cmd_run(const RunFlags& flags, const std::string& out_dir) {
  const RunConfig cfg = flags.resolve();
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  std::ofstream log(dir / "trials.jsonl");
  if (!log) throw Error("cannot write " + (dir / "trials.jsonl").string());
  try {
    const RunSummary summary = run_experiment(cfg, [&](const TrialRecord& rec) {
      log << to_json(rec).dump() << '\n';
      log.flush();
    });
    std::ofstream(dir / "summary.json") << to_json(summary).dump(2) << '\n';
    std::cerr << "wrote " << (dir / "trials.jsonl").string() << " and " << (dir / "summary.json").string() << '\n';
    print_record(summary.best);
  } catch (const TrialFailure& e) {
    std::cerr << "error: " << e.what() << " (" << e.partial_log().size() << " completed trials kept in "
              << (dir / "trials.jsonl").string() << ")\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_compare(const RunFlags& flags, const std::vector<std::string>& strategies, int seeds, int jobs,
                const std::string& out_dir) {
  const RunConfig base = flags.resolve();
  std::vector<RunConfig> cfgs;
  for (const auto& s : strategies) {
    RunConfig c = base;
    c.strategy = parse_strategy_kind(s);
    cfgs.push_back(c);
  }
  std::vector<std::uint64_t> seed_list;
  for (int i = 0; i < seeds; ++i) seed_list.push_back(base.seed + static_cast<std::uint64_t>(i));
  const auto table = compare_strategies(cfgs, seed_list, jobs);

  std::printf("%-10s %-10s %-10s %-10s %-10s %s\n", "strategy", "best_m", "median_m", "accuracy", "params",
              "genotype");
  bool any_error = false;
  for (const auto& row : table) {
    if (row.best) {
      std::printf("%-10s %-10.4f %-10.4f %-10.4f %-10lld %s\n", row.strategy.c_str(), row.best->m_value,
                  *row.median_best_m, row.best->accuracy.value_or(0.0), static_cast<long long>(row.best->params),
                  row.best->genotype.str().c_str());
    } else {
      std::printf("%-10s (all runs failed)\n", row.strategy.c_str());
    }
    for (const auto& cell : row.cells) {
      if (cell.error.empty()) continue;
      any_error = true;
      std::cerr << row.strategy << " seed " << cell.seed << ": " << cell.error << '\n';
    }
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "compare.json") << to_json(table).dump(2) << '\n';
  }
  return any_error ? kExitFailure : kExitOk;
}

int cmd_score(double accuracy, std::optional<std::int64_t> params, const std::string& genotype, double alpha,
              bool with_netscore, std::optional<std::int64_t> macs) {
  const SpaceSpec space = SpaceSpec::default_space();
  if (!genotype.empty()) {
    const ModelCost cost = model_cost(parse_genotype(genotype, space), space);
    params = cost.params;
    if (!macs) macs = cost.macs;
  }
  if (!params) throw InvalidConfig("score needs --params or --genotype");
  const std::int64_t pmin = p_min(space);
  const double s = s_prime(*params, pmin);
  std::cout << "p_min " << pmin << '\n';
  std::cout << "params " << *params << '\n';
  std::cout << "s_prime " << format_double(s) << '\n';
  std::cout << "m_alpha " << format_double(m_alpha(accuracy, s, alpha)) << '\n';
  if (with_netscore) {
    if (!macs) throw InvalidConfig("--netscore needs --macs or --genotype");
    std::cout << "netscore " << format_double(netscore(accuracy, *params, *macs)) << '\n';
  }
  return kExitOk;
}

int cmd_cost(const std::string& genotype) {
  const ModelCost cost = model_cost(parse_genotype(genotype));
  std::cout << "params " << cost.params << '\n' << "macs " << cost.macs << '\n';
  return kExitOk;
}

int cmd_enumerate(bool rows) {
  const SpaceSpec space = SpaceSpec::default_space();
  const auto range = enumerate(space);
  if (!rows) {
    std::cout << range.size() << '\n';
    return kExitOk;
  }
  std::cout << "arch_id,genotype,params\n";
  for (auto it = range.begin(); it != range.end(); ++it) {
    const Genotype g = *it;
    std::cout << it.id() << ',' << g.str() << ',' << count_params(g, space) << '\n';
  }
  return kExitOk;
}

int cmd_oracle(const RunFlags& flags) {
  const RunConfig cfg = flags.resolve();
  auto evaluator = make_evaluator(cfg.evaluator, cfg.space);
  const OracleResult best = oracle_best(cfg.space, *evaluator, cfg.alpha, cfg.max_params);
  ordered_json j;
  j["genotype"] = best.genotype.str();
  j["arch_id"] = best.arch_id;
  j["accuracy"] = best.accuracy;
  j["params"] = best.params;
  j["m_value"] = best.m_value;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

int cmd_report(const std::string& log_path, const std::string& out_dir, bool svg) {
  std::vector<TrialRecord> log;
  try {
    log = read_trial_log(log_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  const std::string dir = out_dir.empty() ? std::filesystem::path(log_path).parent_path().string() : out_dir;
  const auto files = write_report(log, dir.empty() ? "." : dir, svg);
  for (const auto& f : files.written) std::cerr << "wrote " << f << '\n';
  if (log.size() < 5) std::cerr << "top20.csv skipped: fewer than 5 trials\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"M-factor neural architecture search over a ResNet kernel-choice space"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string run_out = "out";
  auto* run = app.add_subcommand("run", "run one search and write trials.jsonl + summary.json");
  run_flags.add_to(*run, true);
  run->add_option("--out", run_out, "output directory");

  RunFlags cmp_flags;
  std::vector<std::string> cmp_strategies{"policy_rl", "evolution", "random", "tpe"};
  int cmp_seeds = 1;
  int cmp_jobs = 1;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "compare strategies over seeds");
  cmp_flags.add_to(*compare, false);
  compare->add_option("--strategy,--strategies", cmp_strategies, "strategies to compare")
      ->check(CLI::IsMember({"random", "evolution", "tpe", "policy_rl"}));
  compare->add_option("--seeds", cmp_seeds, "number of consecutive seeds starting at --seed")
      ->check(CLI::PositiveNumber);
  compare->add_option("--jobs", cmp_jobs, "concurrent runs")->check(CLI::PositiveNumber);
  compare->add_option("--out", cmp_out, "directory for compare.json");

  double score_acc = 0;
  std::int64_t score_params = 0;
  std::int64_t score_macs = 0;
  std::string score_genotype;
  double score_alpha = 1.0;
  bool score_netscore = false;
  auto* score = app.add_subcommand("score", "print S', M_alpha and optionally NetScore");
  score->add_option("--accuracy", score_acc, "accuracy in [0, 1]")->required();
  auto* score_params_opt = score->add_option("--params", score_params, "parameter count");
  score->add_option("--genotype", score_genotype, "genotype string; supplies params and MACs")
      ->excludes(score_params_opt);
  auto* score_macs_opt = score->add_option("--macs", score_macs, "MAC count for --netscore");
  score->add_option("--alpha", score_alpha, "M-factor weight")->check(CLI::NonNegativeNumber);
  score->add_flag("--netscore", score_netscore, "also print NetScore");

  std::string cost_genotype;
  auto* cost = app.add_subcommand("cost", "print params and MACs of a genotype");
  cost->add_option("genotype", cost_genotype, "genotype string, e.g. 000000000")->required();

  bool enum_rows = false;
  auto* enumerate_cmd = app.add_subcommand("enumerate", "print the space size");
  enumerate_cmd->add_flag("--rows", enum_rows, "stream arch_id,genotype,params rows instead");

  RunFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "brute-force optimum for a surrogate or table evaluator");
  oracle_flags.add_to(*oracle, false);

  std::string report_log;
  std::string report_out;
  bool report_svg = false;
  auto* report = app.add_subcommand("report", "CSV (and SVG) reports from a trial log");
  report->add_option("log", report_log, "trials.jsonl")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "output directory (default: next to the log)");
  report->add_flag("--svg", report_svg, "also write best_so_far.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, run_out);
    if (compare->parsed()) return cmd_compare(cmp_flags, cmp_strategies, cmp_seeds, cmp_jobs, cmp_out);
    if (score->parsed())
      return cmd_score(score_acc, score_params_opt->count() ? std::optional(score_params) : std::nullopt,
                       score_genotype, score_alpha, score_netscore,
                       score_macs_opt->count() ? std::optional(score_macs) : std::nullopt);
    if (cost->parsed()) return cmd_cost(cost_genotype);
    if (enumerate_cmd->parsed()) return cmd_enumerate(enum_rows);
    if (oracle->parsed()) return cmd_oracle(oracle_flags);
    if (report->parsed()) return cmd_report(report_log, report_out, report_svg);
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidGenotype& e) {
    std::cerr << "bad genotype: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidMetricInput& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidCost& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidAlpha& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}
