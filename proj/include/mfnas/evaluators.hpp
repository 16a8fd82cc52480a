#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <unordered_map>

#include "mfnas/search_space.hpp"

namespace mfnas {

enum class EvaluatorKind { surrogate, table, external };

std::string to_string(EvaluatorKind kind);
EvaluatorKind parse_evaluator_kind(const std::string& text);

struct Evaluation {
  Genotype genotype;
  double accuracy = 0.0;
  EvaluatorKind source = EvaluatorKind::surrogate;
  double wall_time = 0.0;
};

/// Source of accuracies for genotypes.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  virtual double accuracy(const Genotype& g) = 0;
  virtual EvaluatorKind kind() const = 0;

  /// Surrogates and tables can be enumerated over the whole space.
  bool cheap() const { return kind() != EvaluatorKind::external; }

  /// accuracy() plus timing.
  Evaluation evaluate(const Genotype& g);
};

/// Pattern-match surrogate: base + step * (#slots equal to target) + bounded hash noise.
struct SurrogateSpec {
  Genotype target{0, 1, 2, 0, 1, 2, 0, 1, 2};
  double base = 0.50;
  double step = 0.03;
  double noise_amplitude = 0.0;
  std::uint64_t noise_seed = 0;

  void validate() const;
  friend bool operator==(const SurrogateSpec&, const SurrogateSpec&) = default;
};

/// Deterministic value in [-1, 1) derived from (arch_id, seed).
double surrogate_noise(ArchId arch_id, std::uint64_t seed);

double surrogate_accuracy(const Genotype& g, const SurrogateSpec& spec = {},
                          const SpaceSpec& space = SpaceSpec::default_space());

class SurrogateEvaluator final : public Evaluator {
 public:
  explicit SurrogateEvaluator(SurrogateSpec spec = {}, SpaceSpec space = SpaceSpec::default_space());

  double accuracy(const Genotype& g) override { return surrogate_accuracy(g, spec_, space_); }
  EvaluatorKind kind() const override { return EvaluatorKind::surrogate; }
  const SurrogateSpec& spec() const { return spec_; }

 private:
  SurrogateSpec spec_;
  SpaceSpec space_;
};

using AccuracyTable = std::unordered_map<ArchId, double>;

/// CSV with header "arch_id,accuracy". Throws Error on malformed rows.
AccuracyTable load_table_csv(const std::string& path);
void write_table_csv(const std::string& path, const AccuracyTable& table);

/// Exact lookup; throws MissingEntry for absent arch_ids.
double table_accuracy(const Genotype& g, const AccuracyTable& table,
                      const SpaceSpec& space = SpaceSpec::default_space());

class TableEvaluator final : public Evaluator {
 public:
  TableEvaluator(AccuracyTable table, SpaceSpec space = SpaceSpec::default_space());

  double accuracy(const Genotype& g) override { return table_accuracy(g, table_, space_); }
  EvaluatorKind kind() const override { return EvaluatorKind::table; }

 private:
  AccuracyTable table_;
  SpaceSpec space_;
};

inline constexpr const char* kEvalProtocol = "mfnas-eval/1";

/// Child process speaking line-delimited JSON on its stdin/stdout.
/// One request in flight at a time; not safe for concurrent callers.
class ExternalEvaluator final : public Evaluator {
 public:
  /// Spawns `/bin/sh -c command` and waits for the handshake line.
  ExternalEvaluator(const std::string& command, std::chrono::milliseconds timeout,
                    SpaceSpec space = SpaceSpec::default_space());
  ~ExternalEvaluator() override;

  ExternalEvaluator(const ExternalEvaluator&) = delete;
  ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

  double accuracy(const Genotype& g) override;
  EvaluatorKind kind() const override { return EvaluatorKind::external; }

  /// Shell pid, also the process group of the evaluator.
  int pid() const { return pid_; }

 private:
  std::string read_line();
  [[noreturn]] void fail_died(const std::string& what);
  void shutdown();

  SpaceSpec space_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  long long next_id_ = 0;
};

struct EvaluatorConfig {
  EvaluatorKind kind = EvaluatorKind::surrogate;
  SurrogateSpec surrogate;
  std::string table_path;
  std::string command;
  double timeout_s = 3600.0;
};

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorConfig& cfg,
                                          const SpaceSpec& space = SpaceSpec::default_space());

}  // namespace mfnas
