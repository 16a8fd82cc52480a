#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfnas/policy_gradient.hpp"
#include "mfnas/random.hpp"
#include "mfnas/search_space.hpp"

namespace mfnas {

enum class StrategyKind { random, evolution, tpe, policy_rl };

std::string to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(const std::string& text);

struct EvolutionParams {
  int population_size = 10;
  int sample_size = 3;
};

struct TpeParams {
  double gamma = 0.25;
  int n_startup = 10;
  int n_candidates = 24;
};

struct PolicyParams {
  double learning_rate = 1.0;
  double baseline_decay = 0.9;
};

struct StrategyParams {
  EvolutionParams evolution;
  TpeParams tpe;
  PolicyParams policy;

  void validate() const;
};

/// Suggest/observe search loop. Calls must alternate: one observe per suggest,
/// reporting the suggested genotype. Behaviour is a pure function of the seed
/// and the observation history.
class Strategy {
 public:
  Strategy(std::uint64_t seed, SpaceSpec space);
  virtual ~Strategy() = default;

  Genotype suggest();
  void observe(const Genotype& g, double m_value);

  virtual StrategyKind kind() const = 0;
  const SpaceSpec& space() const { return space_; }

 protected:
  virtual Genotype do_suggest() = 0;
  virtual void do_observe(const Genotype& g, double m_value) = 0;

  Rng rng_;
  SpaceSpec space_;

 private:
  std::optional<Genotype> pending_;
};

/// Multi-trial random search: iid uniform samples, observations ignored.
class RandomSearch final : public Strategy {
 public:
  using Strategy::Strategy;
  StrategyKind kind() const override { return StrategyKind::random; }

 protected:
  Genotype do_suggest() override { return sample_uniform(rng_, space_); }
  void do_observe(const Genotype&, double) override {}
};

/// Aging evolution: tournament of sample_size over a FIFO population, mutate the winner.
class RegularizedEvolution final : public Strategy {
 public:
  struct Member {
    Genotype genotype;
    double m_value = 0.0;
    std::uint64_t birth = 0;
  };

  RegularizedEvolution(std::uint64_t seed, SpaceSpec space, EvolutionParams params = {});
  StrategyKind kind() const override { return StrategyKind::evolution; }

  /// Oldest first.
  const std::deque<Member>& population() const { return population_; }
  /// Tournament winner behind the most recent suggestion; empty during warmup.
  const std::optional<Member>& last_parent() const { return last_parent_; }
  const EvolutionParams& params() const { return params_; }

 protected:
  Genotype do_suggest() override;
  void do_observe(const Genotype& g, double m_value) override;

 private:
  EvolutionParams params_;
  std::deque<Member> population_;
  std::optional<Member> last_parent_;
  std::uint64_t births_ = 0;
};

/// Laplace-smoothed per-slot categoricals of the good and bad observation sets.
struct TpeDensities {
  Eigen::MatrixXd good;  // l_i(v), slots x choices
  Eigen::MatrixXd bad;   // g_i(v)
  std::size_t n_good = 0;
  std::size_t n_bad = 0;
};

struct TpeObservation {
  Genotype genotype;
  double m_value = 0.0;
};

/// Top ceil(gamma n) observations by m_value (ties: earlier) form the good set.
TpeDensities tpe_densities(const std::vector<TpeObservation>& history, double gamma, const SpaceSpec& space);

/// prod_i l_i(v_i) / g_i(v_i).
double tpe_score(const TpeDensities& d, const Genotype& g);

class TreeParzenEstimator final : public Strategy {
 public:
  struct Step {
    std::size_t n_history = 0;
    TpeDensities densities;
    std::vector<Genotype> candidates;
    std::vector<double> scores;
    std::size_t chosen = 0;
  };

  TreeParzenEstimator(std::uint64_t seed, SpaceSpec space, TpeParams params = {});
  StrategyKind kind() const override { return StrategyKind::tpe; }

  const std::vector<TpeObservation>& history() const { return history_; }
  /// Model-based step behind the most recent suggestion; empty during startup.
  const std::optional<Step>& last_step() const { return last_step_; }
  const TpeParams& params() const { return params_; }

 protected:
  Genotype do_suggest() override;
  void do_observe(const Genotype& g, double m_value) override;

 private:
  TpeParams params_;
  std::vector<TpeObservation> history_;
  std::optional<Step> last_step_;
};

/// REINFORCE over independent per-slot categoricals with a moving-average baseline.
class PolicyGradient final : public Strategy {
 public:
  PolicyGradient(std::uint64_t seed, SpaceSpec space, PolicyParams params = {});
  StrategyKind kind() const override { return StrategyKind::policy_rl; }

  const Eigen::MatrixXd& logits() const { return logits_; }
  Eigen::MatrixXd probabilities() const { return row_softmax(logits_); }
  std::optional<double> baseline() const { return baseline_; }

 protected:
  Genotype do_suggest() override;
  void do_observe(const Genotype& g, double reward) override;

 private:
  PolicyParams params_;
  Eigen::MatrixXd logits_;
  std::optional<double> baseline_;
};

/// Draws each slot from the matching row of a row-stochastic matrix.
Genotype sample_categorical(const Eigen::MatrixXd& probs, Rng& rng);

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, std::uint64_t seed,
                                        const SpaceSpec& space = SpaceSpec::default_space(),
                                        const StrategyParams& params = {});

}  // namespace mfnas
