#include "mfnas/strategies.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "mfnas/errors.hpp"

namespace mfnas {

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::random: return "random";
    case StrategyKind::evolution: return "evolution";
    case StrategyKind::tpe: return "tpe";
    case StrategyKind::policy_rl: return "policy_rl";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(const std::string& text) {
  if (text == "random") return StrategyKind::random;
  if (text == "evolution") return StrategyKind::evolution;
  if (text == "tpe") return StrategyKind::tpe;
  if (text == "policy_rl") return StrategyKind::policy_rl;
  throw InvalidConfig("unknown strategy '" + text + "'");
}

void StrategyParams::validate() const {
  if (evolution.population_size < 1) throw InvalidConfig("population_size must be >= 1");
  if (evolution.sample_size < 1 || evolution.sample_size > evolution.population_size)
    throw InvalidConfig("sample_size must be in [1, population_size]");
  if (!(tpe.gamma > 0 && tpe.gamma < 1)) throw InvalidConfig("tpe gamma must be in (0, 1)");
  if (tpe.n_startup < 1) throw InvalidConfig("tpe n_startup must be >= 1");
  if (tpe.n_candidates < 1) throw InvalidConfig("tpe n_candidates must be >= 1");
  if (!(policy.learning_rate > 0)) throw InvalidConfig("policy learning_rate must be positive");
  if (!(policy.baseline_decay >= 0 && policy.baseline_decay < 1))
    throw InvalidConfig("policy baseline_decay must be in [0, 1)");
}

Strategy::Strategy(std::uint64_t seed, SpaceSpec space) : rng_(seed), space_(std::move(space)) {
  space_.validate();
}

Genotype Strategy::suggest() {
  if (pending_) throw Error("suggest called twice without observe");
  pending_ = do_suggest();
  return *pending_;
}

void Strategy::observe(const Genotype& g, double m_value) {
  if (!pending_) throw Error("observe called without a pending suggestion");
  if (*pending_ != g) throw Error("observed genotype differs from the suggestion");
  pending_.reset();
  do_observe(g, m_value);
}

// --- regularized evolution ---

RegularizedEvolution::RegularizedEvolution(std::uint64_t seed, SpaceSpec space, EvolutionParams params)
    : Strategy(seed, std::move(space)), params_(params) {
  StrategyParams{params_, {}, {}}.validate();
}

Genotype RegularizedEvolution::do_suggest() {
  const auto capacity = static_cast<std::size_t>(params_.population_size);
  if (population_.size() < capacity) {
    last_parent_.reset();
    return sample_uniform(rng_, space_);
  }
  // Partial Fisher-Yates: the first sample_size entries are a uniform draw without replacement.
  std::vector<std::size_t> idx(population_.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto k = static_cast<std::size_t>(params_.sample_size);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + uniform_below(rng_, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::size_t best = idx[0];
  for (std::size_t i = 1; i < k; ++i) {
    const auto& cand = population_[idx[i]];
    const auto& cur = population_[best];
    if (cand.m_value > cur.m_value || (cand.m_value == cur.m_value && idx[i] < best)) best = idx[i];
  }
  last_parent_ = population_[best];
  return mutate_one_slot(population_[best].genotype, rng_, space_);
}

void RegularizedEvolution::do_observe(const Genotype& g, double m_value) {
  population_.push_back({g, m_value, births_++});
  if (population_.size() > static_cast<std::size_t>(params_.population_size)) population_.pop_front();
}

// --- TPE ---

TpeDensities tpe_densities(const std::vector<TpeObservation>& history, double gamma, const SpaceSpec& space) {
  const auto n = history.size();
  const auto slots = static_cast<Eigen::Index>(space.slot_count());
  const auto k = static_cast<Eigen::Index>(space.choice_count());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return history[a].m_value > history[b].m_value; });

  TpeDensities d;
  d.n_good = std::min(n, static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n))));
  d.n_bad = n - d.n_good;
  Eigen::MatrixXd good = Eigen::MatrixXd::Zero(slots, k);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(slots, k);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& g = history[order[r]].genotype;
    auto& counts = r < d.n_good ? good : bad;
    for (Eigen::Index i = 0; i < slots; ++i) counts(i, g[static_cast<std::size_t>(i)]) += 1.0;
  }
  d.good = (good.array() + 1.0) / static_cast<double>(d.n_good + static_cast<std::size_t>(k));
  d.bad = (bad.array() + 1.0) / static_cast<double>(d.n_bad + static_cast<std::size_t>(k));
  return d;
}

double tpe_score(const TpeDensities& d, const Genotype& g) {
  double score = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    score *= d.good(r, g[i]) / d.bad(r, g[i]);
  }
  return score;
}

TreeParzenEstimator::TreeParzenEstimator(std::uint64_t seed, SpaceSpec space, TpeParams params)
    : Strategy(seed, std::move(space)), params_(params) {
  StrategyParams{{}, params_, {}}.validate();
}

Genotype TreeParzenEstimator::do_suggest() {
  if (history_.size() < static_cast<std::size_t>(params_.n_startup)) {
    last_step_.reset();
    return sample_uniform(rng_, space_);
  }
  Step step;
  step.n_history = history_.size();
  step.densities = tpe_densities(history_, params_.gamma, space_);
  for (int c = 0; c < params_.n_candidates; ++c) {
    step.candidates.push_back(sample_categorical(step.densities.good, rng_));
    step.scores.push_back(tpe_score(step.densities, step.candidates.back()));
  }
  for (std::size_t c = 1; c < step.candidates.size(); ++c) {
    const double s = step.scores[c];
    const double best = step.scores[step.chosen];
    if (s > best || (s == best && encode(step.candidates[c], space_) < encode(step.candidates[step.chosen], space_)))
      step.chosen = c;
  }
  assert(std::all_of(step.scores.begin(), step.scores.end(),
                     [&](double s) { return s <= step.scores[step.chosen]; }));
  Genotype chosen = step.candidates[step.chosen];
  last_step_ = std::move(step);
  return chosen;
}

void TreeParzenEstimator::do_observe(const Genotype& g, double m_value) { history_.push_back({g, m_value}); }

// --- policy gradient ---

Genotype sample_categorical(const Eigen::MatrixXd& probs, Rng& rng) {
  std::vector<std::uint8_t> slots(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const double u = uniform_unit(rng);
    double cdf = 0.0;
    Eigen::Index v = 0;
    for (; v + 1 < probs.cols(); ++v) {
      cdf += probs(r, v);
      if (u < cdf) break;
    }
    slots[static_cast<std::size_t>(r)] = static_cast<std::uint8_t>(v);
  }
  return Genotype(std::move(slots));
}

PolicyGradient::PolicyGradient(std::uint64_t seed, SpaceSpec space, PolicyParams params)
    : Strategy(seed, std::move(space)),
      params_(params),
      logits_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(space_.slot_count()),
                                    static_cast<Eigen::Index>(space_.choice_count()))) {
  StrategyParams{{}, {}, params_}.validate();
}

Genotype PolicyGradient::do_suggest() { return sample_categorical(row_softmax(logits_), rng_); }

void PolicyGradient::do_observe(const Genotype& g, double reward) {
  if (!baseline_) baseline_ = reward;
  const double advantage = reward - *baseline_;
  logits_ += reinforce_update(logits_, g, advantage, params_.learning_rate);
  baseline_ = params_.baseline_decay * *baseline_ + (1.0 - params_.baseline_decay) * reward;
}

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, std::uint64_t seed, const SpaceSpec& space,
                                        const StrategyParams& params) {
  params.validate();
  switch (kind) {
    case StrategyKind::random: return std::make_unique<RandomSearch>(seed, space);
    case StrategyKind::evolution: return std::make_unique<RegularizedEvolution>(seed, space, params.evolution);
    case StrategyKind::tpe: return std::make_unique<TreeParzenEstimator>(seed, space, params.tpe);
    case StrategyKind::policy_rl: return std::make_unique<PolicyGradient>(seed, space, params.policy);
  }
  throw InvalidConfig("unknown strategy kind");
}

}  // namespace mfnas
