#include <doctest.h>

#include <cmath>
#include <set>

#include "mfnas/cost_model.hpp"
#include "mfnas/errors.hpp"
#include "mfnas/evaluators.hpp"
#include "mfnas/metrics.hpp"
#include "mfnas/strategies.hpp"

using namespace mfnas;

namespace {

SpaceSpec slots_space(int blocks) {
  SpaceSpec s;
  s.stage_widths = {16};
  s.blocks_per_stage = {blocks};
  s.stage_strides = {1};
  return s;
}

// Balanced M-factor on the default surrogate, computed from scratch.
double default_reward(const Genotype& g) {
  static const std::int64_t pmin = p_min();
  return m_factor(surrogate_accuracy(g), s_prime(count_params(g), pmin));
}

std::vector<Genotype> drive(Strategy& s, int trials, double (*reward)(const Genotype&)) {
  std::vector<Genotype> out;
  for (int t = 0; t < trials; ++t) {
    out.push_back(s.suggest());
    s.observe(out.back(), reward(out.back()));
  }
  return out;
}

}  // namespace

TEST_CASE("suggest and observe must alternate") {
  RandomSearch s(1, SpaceSpec::default_space());
  CHECK_THROWS_AS(s.observe(Genotype{0, 0, 0, 0, 0, 0, 0, 0, 0}, 0.5), Error);
  const Genotype g = s.suggest();
  CHECK_THROWS_AS(s.suggest(), Error);
  auto other = g.slots();
  other[0] = (other[0] + 1) % 3;
  CHECK_THROWS_AS(s.observe(Genotype(other), 0.5), Error);
  CHECK_NOTHROW(s.observe(g, 0.5));
}

TEST_CASE("random search is reproducible and ignores observations") {
  RandomSearch a(7, SpaceSpec::default_space());
  RandomSearch b(7, SpaceSpec::default_space());
  for (int t = 0; t < 50; ++t) {
    const Genotype ga = a.suggest();
    const Genotype gb = b.suggest();
    REQUIRE(ga == gb);
    a.observe(ga, 0.0);
    b.observe(gb, static_cast<double>(t % 7) / 7.0);
  }
}

TEST_CASE("random search distinct count over 50 draws") {
  const double expected = 19683.0 * (1.0 - std::pow(1.0 - 1.0 / 19683.0, 50));
  CHECK(expected == doctest::Approx(49.94).epsilon(1e-3));
  double total = 0;
  constexpr int runs = 2000;
  for (int r = 0; r < runs; ++r) {
    RandomSearch s(static_cast<std::uint64_t>(r), SpaceSpec::default_space());
    std::set<Genotype> seen;
    for (int t = 0; t < 50; ++t) {
      const Genotype g = s.suggest();
      s.observe(g, 0.0);
      seen.insert(g);
    }
    total += static_cast<double>(seen.size());
  }
  // sd of the mean is about 0.006
  CHECK(std::abs(total / runs - expected) < 0.03);
}

TEST_CASE("evolution warmup is uniform random") {
  RegularizedEvolution evo(3, SpaceSpec::default_space());
  RandomSearch rnd(3, SpaceSpec::default_space());
  for (int t = 0; t < 10; ++t) {
    const Genotype g = evo.suggest();
    const Genotype r = rnd.suggest();
    CHECK(g == r);
    CHECK_FALSE(evo.last_parent().has_value());
    evo.observe(g, default_reward(g));
    rnd.observe(r, 0.0);
  }
  CHECK(evo.population().size() == 10);
}

TEST_CASE("evolution keeps an aging, bounded population") {
  RegularizedEvolution evo(11, SpaceSpec::default_space());
  std::vector<Genotype> children;
  for (int t = 1; t <= 50; ++t) {
    const Genotype g = evo.suggest();
    if (t > 10) {
      REQUIRE(evo.last_parent().has_value());
      CHECK(hamming_distance(g, evo.last_parent()->genotype) == 1);
    }
    evo.observe(g, default_reward(g));
    children.push_back(g);
    CHECK(evo.population().size() == std::min<std::size_t>(t, 10));
  }
  // the population is exactly the ten youngest children, oldest first
  for (std::size_t i = 0; i < 10; ++i) CHECK(evo.population()[i].genotype == children[40 + i]);
}

TEST_CASE("evolution tournament picks the best sampled member") {
  // sample_size == population_size: the tournament sees everyone
  RegularizedEvolution evo(5, slots_space(2), {4, 4});
  const double m[] = {0.2, 0.9, 0.9, 0.1};
  for (double v : m) evo.observe(evo.suggest(), v);
  evo.suggest();
  REQUIRE(evo.last_parent().has_value());
  CHECK(evo.last_parent()->birth == 1);  // earliest of the tied best
}

TEST_CASE("evolution fixes a dominant slot") {
  // Reward is dominated by slot 4 being 2; the rest only breaks ties slightly.
  auto reward = [](const Genotype& g) { return (g[4] == 2 ? 0.9 : 0.1) + 0.001 * g[0]; };
  int fixed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RegularizedEvolution evo(seed, SpaceSpec::default_space());
    for (int t = 0; t < 30; ++t) {
      const Genotype g = evo.suggest();
      evo.observe(g, reward(g));
    }
    int carriers = 0;
    for (const auto& m : evo.population()) carriers += m.genotype[4] == 2;
    fixed += carriers >= 7;
  }
    CHECK(fixed >= 18);
}

TEST_CASE("tpe startup matches random search") {
  TreeParzenEstimator tpe(9, SpaceSpec::default_space());
  RandomSearch rnd(9, SpaceSpec::default_space());
  for (int t = 0; t < 10; ++t) {
    const Genotype g = tpe.suggest();
    const Genotype r = rnd.suggest();
    CHECK(g == r);
    CHECK_FALSE(tpe.last_step().has_value());
    tpe.observe(g, default_reward(g));
    rnd.observe(r, 0.0);
  }
  tpe.suggest();
  CHECK(tpe.last_step().has_value());
}

TEST_CASE("tpe densities by hand") {
  // slot 0 carries the values below, every other slot is 0
  const int slot0[] = {0, 1, 0, 2, 2, 1, 0, 2};
  const double m[] = {0.9, 0.8, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::vector<TpeObservation> hist;
  for (int i = 0; i < 8; ++i) {
    std::vector<std::uint8_t> g(9, 0);
    g[0] = static_cast<std::uint8_t>(slot0[i]);
    hist.push_back({Genotype(g), m[i]});
  }
  const TpeDensities d = tpe_densities(hist, 0.25, SpaceSpec::default_space());
  CHECK(d.n_good == 2);
  CHECK(d.n_bad == 6);
  // good = {0, 1}: (1+1)/5, (1+1)/5, (0+1)/5
  CHECK(d.good(0, 0) == doctest::Approx(0.4));
  CHECK(d.good(0, 1) == doctest::Approx(0.4));
  CHECK(d.good(0, 2) == doctest::Approx(0.2));
  // bad = {0, 2, 2, 1, 0, 2}: (2+1)/9, (1+1)/9, (3+1)/9
  CHECK(d.bad(0, 0) == doctest::Approx(3.0 / 9));
  CHECK(d.bad(0, 1) == doctest::Approx(2.0 / 9));
  CHECK(d.bad(0, 2) == doctest::Approx(4.0 / 9));
  CHECK(d.good(5, 0) == doctest::Approx(3.0 / 5));
  CHECK(d.bad(5, 0) == doctest::Approx(7.0 / 9));

  const double rest = std::pow((3.0 / 5) / (7.0 / 9), 8);
  CHECK(tpe_score(d, Genotype{1, 0, 0, 0, 0, 0, 0, 0, 0}) == doctest::Approx(0.4 / (2.0 / 9) * rest));
  CHECK(tpe_score(d, Genotype{2, 0, 0, 0, 0, 0, 0, 0, 0}) == doctest::Approx(0.2 / (4.0 / 9) * rest));
  CHECK(tpe_score(d, Genotype{1, 0, 0, 0, 0, 0, 0, 0, 0}) > tpe_score(d, Genotype{0, 0, 0, 0, 0, 0, 0, 0, 0}));
}

TEST_CASE("tpe ties in m_value favour earlier observations") {
  std::vector<TpeObservation> hist{{Genotype{1}, 0.5}, {Genotype{2}, 0.5}, {Genotype{0}, 0.1}, {Genotype{0}, 0.1}};
  const TpeDensities d = tpe_densities(hist, 0.25, slots_space(1));
  REQUIRE(d.n_good == 1);
  CHECK(d.good(0, 1) == doctest::Approx(0.5));
  CHECK(d.good(0, 2) == doctest::Approx(0.25));
}

TEST_CASE("tpe step contract") {
  TreeParzenEstimator tpe(21, SpaceSpec::default_space());
  for (int t = 0; t < 60; ++t) {
    const Genotype g = tpe.suggest();
    if (const auto& step = tpe.last_step()) {
      const auto n = step->n_history;
      CHECK(step->densities.n_good == static_cast<std::size_t>(std::ceil(0.25 * static_cast<double>(n))));
      CHECK(step->candidates.size() == 24);
      CHECK(step->candidates[step->chosen] == g);
      CHECK((step->densities.good.array() > 0).all());
      CHECK((step->densities.bad.array() > 0).all());
      for (std::size_t c = 0; c < step->scores.size(); ++c) {
        CHECK(step->scores[c] == tpe_score(step->densities, step->candidates[c]));
        CHECK(step->scores[c] <= step->scores[step->chosen]);
      }
    }
    tpe.observe(g, default_reward(g));
  }
}

TEST_CASE("policy update by hand on one slot") {
  Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(1, 3);
  const Eigen::MatrixXd delta = reinforce_update(logits, Genotype{0}, 1.0, 0.1);
  CHECK(delta(0, 0) == doctest::Approx(0.0667).epsilon(1e-3));
  CHECK(std::abs(delta(0, 0) - 0.1 * 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(delta(0, 1) + 0.1 / 3.0) < 1e-12);
  CHECK(std::abs(delta(0, 2) + 0.1 / 3.0) < 1e-12);
  CHECK(reinforce_update(logits, Genotype{1}, 0.0, 0.1).isZero(0.0));
}

TEST_CASE("score function matches finite differences of log pi") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd logits(9, 3);
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits(i) = 4.0 * uniform_unit(rng) - 2.0;
    const Genotype g = sample_uniform(rng);
    const Eigen::MatrixXd analytic = score_function(logits, g);
    constexpr double h = 1e-6;
    for (Eigen::Index r = 0; r < 9; ++r)
      for (Eigen::Index c = 0; c < 3; ++c) {
        Eigen::MatrixXd up = logits, down = logits;
        up(r, c) += h;
        down(r, c) -= h;
        const double fd = (log_prob(up, g) - log_prob(down, g)) / (2 * h);
        CHECK(std::abs(fd - analytic(r, c)) <= 1e-4 * std::max(1e-3, std::abs(analytic(r, c))));
      }
  }
}

TEST_CASE("policy rows stay normalized") {
  PolicyGradient pg(8, SpaceSpec::default_space());
  CHECK(pg.probabilities().isConstant(1.0 / 3.0, 1e-15));
  for (int t = 0; t < 300; ++t) {
    const Genotype g = pg.suggest();
    pg.observe(g, default_reward(g));
    const Eigen::VectorXd sums = pg.probabilities().rowwise().sum();
    REQUIRE(((sums.array() - 1.0).abs() < 1e-12).all());
  }
}

TEST_CASE("policy first observation sets the baseline") {
  PolicyGradient pg(8, SpaceSpec::default_space());
  const Genotype g = pg.suggest();
  pg.observe(g, 0.7);
  CHECK(pg.logits().isZero(0.0));
  REQUIRE(pg.baseline().has_value());
  CHECK(*pg.baseline() == doctest::Approx(0.7));
  const Genotype g2 = pg.suggest();
  pg.observe(g2, 0.8);
  CHECK(*pg.baseline() == doctest::Approx(0.9 * 0.7 + 0.1 * 0.8));
  CHECK_FALSE(pg.logits().isZero(0.0));
}

TEST_CASE("policy concentrates on the best genotype") {
  const Genotype best = parse_genotype("012010000");
  auto prob_best = [&](const PolicyGradient& pg) {
    const Eigen::MatrixXd p = pg.probabilities();
    double mean = 0;
    for (std::size_t i = 0; i < 9; ++i) mean += p(static_cast<Eigen::Index>(i), best[i]);
    return mean / 9;
  };
  double at10 = 0, at200 = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PolicyGradient pg(seed, SpaceSpec::default_space());
    for (int t = 1; t <= 200; ++t) {
      const Genotype g = pg.suggest();
      pg.observe(g, default_reward(g));
      if (t == 10) at10 += prob_best(pg);
    }
    at200 += prob_best(pg);
  }
  MESSAGE("mean best-value probability: trial 10 " << at10 / 20 << ", trial 200 " << at200 / 20);
  CHECK(at200 > at10);
}

TEST_CASE("every strategy is a pure function of the seed") {
  for (auto kind : {StrategyKind::random, StrategyKind::evolution, StrategyKind::tpe, StrategyKind::policy_rl}) {
    auto a = make_strategy(kind, 77);
    auto b = make_strategy(kind, 77);
    CHECK(drive(*a, 50, default_reward) == drive(*b, 50, default_reward));
    auto c = make_strategy(kind, 78);
    CHECK(drive(*make_strategy(kind, 77), 50, default_reward) != drive(*c, 50, default_reward));
  }
}

TEST_CASE("strategy parameter validation") {
  StrategyParams p;
  p.evolution.sample_size = 11;
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
  p = {};
  p.tpe.gamma = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
  p = {};
  p.policy.baseline_decay = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
  CHECK(parse_strategy_kind("policy_rl") == StrategyKind::policy_rl);
  CHECK_THROWS_AS(parse_strategy_kind("darts"), InvalidConfig);
}
