#include <doctest.h>

#include <cmath>
#include <sstream>

#include "neuroevo/checkpoint.hpp"
#include "neuroevo/evolution.hpp"

using namespace neuroevo;

namespace {

// Replays a fixed reward sequence regardless of the actions.
class ScriptedEnvironment final : public Environment {
 public:
  explicit ScriptedEnvironment(std::vector<double> rewards) : rewards_(std::move(rewards)) {}
  std::size_t observation_count() const override { return 1; }
  std::size_t action_count() const override { return 1; }
  std::size_t max_steps() const override { return rewards_.size(); }
  std::vector<Interval> observation_bounds() const override { return {{-1, 1}}; }
  std::vector<Interval> action_bounds() const override { return {{-1, 1}}; }
  std::vector<double> reset(Rng&) override {
    t_ = 0;
    return {0.0};
  }
  StepResult step(std::span<const double>) override {
    const double r = rewards_[t_++];
    return {{0.0}, r, t_ == rewards_.size()};
  }

 private:
  std::vector<double> rewards_;
  std::size_t t_ = 0;
};

// Rewards the output for tracking the input, which is always 1.
class TrackOne final : public Environment {
 public:
  std::size_t observation_count() const override { return 1; }
  std::size_t action_count() const override { return 1; }
  std::size_t max_steps() const override { return 5; }
  std::vector<Interval> observation_bounds() const override { return {{-1, 1}}; }
  std::vector<Interval> action_bounds() const override { return {{-1, 1}}; }
  std::vector<double> reset(Rng&) override {
    t_ = 0;
    return {1.0};
  }
  StepResult step(std::span<const double> a) override {
    ++t_;
    return {{1.0}, -std::min(10.0, std::abs(a[0] - 1.0)), t_ == 5};
  }

 private:
  int t_ = 0;
};

Individual member(Genome g, double fitness, std::size_t cell) {
  Individual i;
  i.genome = std::move(g);
  i.fitness = fitness;
  i.cell = cell;
  return i;
}

Genome with_hidden(int hidden) {
  Genome g = Genome::with_interface(1, 1);
  for (int h = 0; h < hidden; ++h) g.add_neuron(Role::hidden, Activation::identity, 1);
  return g;
}

}  // namespace

TEST_CASE("config validation") {
  EvolutionConfig cfg;
  cfg.validate();
  auto broken = cfg;
  broken.mutation_probabilities = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.adaptation_speeds = {1, 2};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.population_size = 20;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.hidden_activations.clear();
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken.control_neuron_probability = 1.0;
  broken.validate();
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(derive_seed(1, {}) != derive_seed(1, {0}));
}

TEST_CASE("evaluation averages reward per step") {
  Rng rng(1);
  const Genome g = Genome::with_interface(1, 1);
  ScriptedEnvironment four({-1, -1, -1, 0});
  const auto r = evaluate(g, four, rng);
  CHECK(r.fitness == -0.75);
  CHECK(r.accumulated == -3.0);
  CHECK(r.steps == 4);

  ScriptedEnvironment zero(std::vector<double>(10, 0.0));
  CHECK(evaluate(g, zero, rng).fitness == 0.0);
}

TEST_CASE("selection keeps the best per cell") {
  NoveltyMap map(3);
  map.present(std::vector<double>{0});
  Rng rng(1);

  SUBCASE("fitness first, then fewer neurons") {
    const std::vector<Individual> pop{member(with_hidden(2), 3, 0), member(with_hidden(0), 5, 0),
                                      member(with_hidden(5), 5, 0)};
    const auto parents = select(pop, map, rng);
    REQUIRE(parents.size() == 1);
    CHECK(parents[0].genome == pop[1].genome);
  }
  SUBCASE("one individual per cell all survive") {
    map.present(std::vector<double>{10});
    map.present(std::vector<double>{20});
    const std::vector<Individual> pop{member(with_hidden(1), -1, 2), member(with_hidden(2), -9, 0),
                                      member(with_hidden(3), -4, 1)};
    const auto parents = select(pop, map, rng);
    REQUIRE(parents.size() == 3);
    CHECK(parents[0].genome == pop[1].genome);
    CHECK(parents[1].genome == pop[2].genome);
    CHECK(parents[2].genome == pop[0].genome);
  }
  SUBCASE("an empty cell is filled by a copy of a survivor") {
    NoveltyMap twenty(20);
    for (int c = 0; c < 20; ++c) twenty.present(std::vector<double>{10.0 * c});
    std::vector<Individual> pop;
    for (std::size_t c = 0; c < 20; ++c) {
      if (c != 7) pop.push_back(member(with_hidden(static_cast<int>(c)), 1.0, c));
    }
    const auto parents = select(pop, twenty, rng);
    REQUIRE(parents.size() == 20);
    int copies = 0;
    for (std::size_t c = 0; c < 20; ++c) {
      if (c == 7) continue;
      CHECK(parents[c].genome.hidden_count() == static_cast<int>(c));
      copies += parents[c].genome == parents[7].genome ? 1 : 0;
    }
    CHECK(copies == 1);
  }
  SUBCASE("unevaluated individuals are rejected") {
    const std::vector<Individual> pop{member(with_hidden(0), kUnevaluated, 0)};
    CHECK_THROWS_AS(select(pop, map, rng), std::logic_error);
  }
}

TEST_CASE("mutation operators") {
  EvolutionConfig cfg;
  Rng rng(3);

  SUBCASE("delete-neuron without hidden neurons is a no-op") {
    Genome g = Genome::with_interface(2, 2);
    const Genome before = g;
    apply_mutation(g, MutationKind::delete_neuron, cfg, rng);
    CHECK(g == before);
  }
  SUBCASE("add-neuron adds one neuron and two connections") {
    Genome g = Genome::with_interface(2, 1);
    for (int i = 0; i < 200; ++i) {
      const auto n = g.neurons().size();
      const auto c = g.connections().size();
      apply_mutation(g, MutationKind::add_neuron, cfg, rng);
      CHECK(g.neurons().size() == n + 1);
      CHECK(g.connections().size() == c + 2);
      CHECK(g.neurons().back().role == Role::hidden);
    }
  }
  SUBCASE("delete-neuron removes every incident connection") {
    Genome g = Genome::with_interface(1, 1);
    const NeuronId h = g.add_neuron(Role::hidden, Activation::sigmoid, 1);
    g.add_connection({0, h, 0.1F, kNoModulator});
    g.add_connection({h, 1, 0.2F, kNoModulator});
    g.add_connection({h, h, 0.3F, kNoModulator});
    g.add_connection({0, h, 0.4F, kNoModulator});
    g.add_connection({h, 0, 0.5F, kNoModulator});
    g.add_connection({0, 1, 0.6F, kNoModulator});
    apply_mutation(g, MutationKind::delete_neuron, cfg, rng);
    CHECK(g.neurons().size() == 2);
    CHECK(g.connections().size() == 1);
  }
  SUBCASE("add-connection sometimes attaches a modulator") {
    cfg.neuromodulation_probability = 1.0;
    Genome g = Genome::with_interface(1, 1);
    apply_mutation(g, MutationKind::add_connection, cfg, rng);
    REQUIRE(g.connections().size() == 1);
    CHECK(g.connections()[0].modulated());
  }
  SUBCASE("no real weights draws only the extremes") {
    cfg.real_weights = false;
    for (int i = 0; i < 100; ++i) {
      const float w = draw_weight(cfg, rng);
      CHECK((w == 1.0F || w == -1.0F));
    }
  }
}

TEST_CASE("weight perturbation") {
  EvolutionConfig cfg;
  cfg.perturbation_probability = 1.0;
  Rng rng(5);
  Genome g = Genome::with_interface(1, 1);
  g.add_connection({0, 1, 0.0F, kNoModulator});
  g.add_connection({0, 1, 0.5F, kNoModulator});
  g.add_connection({0, 1, -0.5F, kNoModulator});
  for (int i = 0; i < 200; ++i) {
    Genome child = g;
    perturb_weights(child, cfg, rng);
    CHECK(child.connections()[0].weight == 0.0F);
    CHECK(child.connections()[1].weight >= 0.0F);
    CHECK(child.connections()[1].weight <= 1.0F);
    CHECK(child.connections()[2].weight <= 0.0F);
    CHECK(child.connections()[2].weight >= -1.0F);
  }

  SUBCASE("no step mutations and no perturbation copy the parent") {
    cfg.step_mutations = 0;
    cfg.perturbation_probability = 0.0;
    CHECK(make_child(g, cfg, rng) == g);
  }
}

TEST_CASE("initial population") {
  EvolutionConfig cfg;
  cfg.initial_mutations = 0;
  Rng rng(1);
  for (const auto& i : init_population(cfg, 2, 1, rng)) {
    CHECK(i.genome == Genome::with_interface(2, 1));
    CHECK(compute_spectrum(i.genome) == Spectrum{});
  }

  cfg.initial_mutations = 200;
  Rng a(9);
  Rng b(9);
  const auto pa = init_population(cfg, 2, 1, a);
  const auto pb = init_population(cfg, 2, 1, b);
  REQUIRE(pa.size() == 100);
  for (std::size_t k = 0; k < pa.size(); ++k) {
    CHECK(pa[k].genome == pb[k].genome);
    CHECK(pa[k].genome.input_count() == 2);
    CHECK(pa[k].genome.output_count() == 1);
  }
}

TEST_CASE("generation loop") {
  EvolutionConfig cfg;
  cfg.master_seed = 11;
  cfg.hidden_activations = {Activation::identity, Activation::sigmoid, Activation::threshold};
  auto state = start_evolution(cfg, 1, 1);
  const EnvironmentFactory factory = [] { return std::make_unique<TrackOne>(); };

  double previous_best = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < 15; ++g) {
    const auto report = step_generation(state, factory);
    CHECK(report.generation == static_cast<std::size_t>(g + 1));
    CHECK(report.trials.size() == 100);
    CHECK(state.population.size() == 100);
    CHECK(state.map.size() <= 20);
    CHECK(report.occupied_cells <= state.map.size());
    const double best = report.trials[report.best_index].fitness;
    // Without random neurons the task is deterministic and parents carry over.
    CHECK(best >= previous_best);
    previous_best = best;
  }
}

TEST_CASE("evaluation is independent of the thread count") {
  EvolutionConfig cfg;
  cfg.master_seed = 5;
  const EnvironmentFactory factory = [] { return std::make_unique<TrackOne>(); };
  auto one = start_evolution(cfg, 1, 1);
  auto four = start_evolution(cfg, 1, 1);
  for (int g = 0; g < 3; ++g) {
    const auto a = step_generation(one, factory, 1);
    const auto b = step_generation(four, factory, 4);
    for (std::size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].accumulated == b.trials[i].accumulated);
  }
}

TEST_CASE("checkpoint round trip") {
  EvolutionConfig cfg;
  cfg.master_seed = 77;
  cfg.adaptation_speeds = {1, 49};
  cfg.neuromodulation_probability = 1.0 / 3.0;
  const EnvironmentFactory factory = [] { return std::make_unique<TrackOne>(); };
  auto state = start_evolution(cfg, 1, 1);
  step_generation(state, factory);
  std::stringstream s;
  save_checkpoint(s, state);
  const auto restored = load_checkpoint(s);
  CHECK(restored.generation == state.generation);
  CHECK(restored.map == state.map);
  CHECK(restored.cfg.neuromodulation_probability == cfg.neuromodulation_probability);
  CHECK(restored.cfg.adaptation_speeds == cfg.adaptation_speeds);
  REQUIRE(restored.population.size() == state.population.size());
  for (std::size_t i = 0; i < state.population.size(); ++i) {
    CHECK(restored.population[i].genome == state.population[i].genome);
  }

  std::stringstream bad("not a checkpoint\n");
  CHECK_THROWS_AS(load_checkpoint(bad), std::runtime_error);
}
