#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "neuroevo/checkpoint.hpp"
#include "neuroevo/environment.hpp"
#include "neuroevo/evolution.hpp"
#include "neuroevo/experiment.hpp"
#include "neuroevo/phenotype.hpp"
#include "neuroevo/stats.hpp"
#include "oracles.hpp"

using namespace neuroevo;

namespace {

Genome random_genome(Rng& rng, int mutations) {
  EvolutionConfig cfg;
  Genome g = Genome::with_interface(2, 1);
  for (int i = 0; i < mutations; ++i) mutate(g, cfg, rng);
  return g;
}

std::vector<double> run_outputs(const Genome& g, std::uint64_t seed, int steps) {
  Phenotype p(g);
  Rng rng(seed);
  std::vector<double> trace;
  for (int t = 0; t < steps; ++t) {
    const std::vector<double> in{std::sin(t * 0.3), std::cos(t * 0.7)};
    for (double v : p.step(in, rng)) trace.push_back(v);
  }
  return trace;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("internal state converges geometrically") {
  for (int speed : kAdaptationSpeeds) {
    for (double start : {-3.0, 0.0, 2.5}) {
      const double a = 0.8;
      double ins = start;
      const double ratio = 1.0 - 1.0 / speed;
      for (int t = 1; t <= 200; ++t) {
        ins = update_internal_state(ins, a, speed);
        const double expected = std::abs(start - a) * std::pow(ratio, t);
        CHECK(std::abs(std::abs(ins - a) - expected) <= 1e-9 * expected + 1e-13);
      }
    }
  }
}

TEST_CASE("acyclic networks match the matrix oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> input(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    int depth = 0;
    const Genome g = oracle::random_acyclic_genome(rng, 8, depth);
    std::vector<double> in(static_cast<std::size_t>(g.input_count()));
    for (auto& v : in) v = input(rng);
    const auto expected = oracle::acyclic_outputs(g, in);
    Phenotype p(g);
    Rng unused(0);
    std::vector<double> out;
    for (int step = 0; step < std::max(depth, 1); ++step) out = p.step(in, unused);
    REQUIRE(out.size() == expected.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      CHECK(out[k] == doctest::Approx(expected[k]).epsilon(1e-12).scale(1e-12));
    }
  }
}

TEST_CASE("network steps replay bit-exactly") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Genome g = random_genome(rng, 150);
    const auto seed = rng();
    CHECK(run_outputs(g, seed, 60) == run_outputs(g, seed, 60));
  }
}

TEST_CASE("neurons without control inputs are always active") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Genome g = random_genome(rng, 120);
    std::set<NeuronId> gated;
    for (const auto& c : g.connections()) {
      if (g.find(c.from)->is_control()) gated.insert(c.to);
    }
    Phenotype p(g);
    for (int t = 0; t < 10; ++t) {
      const std::vector<double> in{0.5, -0.5};
      p.step(in, rng);
      for (const auto& n : g.neurons()) {
        if (!gated.contains(n.id)) CHECK(p.active(n.id));
      }
    }
  }
}

TEST_CASE("novelty map capacity, replacement and nearest cell") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> coord(0, 6);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  auto min_pairwise = [](std::span<const std::vector<double>> cells) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells.size(); ++i) best = std::min(best, uniqueness(cells, i));
    return best;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t capacity = 1 + static_cast<std::size_t>(trial % 20);
    NoveltyMap map(capacity);
    for (int k = 0; k < 60; ++k) {
      std::vector<double> p(6);
      for (auto& v : p) v = trial % 2 == 0 ? coord(rng) : real(rng);
      const std::vector<std::vector<double>> before(map.cells().begin(), map.cells().end());
      const double spread = min_pairwise(map.cells());
      const std::size_t cell = map.present(p);

      const std::vector<std::vector<double>> after(map.cells().begin(), map.cells().end());
      CHECK(after.size() <= capacity);
      CHECK(cell == oracle::nearest_cell(after, p));
      for (std::size_t i = 0; i < after.size(); ++i) {
        for (std::size_t j = i + 1; j < after.size(); ++j) CHECK(after[i] != after[j]);
      }
      if (before.size() == capacity && before != after) {
        CHECK(min_pairwise(after) >= spread);
        CHECK(std::ranges::count(after, p) == 1);
      }
    }
  }
}

TEST_CASE("spectrum ignores neuron and connection order") {
  Rng rng(8);
  const Activation kinds[] = {Activation::identity, Activation::sigmoid, Activation::threshold,
                              Activation::random, Activation::control};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<Activation, int>> hidden;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      hidden.emplace_back(kinds[rng() % 5], kAdaptationSpeeds[rng() % 3]);
    }
    auto build = [&](const std::vector<std::pair<Activation, int>>& order) {
      Genome g = Genome::with_interface(2, 2);
      for (const auto& [kind, speed] : order) g.add_neuron(Role::hidden, kind, speed);
      return g;
    };
    auto shuffled = hidden;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Genome a = build(hidden);
    Genome b = build(shuffled);
    CHECK(compute_spectrum(a) == compute_spectrum(b));

    // Connection edits never move the spectrum.
    EvolutionConfig cfg;
    const Spectrum s = compute_spectrum(b);
    for (int k = 0; k < 40; ++k) {
      apply_mutation(b, k % 2 == 0 ? MutationKind::add_connection : MutationKind::delete_connection, cfg, rng);
      CHECK(compute_spectrum(b) == s);
    }
    auto reversed = b.connections();
    std::reverse(reversed.begin(), reversed.end());
    CHECK(compute_spectrum(b) == s);
  }
}

TEST_CASE("genomes stay valid under 100000 mutations") {
  EvolutionConfig cfg;
  cfg.mutation_probabilities = {0.2, 0.15, 0.35, 0.3};
  cfg.neuromodulation_probability = 0.5;
  cfg.perturbation_probability = 0.5;
  Rng rng(12345);
  Genome g = Genome::with_interface(3, 2);
  for (int i = 0; i < 100000; ++i) {
    mutate(g, cfg, rng);
    if (i % 50 == 0) perturb_weights(g, cfg, rng);
    if (i % 1000 == 0) {
      CHECK_NOTHROW(g.validate());
      CHECK(g.input_count() == 3);
      CHECK(g.output_count() == 2);
      // Keep the genome small enough to stay fast.
      while (g.hidden_count() > 60) apply_mutation(g, MutationKind::delete_neuron, cfg, rng);
      while (g.connections().size() > 200) apply_mutation(g, MutationKind::delete_connection, cfg, rng);
    }
  }
  CHECK_NOTHROW(g.validate());
  CHECK(parse_genome(serialize_genome(g)) == g);
}

TEST_CASE("mutation kinds follow their probabilities") {
  EvolutionConfig cfg;
  Rng rng(77);
  const int draws = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(draw_mutation(cfg, rng))];
  for (std::size_t k = 0; k < 4; ++k) {
    const double p = cfg.mutation_probabilities[k];
    const double sigma = std::sqrt(draws * p * (1 - p));
    CHECK(std::abs(counts[k] - draws * p) <= 3 * sigma);
  }
}

TEST_CASE("multiplexer trials present every case once") {
  for (int abits : {1, 2, 3}) {
    Multiplexer env(abits);
    const std::size_t cases = std::size_t{1} << (abits + (1 << abits));
    Rng rng(static_cast<std::uint64_t>(abits));
    for (int trial = 0; trial < 3; ++trial) {
      auto obs = env.reset(rng);
      std::multiset<std::uint32_t> seen;
      const double zero[] = {0.0};
      for (;;) {
        std::uint32_t c = 0;
        for (double bit : obs) c = (c << 1U) | (bit > 0.5 ? 1U : 0U);
        seen.insert(c);
        const auto r = env.step(zero);
        if (r.done) break;
        obs = r.observation;
      }
      std::multiset<std::uint32_t> all;
      for (std::uint32_t c = 0; c < cases; ++c) all.insert(c);
      CHECK(seen == all);
    }
  }
}

TEST_CASE("double pole integrators agree") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> pos(-2.4, 2.4), vel(-2.0, 2.0), ang(-0.6, 0.6), force(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const DoublePoleState s{pos(rng), vel(rng), ang(rng), vel(rng), ang(rng), vel(rng)};
    const double f = force(rng);
    const auto mine = double_pole::rk4_step(s, f);
    const auto ref = oracle::runge_kutta({s[0], s[1], s[2], s[3], s[4], s[5]}, f, 0.01);
    const double theirs[] = {ref.x, ref.dx, ref.t1, ref.w1, ref.t2, ref.w2};
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(mine[k] - theirs[k]) <= 1e-9);
  }
}

TEST_CASE("mann whitney exact p matches the permutation oracle") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> size(1, 6), value(0, 5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(size(rng)));
    std::vector<double> b(static_cast<std::size_t>(size(rng)));
    // Small integer values force plenty of ties.
    for (auto& v : a) v = value(rng);
    for (auto& v : b) v = value(rng);
    const auto ref = oracle::permutation_p(a, b);
    const auto less = mann_whitney_u(a, b, Alternative::less);
    const auto greater = mann_whitney_u(a, b, Alternative::greater);
    CHECK(less.exact);
    CHECK(less.p == doctest::Approx(ref.less).epsilon(1e-12));
    CHECK(greater.p == doctest::Approx(ref.greater).epsilon(1e-12));
  }
}

TEST_CASE("environment invariants") {
  Rng rng(3);
  SUBCASE("mountain car stays in range") {
    std::uniform_real_distribution<double> action(-3.0, 3.0);
    MountainCarState s;
    double high_water = -1.2;
    for (int t = 0; t < 20000; ++t) {
      s = mountain_car_step(s, action(rng)).state;
      CHECK(s.pos >= MountainCar::kMinPos);
      CHECK(std::abs(s.v) <= MountainCar::kMaxSpeed);
      high_water = std::max(high_water, s.pos);
      if (s.pos >= MountainCar::kMaxPos) s = {};
    }
    // Unforced, the car swings about the valley floor at -pi/6 without
    // gaining amplitude.
    const double floor = -std::acos(-1.0) / 6.0;
    MountainCarState swing{-0.5, 0.0};
    const double amplitude = std::abs(swing.pos - floor);
    for (int t = 0; t < 5000; ++t) {
      swing = mountain_car_step(swing, 0.0).state;
      CHECK(std::abs(swing.pos - floor) <= amplitude * 1.01);
    }
    const auto still = mountain_car_step({floor, 0.0}, 0.0).state;
    CHECK(std::abs(still.v) <= 1e-15);
  }
  SUBCASE("function approximation rewards are never positive") {
    FunctionApprox env;
    std::uniform_real_distribution<double> action(-2000.0, 2000.0);
    env.reset(rng);
    std::size_t steps = 0;
    for (;;) {
      const double a[] = {action(rng)};
      const auto r = env.step(a);
      CHECK(r.reward <= 0.0);
      ++steps;
      if (r.done) break;
    }
    CHECK(steps == 201);
  }
  SUBCASE("double pole reward never exceeds the cap") {
    DoublePole env(true, 300);
    std::uniform_real_distribution<double> force(-10, 10);
    env.reset(rng);
    double total = 0;
    for (;;) {
      const double f[] = {force(rng) * 0.05};
      const auto r = env.step(f);
      total += r.reward;
      if (r.done) break;
    }
    CHECK(total <= 300.0);
  }
}

TEST_CASE("normalization round trips on declared ranges") {
  Rng rng(10);
  for (Task task : {Task::mountain_car, Task::double_pole, Task::nm_double_pole, Task::multiplexer}) {
    NormalizedEnvironment env(make_environment(task, false));
    const auto obs_bounds = env.inner().observation_bounds();
    const auto act_bounds = env.inner().action_bounds();
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> raw;
      for (const auto& b : obs_bounds) raw.push_back(std::uniform_real_distribution<double>(b.lo, b.hi)(rng));
      const auto scaled = env.normalize_observation(raw);
      for (double v : scaled) {
        CHECK(v >= -1.0 - 1e-12);
        CHECK(v <= 1.0 + 1e-12);
      }
      const auto back = env.denormalize_observation(scaled);
      for (std::size_t k = 0; k < raw.size(); ++k) CHECK(back[k] == doctest::Approx(raw[k]).epsilon(1e-12));

      std::vector<double> unit;
      for (std::size_t k = 0; k < act_bounds.size(); ++k) unit.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
      const auto action = env.denormalize_action(unit);
      for (std::size_t k = 0; k < action.size(); ++k) {
        CHECK(action[k] >= act_bounds[k].lo - 1e-12);
        CHECK(action[k] <= act_bounds[k].hi + 1e-12);
      }
      const auto unit_back = env.normalize_action(action);
      for (std::size_t k = 0; k < unit.size(); ++k) CHECK(unit_back[k] == doctest::Approx(unit[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ablations only touch their own option") {
  const EvolutionConfig base;
  for (Ablation a : kAllAblations) {
    const Ablation one[] = {a};
    const EvolutionConfig cut = apply_ablations(base, one);
    CHECK(cut.mutation_probabilities == base.mutation_probabilities);
    CHECK(cut.perturbation_probability == base.perturbation_probability);
    CHECK(cut.population_size == base.population_size);
    CHECK((cut.control_neuron_probability == base.control_neuron_probability) == (a != Ablation::no_control));
    CHECK((cut.neuromodulation_probability == base.neuromodulation_probability) ==
          (a != Ablation::no_neuromodulation));
    CHECK((cut.adaptation_speeds == base.adaptation_speeds) == (a != Ablation::no_slow));
    CHECK(cut.real_weights == (a != Ablation::no_real_weights));
    const bool type_cut = a == Ablation::no_identity || a == Ablation::no_sigmoid ||
                          a == Ablation::no_threshold || a == Ablation::no_random;
    CHECK(cut.hidden_activations.size() == base.hidden_activations.size() - (type_cut ? 1 : 0));

    // Seeded draws of the operator sequence are unaffected.
    Rng r1(1);
    Rng r2(1);
    for (int i = 0; i < 1000; ++i) CHECK(draw_mutation(base, r1) == draw_mutation(cut, r2));

    // The removed option never shows up in evolved genomes.
    Rng rng(static_cast<std::uint64_t>(a) + 1);
    Genome g = Genome::with_interface(2, 1);
    for (int i = 0; i < 3000; ++i) {
      mutate(g, cut, rng);
      if (i % 10 == 0) perturb_weights(g, cut, rng);
    }
    for (const auto& n : g.neurons()) {
      if (n.is_interface()) continue;
      if (a == Ablation::no_control) CHECK_FALSE(n.is_control());
      if (a == Ablation::no_slow) CHECK(n.adaptation_speed == 1);
      if (a == Ablation::no_identity) CHECK(n.activation != Activation::identity);
      if (a == Ablation::no_sigmoid) CHECK(n.activation != Activation::sigmoid);
      if (a == Ablation::no_threshold) CHECK(n.activation != Activation::threshold);
      if (a == Ablation::no_random) CHECK(n.activation != Activation::random);
    }
    for (const auto& c : g.connections()) {
      if (a == Ablation::no_neuromodulation) CHECK_FALSE(c.modulated());
      if (a == Ablation::no_real_weights) CHECK(std::abs(c.weight) == 1.0F);
    }
  }
}

TEST_CASE("full runs are bit-deterministic and resume from checkpoints") {
  EvolutionConfig cfg;
  cfg.master_seed = 2718;
  const EnvironmentFactory factory = [] { return make_environment(Task::mountain_car, true); };

  auto history = [&](EvolutionState state, int generations) {
    std::vector<double> fitness;
    for (int g = 0; g < generations; ++g) {
      for (const auto& t : step_generation(state, factory).trials) fitness.push_back(t.fitness);
    }
    return std::pair{fitness, state};
  };
  const auto [first, end_a] = history(start_evolution(cfg, 2, 1), 6);
  const auto [second, end_b] = history(start_evolution(cfg, 2, 1), 6);
  CHECK(first == second);

  auto state = start_evolution(cfg, 2, 1);
  const auto [head, middle] = history(state, 3);
  std::stringstream saved;
  save_checkpoint(saved, middle);
  const auto [tail, end_c] = history(load_checkpoint(saved), 3);
  std::vector<double> joined = head;
  joined.insert(joined.end(), tail.begin(), tail.end());
  CHECK(joined == first);
  for (std::size_t i = 0; i < end_a.population.size(); ++i) {
    CHECK(end_c.population[i].genome == end_a.population[i].genome);
  }
}

TEST_CASE("averaged curves are the per-generation mean of runs") {
  ExperimentConfig cfg;
  cfg.task = Task::mountain_car;
  cfg.normalize = true;
  cfg.trials = 500;
  cfg.runs = 3;
  cfg.seed = 4;
  const auto records = run_experiment(cfg);
  const auto avg = average_curves(records);
  REQUIRE(avg.size() == 5);
  for (std::size_t g = 0; g < avg.size(); ++g) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.rows[g].best_of_window;
    CHECK(avg[g].best_of_window == doctest::Approx(sum / 3.0).epsilon(1e-15));
    CHECK(avg[g].trials == 100 * (g + 1));
  }
}

}  // TEST_SUITE
