#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "neuroevo/evolution.hpp"
#include "neuroevo/phenotype.hpp"

namespace neuroevo {

namespace {

// Stream tags under a generation seed.
constexpr std::uint64_t kEvaluationStream = 1;
constexpr std::uint64_t kReproductionStream = 2;
constexpr std::uint64_t kInitStream = 3;

double comparable(double fitness) {
  return std::isnan(fitness) ? -std::numeric_limits<double>::infinity() : fitness;
}

// True when a beats b: higher fitness, then fewer neurons. Equal otherwise.
bool outranks(const Individual& a, const Individual& b) {
  const double fa = comparable(a.fitness);
  const double fb = comparable(b.fitness);
  if (fa != fb) return fa > fb;
  return a.genome.neurons().size() < b.genome.neurons().size();
}

}  // namespace

TrialResult evaluate(const Genome& genome, Environment& environment, Rng& rng,
                     double excitation_threshold) {
  Phenotype network(genome, excitation_threshold);
  std::vector<double> observation = environment.reset(rng);
  std::vector<double> action(network.output_count());
  TrialResult result;
  for (;;) {
    network.step(observation, action, rng);
    auto outcome = environment.step(action);
    result.accumulated += outcome.reward;
    ++result.steps;
    if (outcome.done) break;
    observation = std::move(outcome.observation);
  }
  result.fitness = result.accumulated / static_cast<double>(result.steps);
  return result;
}

std::vector<Individual> select(const std::vector<Individual>& population, const NoveltyMap& map,
                               Rng& rng) {
  if (population.empty()) throw std::logic_error("selection over an empty population");
  const std::size_t cells = map.size();
  std::vector<std::size_t> winner(cells, kUnassigned);
  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto& individual = population[i];
    if (std::isnan(individual.fitness)) {
      throw std::logic_error("individual selected before evaluation");
    }
    if (individual.cell >= cells) throw std::logic_error("individual without a novelty map cell");
    auto& w = winner[individual.cell];
    if (w == kUnassigned || outranks(individual, population[w])) w = i;
  }

  std::vector<std::size_t> survivors;
  for (std::size_t w : winner) {
    if (w != kUnassigned) survivors.push_back(w);
  }
  std::vector<Individual> parents;
  parents.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t source = winner[c];
    if (source == kUnassigned) {
      source = survivors[std::uniform_int_distribution<std::size_t>(0, survivors.size() - 1)(rng)];
    }
    parents.push_back(population[source]);
  }
  return parents;
}

EvolutionState start_evolution(const EvolutionConfig& cfg, int n_inputs, int n_outputs) {
  Rng rng(derive_seed(cfg.master_seed, {0, kInitStream}));
  return {cfg, init_population(cfg, n_inputs, n_outputs, rng), NoveltyMap(cfg.max_novelty_cells), 0};
}

GenerationReport step_generation(EvolutionState& state, const EnvironmentFactory& make_environment,
                                 unsigned threads) {
  const auto& cfg = state.cfg;
  auto& population = state.population;
  GenerationReport report;
  report.generation = state.generation + 1;
  report.trials.resize(population.size());

  // Evaluation: each individual owns a random stream derived from its slot.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      auto environment = make_environment();
      for (std::size_t i = next++; i < population.size(); i = next++) {
        Rng rng(derive_seed(cfg.master_seed, {report.generation, kEvaluationStream, i}));
        report.trials[i] = evaluate(population[i].genome, *environment, rng, cfg.excitation_threshold);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = population.size();
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(population.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Spectrum niching, sequential in population order.
  std::vector<char> occupied(cfg.max_novelty_cells, 0);
  for (std::size_t i = 0; i < population.size(); ++i) {
    auto& individual = population[i];
    individual.fitness = report.trials[i].fitness;
    individual.accumulated = report.trials[i].accumulated;
    individual.spectrum = compute_spectrum(individual.genome);
    individual.cell = state.map.present(as_point(*individual.spectrum));
  }
  for (const auto& individual : population) occupied[individual.cell] = 1;
  report.occupied_cells = static_cast<std::size_t>(std::ranges::count(occupied, 1));

  for (std::size_t i = 1; i < population.size(); ++i) {
    if (outranks(population[i], population[report.best_index])) report.best_index = i;
  }
  report.best_genome = population[report.best_index].genome;

  // Selection and reproduction.
  Rng rng(derive_seed(cfg.master_seed, {report.generation, kReproductionStream}));
  auto parents = select(population, state.map, rng);
  std::vector<Individual> next_population;
  next_population.reserve(cfg.population_size);
  for (auto& parent : parents) next_population.emplace_back().genome = std::move(parent.genome);
  const std::size_t parent_count = next_population.size();
  std::uniform_int_distribution<std::size_t> choose(0, parent_count - 1);
  while (next_population.size() < cfg.population_size) {
    const auto& parent = next_population[choose(rng)].genome;
    Genome child = make_child(parent, cfg, rng);
    next_population.emplace_back().genome = std::move(child);
  }
  population = std::move(next_population);
  state.generation = report.generation;
  return report;
}

}  // namespace neuroevo
