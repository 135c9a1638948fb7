#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "neuroevo/environment.hpp"
#include "neuroevo/model.hpp"
#include "neuroevo/spectrum.hpp"

namespace neuroevo {

enum class MutationKind : std::uint8_t { add_neuron, delete_neuron, add_connection, delete_connection };

struct EvolutionConfig {
  std::size_t population_size = 100;
  std::size_t max_novelty_cells = 20;
  int initial_mutations = 200;
  int step_mutations = 5;
  // add-neuron, delete-neuron, add-connection, delete-connection
  std::array<double, 4> mutation_probabilities{0.01, 0.01, 0.49, 0.49};
  double neuromodulation_probability = 0.1;
  double control_neuron_probability = 0.2;
  double excitation_threshold = 0.0;
  double perturbation_probability = 0.5;
  std::uint64_t master_seed = 1;

  // Option sets for new genes; ablations shrink these.
  std::vector<Activation> hidden_activations{Activation::identity, Activation::sigmoid,
                                             Activation::threshold, Activation::random};
  std::vector<int> adaptation_speeds{1, 7, 49};
  bool real_weights = true;  // false: weights drawn from {-1, 1} and never perturbed

  // Throws std::invalid_argument when inconsistent.
  void validate() const;
};

inline constexpr double kUnevaluated = std::numeric_limits<double>::quiet_NaN();
inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

struct Individual {
  Genome genome;
  double fitness = kUnevaluated;      // mean reward per step
  double accumulated = kUnevaluated;  // summed reward over the trial
  std::optional<Spectrum> spectrum;
  std::size_t cell = kUnassigned;
};

// SplitMix64 finalizer over a seed and a list of stream coordinates.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

MutationKind draw_mutation(const EvolutionConfig& cfg, Rng& rng);
float draw_weight(const EvolutionConfig& cfg, Rng& rng);

// Applies one mutation in place and returns which operator was drawn.
MutationKind mutate(Genome& genome, const EvolutionConfig& cfg, Rng& rng);
void apply_mutation(Genome& genome, MutationKind kind, const EvolutionConfig& cfg, Rng& rng);

// Each connection independently, with the configured probability, moves to
// w + u with u ~ U(-|w|, |w|), clamped to [-1, 1].
void perturb_weights(Genome& genome, const EvolutionConfig& cfg, Rng& rng);

Genome make_child(const Genome& parent, const EvolutionConfig& cfg, Rng& rng);

std::vector<Individual> init_population(const EvolutionConfig& cfg, int n_inputs, int n_outputs,
                                        Rng& rng);

struct TrialResult {
  double fitness = 0.0;      // mean reward per step
  double accumulated = 0.0;  // summed reward
  std::size_t steps = 0;
};

// One trial with a fresh phenotype.
TrialResult evaluate(const Genome& genome, Environment& environment, Rng& rng,
                     double excitation_threshold = 0.0);

// One survivor per cell (highest fitness, then fewer neurons, then lower
// index); empty cells take a copy of a uniformly drawn survivor. Returned in
// cell order.
std::vector<Individual> select(const std::vector<Individual>& population, const NoveltyMap& map,
                               Rng& rng);

using EnvironmentFactory = std::function<std::unique_ptr<Environment>()>;

struct EvolutionState {
  EvolutionConfig cfg;
  std::vector<Individual> population;
  NoveltyMap map;
  std::size_t generation = 0;  // generations completed
};

EvolutionState start_evolution(const EvolutionConfig& cfg, int n_inputs, int n_outputs);

struct GenerationReport {
  std::size_t generation = 0;  // 1-based index of the generation just completed
  std::vector<TrialResult> trials;  // per individual, population order
  std::size_t best_index = 0;       // highest fitness, ties to fewer neurons
  std::size_t occupied_cells = 0;   // cells with at least one member
  Genome best_genome;
};

// Evaluate, niche, select and reproduce. Evaluation fans out over `threads`
// workers; results do not depend on the thread count.
GenerationReport step_generation(EvolutionState& state, const EnvironmentFactory& make_environment,
                                 unsigned threads = 1);

}  // namespace neuroevo
