#include <algorithm>
#include <cmath>

#include "neuroevo/evolution.hpp"

namespace neuroevo {

namespace {

template <typename T>
const T& pick(const std::vector<T>& options, Rng& rng) {
  std::uniform_int_distribution<std::size_t> index(0, options.size() - 1);
  return options[index(rng)];
}

NeuronId pick_neuron(const Genome& genome, Rng& rng) {
  const auto neurons = genome.neurons();
  std::uniform_int_distribution<std::size_t> index(0, neurons.size() - 1);
  return neurons[index(rng)].id;
}

bool chance(double p, Rng& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

}  // namespace

void EvolutionConfig::validate() const {
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  double total = 0.0;
  for (double p : mutation_probabilities) {
    if (!probability(p)) throw std::invalid_argument("mutation probability outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mutation probabilities must sum to 1");
  if (!probability(neuromodulation_probability) || !probability(control_neuron_probability) ||
      !probability(perturbation_probability)) {
    throw std::invalid_argument("probability outside [0, 1]");
  }
  if (population_size <= max_novelty_cells || max_novelty_cells == 0) {
    throw std::invalid_argument("population must be larger than the novelty map");
  }
  if (initial_mutations < 0 || step_mutations < 0) throw std::invalid_argument("negative mutation count");
  if (adaptation_speeds.empty() || !std::ranges::all_of(adaptation_speeds, is_valid_speed)) {
    throw std::invalid_argument("adaptation speeds must be a non-empty subset of {1, 7, 49}");
  }
  if (std::ranges::find(hidden_activations, Activation::control) != hidden_activations.end()) {
    throw std::invalid_argument("control neurons are drawn through control_neuron_probability");
  }
  if (hidden_activations.empty() && control_neuron_probability < 1.0) {
    throw std::invalid_argument("no activation left to draw for new neurons");
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31U);
  };
  std::uint64_t h = mix(master);
  for (std::uint64_t p : path) h = mix(h ^ mix(p + 0x632BE59BD9B4E019ULL));
  return h;
}

MutationKind draw_mutation(const EvolutionConfig& cfg, Rng& rng) {
  const auto& p = cfg.mutation_probabilities;
  std::discrete_distribution<int> kind(p.begin(), p.end());
  return static_cast<MutationKind>(kind(rng));
}

float draw_weight(const EvolutionConfig& cfg, Rng& rng) {
  if (!cfg.real_weights) return std::bernoulli_distribution(0.5)(rng) ? 1.0F : -1.0F;
  return static_cast<float>(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
}

void apply_mutation(Genome& genome, MutationKind kind, const EvolutionConfig& cfg, Rng& rng) {
  switch (kind) {
    case MutationKind::add_neuron: {
      const bool control = chance(cfg.control_neuron_probability, rng);
      const Activation activation = control ? Activation::control : pick(cfg.hidden_activations, rng);
      const int speed = pick(cfg.adaptation_speeds, rng);
      const NeuronId source = pick_neuron(genome, rng);
      const NeuronId target = pick_neuron(genome, rng);
      const NeuronId id = genome.add_neuron(Role::hidden, activation, speed);
      const float w_in = draw_weight(cfg, rng);
      const float w_out = draw_weight(cfg, rng);
      genome.add_connection({source, id, w_in, kNoModulator});
      genome.add_connection({id, target, w_out, kNoModulator});
      break;
    }
    case MutationKind::delete_neuron: {
      std::vector<NeuronId> hidden;
      for (const auto& n : genome.neurons()) {
        if (!n.is_interface()) hidden.push_back(n.id);
      }
      if (hidden.empty()) return;
      genome.remove_neuron(pick(hidden, rng));
      break;
    }
    case MutationKind::add_connection: {
      ConnectionGene c;
      c.from = pick_neuron(genome, rng);
      c.to = pick_neuron(genome, rng);
      c.weight = draw_weight(cfg, rng);
      if (chance(cfg.neuromodulation_probability, rng)) c.modulator = pick_neuron(genome, rng);
      genome.add_connection(c);
      break;
    }
    case MutationKind::delete_connection: {
      const auto count = genome.connections().size();
      if (count == 0) return;
      genome.remove_connection(std::uniform_int_distribution<std::size_t>(0, count - 1)(rng));
      break;
    }
  }
}

MutationKind mutate(Genome& genome, const EvolutionConfig& cfg, Rng& rng) {
  const MutationKind kind = draw_mutation(cfg, rng);
  apply_mutation(genome, kind, cfg, rng);
  return kind;
}

void perturb_weights(Genome& genome, const EvolutionConfig& cfg, Rng& rng) {
  if (!cfg.real_weights) return;
  for (auto& c : genome.connections()) {
    if (!chance(cfg.perturbation_probability, rng)) continue;
    const double w = c.weight;
    if (w == 0.0) continue;
    const double u = std::uniform_real_distribution<double>(-std::abs(w), std::abs(w))(rng);
    c.weight = std::clamp(static_cast<float>(w + u), -1.0F, 1.0F);
  }
}

Genome make_child(const Genome& parent, const EvolutionConfig& cfg, Rng& rng) {
  Genome child = parent;
  for (int i = 0; i < cfg.step_mutations; ++i) mutate(child, cfg, rng);
  perturb_weights(child, cfg, rng);
  return child;
}

std::vector<Individual> init_population(const EvolutionConfig& cfg, int n_inputs, int n_outputs,
                                        Rng& rng) {
  cfg.validate();
  std::vector<Individual> population(cfg.population_size);
  for (auto& individual : population) {
    individual.genome = Genome::with_interface(n_inputs, n_outputs);
    for (int i = 0; i < cfg.initial_mutations; ++i) mutate(individual.genome, cfg, rng);
  }
  return population;
}

}  // namespace neuroevo
