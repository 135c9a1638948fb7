#include "neuroevo/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace neuroevo {

bool is_valid_speed(int speed) {
  return std::ranges::find(kAdaptationSpeeds, speed) != std::end(kAdaptationSpeeds);
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::hidden: return "hidden";
    case Role::input: return "input";
    case Role::output: return "output";
  }
  return "?";
}

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::identity: return "identity";
    case Activation::sigmoid: return "sigmoid";
    case Activation::threshold: return "threshold";
    case Activation::random: return "random";
    case Activation::control: return "control";
  }
  return "?";
}

Role parse_role(std::string_view text) {
  for (Role r : {Role::hidden, Role::input, Role::output}) {
    if (to_string(r) == text) return r;
  }
  throw GenomeError("unknown neuron role '" + std::string(text) + "'");
}

Activation parse_activation(std::string_view text) {
  for (int i = 0; i < kActivationCount; ++i) {
    auto a = static_cast<Activation>(i);
    if (to_string(a) == text) return a;
  }
  throw GenomeError("unknown activation '" + std::string(text) + "'");
}

Genome Genome::with_interface(int n_inputs, int n_outputs) {
  if (n_inputs < 1 || n_outputs < 1) {
    throw std::invalid_argument("a genome needs at least one input and one output");
  }
  Genome g;
  for (int i = 0; i < n_inputs; ++i) g.add_neuron(Role::input, Activation::identity, 1, i);
  for (int i = 0; i < n_outputs; ++i) g.add_neuron(Role::output, Activation::identity, 1, i);
  return g;
}

NeuronId Genome::add_neuron(Role role, Activation activation, int adaptation_speed,
                            int interface_index) {
  if (!is_valid_speed(adaptation_speed)) {
    throw GenomeError("adaptation speed must be one of 1, 7, 49");
  }
  if (role != Role::hidden && activation != Activation::identity) {
    throw GenomeError("interface neurons use the identity activation");
  }
  const NeuronId id = next_id_++;
  neurons_.push_back({id, role, activation, adaptation_speed,
                      role == Role::hidden ? 0 : interface_index});
  return id;
}

void Genome::add_connection(const ConnectionGene& connection) {
  if (!contains(connection.from) || !contains(connection.to)) {
    throw GenomeError("connection endpoint does not exist");
  }
  if (connection.modulated() && !contains(connection.modulator)) {
    throw GenomeError("modulator does not exist");
  }
  ConnectionGene c = connection;
  c.weight = std::clamp(c.weight, -1.0F, 1.0F);
  connections_.push_back(c);
}

std::size_t Genome::remove_neuron(NeuronId id) {
  auto it = std::ranges::find(neurons_, id, &NeuronGene::id);
  if (it == neurons_.end()) throw GenomeError("no such neuron");
  if (it->is_interface()) throw GenomeError("interface neurons cannot be removed");
  neurons_.erase(it);

  const std::size_t before = connections_.size();
  std::erase_if(connections_, [id](const ConnectionGene& c) { return c.from == id || c.to == id; });
  for (auto& c : connections_) {
    if (c.modulator == id) c.modulator = kNoModulator;
  }
  return before - connections_.size();
}

void Genome::remove_connection(std::size_t index) {
  if (index >= connections_.size()) throw GenomeError("connection index out of range");
  connections_.erase(connections_.begin() + static_cast<std::ptrdiff_t>(index));
}

const NeuronGene* Genome::find(NeuronId id) const {
  // Neurons are kept in ascending id order, so binary search applies.
  auto it = std::ranges::lower_bound(neurons_, id, {}, &NeuronGene::id);
  return it != neurons_.end() && it->id == id ? &*it : nullptr;
}

int Genome::input_count() const {
  return static_cast<int>(std::ranges::count(neurons_, Role::input, &NeuronGene::role));
}

int Genome::output_count() const {
  return static_cast<int>(std::ranges::count(neurons_, Role::output, &NeuronGene::role));
}

int Genome::hidden_count() const {
  return static_cast<int>(std::ranges::count(neurons_, Role::hidden, &NeuronGene::role));
}

void Genome::validate() const {
  std::unordered_set<NeuronId> ids;
  NeuronId previous = -1;
  std::vector<int> input_slots;
  std::vector<int> output_slots;
  for (const auto& n : neurons_) {
    if (n.id <= previous) throw GenomeError("neuron ids must be unique and ascending");
    previous = n.id;
    if (n.id >= next_id_) throw GenomeError("neuron id at or beyond next_id");
    ids.insert(n.id);
    if (!is_valid_speed(n.adaptation_speed)) throw GenomeError("invalid adaptation speed");
    if (n.is_interface() && n.activation != Activation::identity) {
      throw GenomeError("interface neuron with non-identity activation");
    }
    if (n.role == Role::input) input_slots.push_back(n.interface_index);
    if (n.role == Role::output) output_slots.push_back(n.interface_index);
  }
  for (auto* slots : {&input_slots, &output_slots}) {
    std::ranges::sort(*slots);
    for (std::size_t i = 0; i < slots->size(); ++i) {
      if ((*slots)[i] != static_cast<int>(i)) {
        throw GenomeError("interface indices are not a bijection");
      }
    }
  }
  for (const auto& c : connections_) {
    if (!ids.contains(c.from) || !ids.contains(c.to)) throw GenomeError("dangling connection");
    if (c.modulated() && !ids.contains(c.modulator)) throw GenomeError("dangling modulator");
    if (!(c.weight >= -1.0F && c.weight <= 1.0F)) throw GenomeError("weight outside [-1, 1]");
  }
}

}  // namespace neuroevo
