#include "neuroevo/phenotype.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace neuroevo {

double activation_function(Activation type, double x, Rng& rng) {
  switch (type) {
    case Activation::identity:
      return x;
    case Activation::sigmoid:
      return std::tanh(kSigmoidSteepness * x);
    case Activation::threshold:
    case Activation::control:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::random:
      return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  }
  return x;
}

double update_internal_state(double ins_prev, double a, int adaptation_speed) {
  if (adaptation_speed == 1) return a;
  return ins_prev + (a - ins_prev) / adaptation_speed;
}

bool control_activation(std::span<const double> control_weights,
                        std::span<const double> control_signals, double threshold) {
  if (control_weights.size() != control_signals.size()) {
    throw std::invalid_argument("control weights and signals differ in length");
  }
  double stimulation = 0.0;
  for (std::size_t i = 0; i < control_weights.size(); ++i) {
    stimulation += control_weights[i] * control_signals[i];
  }
  return stimulation >= threshold;
}

Schedule build_schedule(const Genome& genome) {
  Schedule s;
  std::unordered_map<NeuronId, const NeuronGene*> by_id;
  for (const auto& n : genome.neurons()) by_id.emplace(n.id, &n);

  std::unordered_map<NeuronId, bool> fed_by_control;
  for (const auto& c : genome.connections()) {
    if (c.from != c.to && by_id.at(c.from)->is_control() && by_id.at(c.to)->is_control()) {
      fed_by_control[c.to] = true;
    }
  }

  for (const auto& n : genome.neurons()) {
    if (n.role == Role::input) {
      s.inputs.push_back(n.id);
    } else if (n.is_control()) {
      (fed_by_control.contains(n.id) ? s.dependent_controls : s.free_controls).push_back(n.id);
    } else {
      s.others.push_back(n.id);
    }
  }
  return s;
}

Phenotype::Phenotype(const Genome& genome, double excitation_threshold)
    : schedule_(build_schedule(genome)), threshold_(excitation_threshold) {
  const auto neurons = genome.neurons();
  const std::size_t n = neurons.size();
  ids_.reserve(n);
  for (const auto& g : neurons) {
    ids_.push_back(g.id);
    activation_.push_back(g.activation);
    speed_.push_back(g.adaptation_speed);
  }
  input_slots_.assign(static_cast<std::size_t>(genome.input_count()), -1);
  output_slots_.assign(static_cast<std::size_t>(genome.output_count()), -1);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& g = neurons[k];
    if (g.role == Role::input) input_slots_.at(static_cast<std::size_t>(g.interface_index)) = static_cast<int>(k);
    if (g.role == Role::output) output_slots_.at(static_cast<std::size_t>(g.interface_index)) = static_cast<int>(k);
  }

  auto append = [&](const std::vector<NeuronId>& phase) {
    for (NeuronId id : phase) order_.push_back(slot_of(id));
  };
  append(schedule_.inputs);
  append(schedule_.free_controls);
  append(schedule_.dependent_controls);
  cutoff_from_ = order_.size();
  append(schedule_.others);

  std::vector<std::vector<DataEdge>> data(n);
  std::vector<std::vector<ControlEdge>> control(n);
  for (const auto& c : genome.connections()) {
    const int from = slot_of(c.from);
    const int to = slot_of(c.to);
    if (activation_[static_cast<std::size_t>(from)] == Activation::control) {
      control[static_cast<std::size_t>(to)].push_back({from, c.weight});
    } else {
      data[static_cast<std::size_t>(to)].push_back(
          {from, c.modulated() ? slot_of(c.modulator) : -1, c.weight});
    }
  }
  data_begin_.push_back(0);
  control_begin_.push_back(0);
  for (std::size_t k = 0; k < n; ++k) {
    data_edges_.insert(data_edges_.end(), data[k].begin(), data[k].end());
    control_edges_.insert(control_edges_.end(), control[k].begin(), control[k].end());
    data_begin_.push_back(static_cast<int>(data_edges_.size()));
    control_begin_.push_back(static_cast<int>(control_edges_.size()));
  }

  ins_.assign(n, 0.0);
  y_.assign(n, 0.0);
  active_.assign(n, 0);
  external_.assign(n, 0.0);
}

int Phenotype::slot_of(NeuronId id) const {
  auto it = std::ranges::lower_bound(ids_, id);
  if (it == ids_.end() || *it != id) throw GenomeError("unknown neuron id " + std::to_string(id));
  return static_cast<int>(it - ids_.begin());
}

void Phenotype::reset() {
  std::ranges::fill(ins_, 0.0);
  std::ranges::fill(y_, 0.0);
  std::ranges::fill(active_, 0);
}

std::vector<double> Phenotype::step(std::span<const double> inputs, Rng& rng) {
  std::vector<double> out(output_slots_.size());
  step(inputs, out, rng);
  return out;
}

void Phenotype::step(std::span<const double> inputs, std::span<double> outputs, Rng& rng) {
  if (inputs.size() != input_slots_.size()) {
    throw std::invalid_argument("expected " + std::to_string(input_slots_.size()) +
                                " inputs, got " + std::to_string(inputs.size()));
  }
  if (outputs.size() != output_slots_.size()) {
    throw std::invalid_argument("output buffer has the wrong length");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    external_[static_cast<std::size_t>(input_slots_[i])] = inputs[i];
  }

  for (std::size_t pos = 0; pos < order_.size(); ++pos) {
    const auto k = static_cast<std::size_t>(order_[pos]);

    double stimulation = 0.0;
    for (int e = control_begin_[k]; e < control_begin_[k + 1]; ++e) {
      const auto& edge = control_edges_[static_cast<std::size_t>(e)];
      stimulation += edge.weight * y_[static_cast<std::size_t>(edge.source)];
    }
    if (stimulation < threshold_) {
      active_[k] = 0;
      y_[k] = 0.0;
      continue;
    }
    active_[k] = 1;

    double sum = external_[k];
    for (int e = data_begin_[k]; e < data_begin_[k + 1]; ++e) {
      const auto& edge = data_edges_[static_cast<std::size_t>(e)];
      const double w = edge.modulator < 0 ? edge.weight : y_[static_cast<std::size_t>(edge.modulator)];
      sum += w * y_[static_cast<std::size_t>(edge.source)];
    }
    const double a = activation_function(activation_[k], sum, rng);
    ins_[k] = update_internal_state(ins_[k], a, speed_[k]);
    double y = ins_[k];
    if (pos >= cutoff_from_ && std::abs(y) <= kActivityCutoff) y = 0.0;
    y_[k] = y;
  }

  for (std::size_t i = 0; i < output_slots_.size(); ++i) {
    outputs[i] = y_[static_cast<std::size_t>(output_slots_[i])];
  }
  for (int slot : input_slots_) {
    const auto k = static_cast<std::size_t>(slot);
    external_[k] = 0.0;
    y_[k] = 0.0;
    ins_[k] = 0.0;
  }
  for (int slot : output_slots_) {
    const auto k = static_cast<std::size_t>(slot);
    y_[k] = 0.0;
    ins_[k] = 0.0;
  }
}

double Phenotype::output(NeuronId id) const { return y_[static_cast<std::size_t>(slot_of(id))]; }

double Phenotype::internal_state(NeuronId id) const {
  return ins_[static_cast<std::size_t>(slot_of(id))];
}

bool Phenotype::active(NeuronId id) const { return active_[static_cast<std::size_t>(slot_of(id))] != 0; }

double effective_weight(const ConnectionGene& connection, const Phenotype& phenotype) {
  if (!connection.modulated()) return connection.weight;
  return phenotype.output(connection.modulator);
}

}  // namespace neuroevo
