#pragma once

#include <span>
#include <vector>

#include "neuroevo/model.hpp"

namespace neuroevo {

// Execution order of one network step.
struct Schedule {
  std::vector<NeuronId> inputs;
  std::vector<NeuronId> free_controls;       // no control input from another control neuron
  std::vector<NeuronId> dependent_controls;  // remaining control neurons
  std::vector<NeuronId> others;              // hidden non-control neurons and outputs

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Every phase is ordered by ascending id, so a connection from a later neuron
// delivers the value it emitted on the previous step.
Schedule build_schedule(const Genome& genome);

// Control neurons are evaluated with the threshold function.
double activation_function(Activation type, double x, Rng& rng);

double update_internal_state(double ins_prev, double a, int adaptation_speed);

// Stimulation sum_i w_i cs_i compared against the excitation threshold.
bool control_activation(std::span<const double> control_weights,
                        std::span<const double> control_signals, double threshold);

// Executable network compiled from a genome. Internal state persists across
// steps until reset().
class Phenotype {
 public:
  explicit Phenotype(const Genome& genome, double excitation_threshold = 0.0);

  std::vector<double> step(std::span<const double> inputs, Rng& rng);
  void step(std::span<const double> inputs, std::span<double> outputs, Rng& rng);
  void reset();

  std::size_t input_count() const { return input_slots_.size(); }
  std::size_t output_count() const { return output_slots_.size(); }

  // Emitted value, internal state and activation flag of the last step.
  double output(NeuronId id) const;
  double internal_state(NeuronId id) const;
  bool active(NeuronId id) const;

  const Schedule& schedule() const { return schedule_; }

 private:
  struct DataEdge {
    int source;
    int modulator;  // -1 when the static weight applies
    double weight;
  };
  struct ControlEdge {
    int source;
    double weight;
  };

  int slot_of(NeuronId id) const;

  Schedule schedule_;
  double threshold_;
  std::vector<NeuronId> ids_;
  std::vector<Activation> activation_;
  std::vector<int> speed_;
  std::vector<int> order_;
  std::size_t cutoff_from_ = 0;  // position in order_ where the activity cutoff starts
  std::vector<int> data_begin_;
  std::vector<DataEdge> data_edges_;
  std::vector<int> control_begin_;
  std::vector<ControlEdge> control_edges_;
  std::vector<int> input_slots_;   // by interface index
  std::vector<int> output_slots_;  // by interface index

  std::vector<double> ins_;
  std::vector<double> y_;
  std::vector<char> active_;
  std::vector<double> external_;
};

// Static weight, or the modulator's current output when modulated.
double effective_weight(const ConnectionGene& connection, const Phenotype& phenotype);

}  // namespace neuroevo
