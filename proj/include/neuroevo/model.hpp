#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace neuroevo {

using Rng = std::mt19937_64;
using NeuronId = std::int32_t;

// Sentinel for an unmodulated connection.
inline constexpr NeuronId kNoModulator = -1;

enum class Role : std::uint8_t { hidden, input, output };

enum class Activation : std::uint8_t { identity, sigmoid, threshold, random, control };

inline constexpr int kActivationCount = 5;
inline constexpr int kAdaptationSpeeds[] = {1, 7, 49};

// Output magnitude at or below which a phase-4 neuron emits nothing.
inline constexpr double kActivityCutoff = 0.001;

// Steepness of the sigmoid activation, tanh(k x).
inline constexpr double kSigmoidSteepness = 4.0;

class GenomeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NeuronGene {
  NeuronId id = 0;
  Role role = Role::hidden;
  Activation activation = Activation::identity;
  int adaptation_speed = 1;
  int interface_index = 0;

  bool is_control() const { return activation == Activation::control; }
  bool is_interface() const { return role != Role::hidden; }
  friend bool operator==(const NeuronGene&, const NeuronGene&) = default;
};

// Weights are single precision so that the nine-digit text form round-trips.
struct ConnectionGene {
  NeuronId from = 0;
  NeuronId to = 0;
  float weight = 0.0F;
  NeuronId modulator = kNoModulator;

  bool modulated() const { return modulator != kNoModulator; }
  friend bool operator==(const ConnectionGene&, const ConnectionGene&) = default;
};

bool is_valid_speed(int speed);

std::string_view to_string(Role role);
std::string_view to_string(Activation activation);
Role parse_role(std::string_view text);
Activation parse_activation(std::string_view text);

// Direct encoding: a list of neurons and a list of connections.
class Genome {
 public:
  Genome() = default;

  // Interface neurons only: inputs get ids 0..n_inputs-1, outputs follow.
  static Genome with_interface(int n_inputs, int n_outputs);

  NeuronId add_neuron(Role role, Activation activation, int adaptation_speed,
                      int interface_index = 0);
  void add_connection(const ConnectionGene& connection);

  // Removes a hidden neuron, every connection touching it, and every use of
  // it as a modulator (those connections fall back to their static weight).
  // Returns the number of connections removed.
  std::size_t remove_neuron(NeuronId id);
  void remove_connection(std::size_t index);

  const NeuronGene* find(NeuronId id) const;
  bool contains(NeuronId id) const { return find(id) != nullptr; }

  std::span<const NeuronGene> neurons() const { return neurons_; }
  std::span<const ConnectionGene> connections() const { return connections_; }
  std::span<ConnectionGene> connections() { return connections_; }

  int input_count() const;
  int output_count() const;
  int hidden_count() const;
  NeuronId next_id() const { return next_id_; }

  // Throws GenomeError on any broken invariant.
  void validate() const;

  friend bool operator==(const Genome&, const Genome&) = default;

 private:
  friend Genome parse_genome(std::string_view text);

  std::vector<NeuronGene> neurons_;
  std::vector<ConnectionGene> connections_;
  NeuronId next_id_ = 0;
};

// Line-oriented text form: `N id role activation speed interface` and
// `C from to weight modulator`, weights printed with 9 significant digits.
std::string serialize_genome(const Genome& genome);
Genome parse_genome(std::string_view text);

}  // namespace neuroevo
