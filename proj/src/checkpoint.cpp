#include "neuroevo/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace neuroevo {

namespace {

constexpr std::string_view kMagic = "neuroevo-checkpoint 1";

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void corrupt(const std::string& what) {
  throw std::runtime_error("checkpoint: " + what);
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) corrupt("unexpected end of file");
  return line;
}

// Reads `key value...` and returns the value part.
std::string expect(std::istream& in, std::string_view key) {
  const std::string line = next_line(in);
  if (line.rfind(key, 0) != 0 || line.size() <= key.size() || line[key.size()] != ' ') {
    corrupt("expected '" + std::string(key) + "', got '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) corrupt("bad real '" + s + "'");
  return v;
}

template <typename T>
T to_integer(const std::string& s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) corrupt("bad integer '" + s + "'");
  return v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const EvolutionState& state) {
  const auto& cfg = state.cfg;
  out << kMagic << '\n';
  out << "population_size " << cfg.population_size << '\n';
  out << "max_novelty_cells " << cfg.max_novelty_cells << '\n';
  out << "initial_mutations " << cfg.initial_mutations << '\n';
  out << "step_mutations " << cfg.step_mutations << '\n';
  out << "mutation_probabilities";
  for (double p : cfg.mutation_probabilities) out << ' ' << exact(p);
  out << '\n';
  out << "neuromodulation_probability " << exact(cfg.neuromodulation_probability) << '\n';
  out << "control_neuron_probability " << exact(cfg.control_neuron_probability) << '\n';
  out << "excitation_threshold " << exact(cfg.excitation_threshold) << '\n';
  out << "perturbation_probability " << exact(cfg.perturbation_probability) << '\n';
  out << "master_seed " << cfg.master_seed << '\n';
  out << "hidden_activations";
  for (auto a : cfg.hidden_activations) out << ' ' << to_string(a);
  out << '\n';
  out << "adaptation_speeds";
  for (int s : cfg.adaptation_speeds) out << ' ' << s;
  out << '\n';
  out << "real_weights " << (cfg.real_weights ? 1 : 0) << '\n';
  out << "generation " << state.generation << '\n';
  out << "individuals " << state.population.size() << '\n';
  for (const auto& individual : state.population) {
    out << serialize_genome(individual.genome) << "end\n";
  }
  out << "cells " << state.map.size() << '\n';
  state.map.dump(out);
  out << '\n';
}

EvolutionState load_checkpoint(std::istream& in) {
  if (next_line(in) != kMagic) corrupt("not a checkpoint file");
  EvolutionConfig cfg;
  cfg.population_size = to_integer<std::size_t>(expect(in, "population_size"));
  cfg.max_novelty_cells = to_integer<std::size_t>(expect(in, "max_novelty_cells"));
  cfg.initial_mutations = to_integer<int>(expect(in, "initial_mutations"));
  cfg.step_mutations = to_integer<int>(expect(in, "step_mutations"));
  {
    std::istringstream fields(expect(in, "mutation_probabilities"));
    for (auto& p : cfg.mutation_probabilities) {
      std::string token;
      if (!(fields >> token)) corrupt("short mutation_probabilities");
      p = to_double(token);
    }
  }
  cfg.neuromodulation_probability = to_double(expect(in, "neuromodulation_probability"));
  cfg.control_neuron_probability = to_double(expect(in, "control_neuron_probability"));
  cfg.excitation_threshold = to_double(expect(in, "excitation_threshold"));
  cfg.perturbation_probability = to_double(expect(in, "perturbation_probability"));
  cfg.master_seed = to_integer<std::uint64_t>(expect(in, "master_seed"));
  {
    cfg.hidden_activations.clear();
    const std::string line = next_line(in);
    std::istringstream fields(line);
    std::string key, token;
    fields >> key;
    if (key != "hidden_activations") corrupt("expected hidden_activations");
    while (fields >> token) cfg.hidden_activations.push_back(parse_activation(token));
  }
  {
    cfg.adaptation_speeds.clear();
    std::istringstream fields(expect(in, "adaptation_speeds"));
    for (std::string token; fields >> token;) cfg.adaptation_speeds.push_back(to_integer<int>(token));
  }
  cfg.real_weights = to_integer<int>(expect(in, "real_weights")) != 0;
  cfg.validate();

  EvolutionState state{cfg, {}, NoveltyMap(cfg.max_novelty_cells), 0};
  state.generation = to_integer<std::size_t>(expect(in, "generation"));
  const auto count = to_integer<std::size_t>(expect(in, "individuals"));
  for (std::size_t i = 0; i < count; ++i) {
    std::string text;
    for (std::string line = next_line(in); line != "end"; line = next_line(in)) {
      text += line;
      text += '\n';
    }
    state.population.emplace_back().genome = parse_genome(text);
  }
  const auto cells = to_integer<std::size_t>(expect(in, "cells"));
  state.map = NoveltyMap::restore(in, cfg.max_novelty_cells);
  if (state.map.size() != cells) corrupt("novelty map cell count mismatch");
  return state;
}

}  // namespace neuroevo
