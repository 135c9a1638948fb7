#include <charconv>
#include <cstdio>
#include <sstream>

#include "neuroevo/model.hpp"

namespace neuroevo {

namespace {

std::string format_weight(float w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(w));
  return buf;
}

template <typename T>
T parse_number(const std::string& token, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw GenomeError("line " + std::to_string(line) + ": bad number '" + token + "'");
  }
  return value;
}

}  // namespace

std::string serialize_genome(const Genome& genome) {
  std::ostringstream out;
  out << "# next_id " << genome.next_id() << '\n';
  for (const auto& n : genome.neurons()) {
    out << "N " << n.id << ' ' << to_string(n.role) << ' ' << to_string(n.activation) << ' '
        << n.adaptation_speed << ' ' << n.interface_index << '\n';
  }
  for (const auto& c : genome.connections()) {
    out << "C " << c.from << ' ' << c.to << ' ' << format_weight(c.weight) << ' ' << c.modulator
        << '\n';
  }
  return out.str();
}

Genome parse_genome(std::string_view text) {
  Genome g;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  NeuronId declared_next = -1;
  std::vector<ConnectionGene> pending;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    if (tag == "#") {
      std::string key, value;
      if (fields >> key >> value && key == "next_id") {
        declared_next = parse_number<NeuronId>(value, line_no);
      }
      continue;
    }
    if (tag == "N") {
      std::string id, role, act, speed, iface;
      if (!(fields >> id >> role >> act >> speed >> iface)) {
        throw GenomeError("line " + std::to_string(line_no) + ": truncated neuron record");
      }
      NeuronGene n{parse_number<NeuronId>(id, line_no), parse_role(role), parse_activation(act),
                   parse_number<int>(speed, line_no), parse_number<int>(iface, line_no)};
      if (!g.neurons_.empty() && n.id <= g.neurons_.back().id) {
        throw GenomeError("line " + std::to_string(line_no) + ": neuron ids must ascend");
      }
      g.neurons_.push_back(n);
      g.next_id_ = n.id + 1;
    } else if (tag == "C") {
      std::string from, to, weight, mod;
      if (!(fields >> from >> to >> weight >> mod)) {
        throw GenomeError("line " + std::to_string(line_no) + ": truncated connection record");
      }
      pending.push_back({parse_number<NeuronId>(from, line_no), parse_number<NeuronId>(to, line_no),
                         parse_number<float>(weight, line_no),
                         parse_number<NeuronId>(mod, line_no)});
    } else {
      throw GenomeError("line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
    }
  }
  if (declared_next > g.next_id_) g.next_id_ = declared_next;
  g.connections_ = std::move(pending);
  g.validate();
  return g;
}

}  // namespace neuroevo
