#pragma once

#include <iosfwd>

#include "neuroevo/evolution.hpp"

namespace neuroevo {

// Config echo, completed generation count, every genome of the population
// awaiting evaluation, and the novelty map. All random streams derive from
// (master seed, generation), so a restored state continues bit-exactly.
void save_checkpoint(std::ostream& out, const EvolutionState& state);
EvolutionState load_checkpoint(std::istream& in);

}  // namespace neuroevo
