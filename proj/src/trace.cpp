#include <cstdio>
#include <ostream>

#include "neuroevo/environment.hpp"

namespace neuroevo {

namespace {

void write_real(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out << ',' << buf;
}

}  // namespace

TracingEnvironment::TracingEnvironment(Environment& inner, std::ostream& out)
    : inner_(inner), out_(out) {
  out_ << "step";
  for (std::size_t i = 0; i < inner_.observation_count(); ++i) out_ << ",obs" << i;
  for (std::size_t i = 0; i < inner_.action_count(); ++i) out_ << ",action" << i;
  out_ << ",reward\n";
}

std::vector<double> TracingEnvironment::reset(Rng& rng) {
  last_observation_ = inner_.reset(rng);
  step_ = 0;
  return last_observation_;
}

StepResult TracingEnvironment::step(std::span<const double> action) {
  auto result = inner_.step(action);
  out_ << step_++;
  for (double v : last_observation_) write_real(out_, v);
  for (double v : action) write_real(out_, v);
  write_real(out_, result.reward);
  out_ << '\n';
  last_observation_ = result.observation;
  return result;
}

}  // namespace neuroevo
