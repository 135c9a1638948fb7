#include <algorithm>
#include <cmath>

#include "neuroevo/environment.hpp"

namespace neuroevo {

namespace double_pole {

// Two poles hinged on a cart (Wieland's formulation), effective masses and
// forces per pole, hinge friction included.
std::array<double, 3> accelerations(const DoublePoleState& s, double force) {
  const double cos1 = std::cos(s[2]);
  const double sin1 = std::sin(s[2]);
  const double cos2 = std::cos(s[4]);
  const double sin2 = std::sin(s[4]);
  const double gsin1 = kGravity * sin1;
  const double gsin2 = kGravity * sin2;

  const double ml1 = kLongHalfLength * kLongPoleMass;
  const double ml2 = kShortHalfLength * kShortPoleMass;
  const double friction1 = kHingeFriction * s[3] / ml1;
  const double friction2 = kHingeFriction * s[5] / ml2;
  const double effective_force1 =
      ml1 * s[3] * s[3] * sin1 + 0.75 * kLongPoleMass * cos1 * (friction1 + gsin1);
  const double effective_force2 =
      ml2 * s[5] * s[5] * sin2 + 0.75 * kShortPoleMass * cos2 * (friction2 + gsin2);
  const double effective_mass1 = kLongPoleMass * (1.0 - 0.75 * cos1 * cos1);
  const double effective_mass2 = kShortPoleMass * (1.0 - 0.75 * cos2 * cos2);

  const double cart =
      (force + effective_force1 + effective_force2) / (effective_mass1 + effective_mass2 + kCartMass);
  const double pole1 = -0.75 * (cart * cos1 + gsin1 + friction1) / kLongHalfLength;
  const double pole2 = -0.75 * (cart * cos2 + gsin2 + friction2) / kShortHalfLength;
  return {cart, pole1, pole2};
}

DoublePoleState derivative(const DoublePoleState& s, double force) {
  const auto acc = accelerations(s, force);
  return {s[1], acc[0], s[3], acc[1], s[5], acc[2]};
}

DoublePoleState rk4_step(const DoublePoleState& s, double force, double dt) {
  auto offset = [](const DoublePoleState& base, const DoublePoleState& d, double h) {
    DoublePoleState out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + h * d[i];
    return out;
  };
  const auto k1 = derivative(s, force);
  const auto k2 = derivative(offset(s, k1, dt / 2), force);
  const auto k3 = derivative(offset(s, k2, dt / 2), force);
  const auto k4 = derivative(offset(s, k3, dt), force);
  DoublePoleState out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

bool failed(const DoublePoleState& s) {
  return std::abs(s[0]) > kTrackLimit || std::abs(s[2]) > kAngleLimit ||
         std::abs(s[4]) > kAngleLimit;
}

}  // namespace double_pole

std::vector<Interval> DoublePole::observation_bounds() const {
  using namespace double_pole;
  const Interval position{-kTrackLimit, kTrackLimit};
  const Interval angle{-kAngleLimit, kAngleLimit};
  const Interval velocity{-2.0, 2.0};
  if (markov_) return {position, velocity, angle, velocity, angle, velocity};
  return {position, angle, angle};
}

std::vector<Interval> DoublePole::action_bounds() const {
  return {{-double_pole::kForceMagnitude, double_pole::kForceMagnitude}};
}

std::vector<double> DoublePole::observe() const {
  if (markov_) return {state_.begin(), state_.end()};
  return {state_[0], state_[2], state_[4]};
}

std::vector<double> DoublePole::reset(Rng&) {
  state_ = {0.0, 0.0, double_pole::kStartAngle, 0.0, 0.0, 0.0};
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult DoublePole::step(std::span<const double> action) {
  using namespace double_pole;
  if (done_) throw EnvironmentError("double pole: step after the trial ended");
  if (action.size() != 1) throw std::invalid_argument("expected a single action value");
  const double raw = std::isfinite(action[0]) ? action[0] : 0.0;
  const double force = std::clamp(raw, -kForceMagnitude, kForceMagnitude);
  for (int i = 0; i < kSubsteps; ++i) state_ = rk4_step(state_, force);
  ++steps_;
  const bool fell = failed(state_);
  done_ = fell || steps_ >= cap_;
  return {observe(), fell ? 0.0 : 1.0, done_};
}

}  // namespace neuroevo
