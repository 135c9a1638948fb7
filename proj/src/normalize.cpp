#include "neuroevo/environment.hpp"

namespace neuroevo {

namespace {

constexpr Interval kObservationRange{-1.0, 1.0};
constexpr Interval kActionRange{0.0, 1.0};

std::vector<double> map_all(std::span<const double> values, const std::vector<Interval>& from,
                            bool forward, Interval unit) {
  if (values.size() != from.size()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = forward ? rescale(values[i], from[i], unit) : rescale(values[i], unit, from[i]);
  }
  return out;
}

}  // namespace

double rescale(double value, Interval from, Interval to) {
  return to.lo + (value - from.lo) * (to.hi - to.lo) / (from.hi - from.lo);
}

NormalizedEnvironment::NormalizedEnvironment(std::unique_ptr<Environment> inner)
    : inner_(std::move(inner)),
      obs_bounds_(inner_->observation_bounds()),
      act_bounds_(inner_->action_bounds()) {}

std::vector<Interval> NormalizedEnvironment::observation_bounds() const {
  return std::vector<Interval>(obs_bounds_.size(), kObservationRange);
}

std::vector<Interval> NormalizedEnvironment::action_bounds() const {
  return std::vector<Interval>(act_bounds_.size(), kActionRange);
}

std::vector<double> NormalizedEnvironment::normalize_observation(std::span<const double> raw) const {
  return map_all(raw, obs_bounds_, true, kObservationRange);
}

std::vector<double> NormalizedEnvironment::denormalize_observation(
    std::span<const double> scaled) const {
  return map_all(scaled, obs_bounds_, false, kObservationRange);
}

std::vector<double> NormalizedEnvironment::denormalize_action(std::span<const double> scaled) const {
  return map_all(scaled, act_bounds_, false, kActionRange);
}

std::vector<double> NormalizedEnvironment::normalize_action(std::span<const double> raw) const {
  return map_all(raw, act_bounds_, true, kActionRange);
}

std::vector<double> NormalizedEnvironment::reset(Rng& rng) {
  return normalize_observation(inner_->reset(rng));
}

StepResult NormalizedEnvironment::step(std::span<const double> action) {
  auto result = inner_->step(denormalize_action(action));
  result.observation = normalize_observation(result.observation);
  return result;
}

}  // namespace neuroevo
