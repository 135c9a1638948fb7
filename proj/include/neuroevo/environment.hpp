#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "neuroevo/model.hpp"

namespace neuroevo {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

class EnvironmentError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Episodic task. A trial runs from reset() until step() reports done; further
// steps are rejected until the next reset().
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t observation_count() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::size_t max_steps() const = 0;

  // Declared ranges, used by the normalization wrapper.
  virtual std::vector<Interval> observation_bounds() const = 0;
  virtual std::vector<Interval> action_bounds() const = 0;

  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
};

// ---- Mountain car --------------------------------------------------------

struct MountainCarState {
  double pos = -0.5;
  double v = 0.0;
};

struct MountainCarTransition {
  MountainCarState state;
  double reward = -1.0;
  bool goal = false;
};

// Single update of the car; the action is clamped to [-1, 1].
MountainCarTransition mountain_car_step(const MountainCarState& state, double action);

class MountainCar final : public Environment {
 public:
  static constexpr double kMinPos = -1.2;
  static constexpr double kMaxPos = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr std::size_t kStepCap = 1000;

  explicit MountainCar(std::size_t step_cap = kStepCap) : cap_(step_cap) {}

  std::size_t observation_count() const override { return 2; }
  std::size_t action_count() const override { return 1; }
  std::size_t max_steps() const override { return cap_; }
  std::vector<Interval> observation_bounds() const override;
  std::vector<Interval> action_bounds() const override;
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  const MountainCarState& state() const { return state_; }

 private:
  std::size_t cap_;
  MountainCarState state_;
  std::size_t steps_ = 0;
  bool done_ = true;
};

// ---- Double pole -----------------------------------------------------------

// Cart position, cart velocity, long pole angle and angular velocity, short
// pole angle and angular velocity (SI units, radians).
using DoublePoleState = std::array<double, 6>;

namespace double_pole {
inline constexpr double kGravity = -9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kLongPoleMass = 0.1;
inline constexpr double kShortPoleMass = 0.01;
inline constexpr double kLongHalfLength = 0.5;
inline constexpr double kShortHalfLength = 0.05;
inline constexpr double kHingeFriction = 0.000002;
inline constexpr double kForceMagnitude = 10.0;
inline constexpr double kTimeStep = 0.01;
inline constexpr int kSubsteps = 2;
inline constexpr double kTrackLimit = 2.4;
inline constexpr double kAngleLimit = 0.628329;  // 36 degrees
inline constexpr double kStartAngle = 0.07;      // long pole, about 4 degrees
inline constexpr std::size_t kStepCap = 100000;

// Accelerations (cart, long pole, short pole) for a state and force in N.
std::array<double, 3> accelerations(const DoublePoleState& s, double force);
DoublePoleState derivative(const DoublePoleState& s, double force);
// One fourth-order Runge-Kutta step of length dt.
DoublePoleState rk4_step(const DoublePoleState& s, double force, double dt = kTimeStep);
bool failed(const DoublePoleState& s);
}  // namespace double_pole

class DoublePole final : public Environment {
 public:
  explicit DoublePole(bool markov, std::size_t step_cap = double_pole::kStepCap)
      : markov_(markov), cap_(step_cap) {}

  std::size_t observation_count() const override { return markov_ ? 6 : 3; }
  std::size_t action_count() const override { return 1; }
  std::size_t max_steps() const override { return cap_; }
  std::vector<Interval> observation_bounds() const override;
  std::vector<Interval> action_bounds() const override;
  std::vector<double> reset(Rng& rng) override;
  // The action is a force in newtons, clamped to the force magnitude.
  StepResult step(std::span<const double> action) override;

  const DoublePoleState& state() const { return state_; }
  void set_state(const DoublePoleState& s) { state_ = s; }

 private:
  std::vector<double> observe() const;

  bool markov_;
  std::size_t cap_;
  DoublePoleState state_{};
  std::size_t steps_ = 0;
  bool done_ = true;
};

// ---- Multiplexer -------------------------------------------------------------

struct MultiplexerCase {
  std::vector<bool> address;  // most significant bit first
  std::vector<bool> data;
  bool correct = false;
};

// Case number c encodes the address in its top bits and the data below them,
// both most significant bit first.
MultiplexerCase multiplexer_case(int abits, std::uint32_t c);
bool multiplexer_answer(const std::vector<bool>& address, const std::vector<bool>& data);

class Multiplexer final : public Environment {
 public:
  explicit Multiplexer(int abits = 3);

  std::size_t observation_count() const override;
  std::size_t action_count() const override { return 1; }
  std::size_t max_steps() const override { return case_count_; }
  std::vector<Interval> observation_bounds() const override;
  std::vector<Interval> action_bounds() const override;
  // Shuffles every case into a fresh random order.
  std::vector<double> reset(Rng& rng) override;
  // Output above 0.5 reads as 1; reward 0 when correct, -1 otherwise.
  StepResult step(std::span<const double> action) override;

  std::span<const std::uint32_t> order() const { return order_; }

 private:
  std::vector<double> observe(std::uint32_t c) const;

  int abits_;
  std::size_t case_count_;
  std::vector<std::uint32_t> order_;
  std::size_t cursor_ = 0;
  bool done_ = true;
};

struct MultiplexerScore {
  double accumulated = 0.0;
  double accuracy = 0.0;
};

// Full trial of a policy mapping observations to an output value.
MultiplexerScore multiplexer_trial(const std::function<double(std::span<const double>)>& policy,
                                   int abits, Rng& rng);

// ---- Function approximation ----------------------------------------------------

double function_target(double x);

class FunctionApprox final : public Environment {
 public:
  static constexpr int kFirst = -100;
  static constexpr int kLast = 100;

  std::size_t observation_count() const override { return 1; }
  std::size_t action_count() const override { return 1; }
  std::size_t max_steps() const override { return kLast - kFirst + 1; }
  std::vector<Interval> observation_bounds() const override;
  std::vector<Interval> action_bounds() const override;
  std::vector<double> reset(Rng& rng) override;
  // Reward is minus the absolute error against the target at the current x.
  StepResult step(std::span<const double> action) override;

  int x() const { return x_; }

 private:
  int x_ = kFirst;
  bool done_ = true;
};

// ---- Normalization -------------------------------------------------------------

// Affine map of [from.lo, from.hi] onto [to.lo, to.hi].
double rescale(double value, Interval from, Interval to);

// Presents observations scaled into [-1, 1] and reads actions from [0, 1].
class NormalizedEnvironment final : public Environment {
 public:
  explicit NormalizedEnvironment(std::unique_ptr<Environment> inner);

  std::size_t observation_count() const override { return inner_->observation_count(); }
  std::size_t action_count() const override { return inner_->action_count(); }
  std::size_t max_steps() const override { return inner_->max_steps(); }
  std::vector<Interval> observation_bounds() const override;
  std::vector<Interval> action_bounds() const override;
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  std::vector<double> normalize_observation(std::span<const double> raw) const;
  std::vector<double> denormalize_observation(std::span<const double> scaled) const;
  std::vector<double> denormalize_action(std::span<const double> scaled) const;
  std::vector<double> normalize_action(std::span<const double> raw) const;

  const Environment& inner() const { return *inner_; }

 private:
  std::unique_ptr<Environment> inner_;
  std::vector<Interval> obs_bounds_;
  std::vector<Interval> act_bounds_;
};

// ---- Trajectory trace ------------------------------------------------------------

// Records `step,obs...,action...,reward` rows for every step of a trial.
class TracingEnvironment final : public Environment {
 public:
  TracingEnvironment(Environment& inner, std::ostream& out);

  std::size_t observation_count() const override { return inner_.observation_count(); }
  std::size_t action_count() const override { return inner_.action_count(); }
  std::size_t max_steps() const override { return inner_.max_steps(); }
  std::vector<Interval> observation_bounds() const override { return inner_.observation_bounds(); }
  std::vector<Interval> action_bounds() const override { return inner_.action_bounds(); }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

 private:
  Environment& inner_;
  std::ostream& out_;
  std::vector<double> last_observation_;
  std::size_t step_ = 0;
};

}  // namespace neuroevo
