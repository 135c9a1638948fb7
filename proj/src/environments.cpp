#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuroevo/environment.hpp"

namespace neuroevo {

namespace {

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

void require_single_action(std::span<const double> action) {
  if (action.size() != 1) throw std::invalid_argument("expected a single action value");
}

}  // namespace

// ---- Mountain car ------------------------------------------------------------

MountainCarTransition mountain_car_step(const MountainCarState& state, double action) {
  const double a = std::clamp(finite_or_zero(action), -1.0, 1.0);
  MountainCarTransition t;
  double v = state.v + a * 0.001 + std::cos(3.0 * state.pos) * (-0.0025);
  v = std::clamp(v, -MountainCar::kMaxSpeed, MountainCar::kMaxSpeed);
  double pos = state.pos + v;
  if (v < 0.0 && pos <= MountainCar::kMinPos) {
    v = 0.0;
    pos = MountainCar::kMinPos;
  }
  t.goal = pos >= MountainCar::kMaxPos;
  t.state = {std::min(pos, MountainCar::kMaxPos), v};
  t.reward = t.goal ? 0.0 : -1.0;
  return t;
}

std::vector<Interval> MountainCar::observation_bounds() const {
  return {{kMinPos, kMaxPos}, {-kMaxSpeed, kMaxSpeed}};
}

std::vector<Interval> MountainCar::action_bounds() const { return {{-1.0, 1.0}}; }

std::vector<double> MountainCar::reset(Rng&) {
  state_ = {};
  steps_ = 0;
  done_ = false;
  return {state_.pos, state_.v};
}

StepResult MountainCar::step(std::span<const double> action) {
  if (done_) throw EnvironmentError("mountain car: step after the trial ended");
  require_single_action(action);
  const auto t = mountain_car_step(state_, action[0]);
  state_ = t.state;
  ++steps_;
  done_ = t.goal || steps_ >= cap_;
  return {{state_.pos, state_.v}, t.reward, done_};
}

// ---- Multiplexer -------------------------------------------------------------

bool multiplexer_answer(const std::vector<bool>& address, const std::vector<bool>& data) {
  std::size_t index = 0;
  for (bool bit : address) index = (index << 1U) | (bit ? 1U : 0U);
  return data.at(index);
}

MultiplexerCase multiplexer_case(int abits, std::uint32_t c) {
  const int dbits = 1 << abits;
  const int total = abits + dbits;
  MultiplexerCase mc;
  for (int i = 0; i < total; ++i) {
    const bool bit = ((c >> (total - 1 - i)) & 1U) != 0;
    (i < abits ? mc.address : mc.data).push_back(bit);
  }
  mc.correct = multiplexer_answer(mc.address, mc.data);
  return mc;
}

Multiplexer::Multiplexer(int abits) : abits_(abits) {
  if (abits < 1 || abits > 4) throw std::invalid_argument("multiplexer address bits must be 1..4");
  case_count_ = std::size_t{1} << static_cast<unsigned>(abits + (1 << abits));
}

std::size_t Multiplexer::observation_count() const {
  return static_cast<std::size_t>(abits_ + (1 << abits_));
}

std::vector<Interval> Multiplexer::observation_bounds() const {
  return std::vector<Interval>(observation_count(), Interval{0.0, 1.0});
}

std::vector<Interval> Multiplexer::action_bounds() const { return {{0.0, 1.0}}; }

std::vector<double> Multiplexer::observe(std::uint32_t c) const {
  const auto n = observation_count();
  std::vector<double> obs(n);
  for (std::size_t i = 0; i < n; ++i) obs[i] = static_cast<double>((c >> (n - 1 - i)) & 1U);
  return obs;
}

std::vector<double> Multiplexer::reset(Rng& rng) {
  order_.resize(case_count_);
  std::iota(order_.begin(), order_.end(), 0U);
  std::shuffle(order_.begin(), order_.end(), rng);
  cursor_ = 0;
  done_ = false;
  return observe(order_[0]);
}

StepResult Multiplexer::step(std::span<const double> action) {
  if (done_) throw EnvironmentError("multiplexer: step after the trial ended");
  require_single_action(action);
  const auto mc = multiplexer_case(abits_, order_[cursor_]);
  const bool answer = finite_or_zero(action[0]) > 0.5;
  const double reward = answer == mc.correct ? 0.0 : -1.0;
  ++cursor_;
  done_ = cursor_ >= case_count_;
  return {observe(order_[done_ ? cursor_ - 1 : cursor_]), reward, done_};
}

MultiplexerScore multiplexer_trial(const std::function<double(std::span<const double>)>& policy,
                                   int abits, Rng& rng) {
  Multiplexer env(abits);
  auto obs = env.reset(rng);
  MultiplexerScore score;
  for (;;) {
    const double out = policy(obs);
    auto r = env.step(std::span<const double>(&out, 1));
    score.accumulated += r.reward;
    if (r.done) break;
    obs = std::move(r.observation);
  }
  const auto cases = static_cast<double>(env.max_steps());
  score.accuracy = (cases + score.accumulated) / cases;
  return score;
}

// ---- Function approximation ----------------------------------------------------

double function_target(double x) {
  return x * x * x / 1000.0 + 0.4 * x + 20.0 * std::sin(x / 10.0) + 20.0 * std::sin(100.0 * x);
}

std::vector<Interval> FunctionApprox::observation_bounds() const {
  return {{static_cast<double>(kFirst), static_cast<double>(kLast)}};
}

std::vector<Interval> FunctionApprox::action_bounds() const { return {{-1100.0, 1100.0}}; }

std::vector<double> FunctionApprox::reset(Rng&) {
  x_ = kFirst;
  done_ = false;
  return {static_cast<double>(x_)};
}

StepResult FunctionApprox::step(std::span<const double> action) {
  if (done_) throw EnvironmentError("function approximation: step after the trial ended");
  require_single_action(action);
  // Keeps the reward finite for diverging networks.
  const double a = std::clamp(finite_or_zero(action[0]), -1e9, 1e9);
  const double reward = -std::abs(a - function_target(x_));
  done_ = x_ >= kLast;
  if (!done_) ++x_;
  return {{static_cast<double>(x_)}, reward, done_};
}

}  // namespace neuroevo
