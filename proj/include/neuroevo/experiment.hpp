#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "neuroevo/evolution.hpp"
#include "neuroevo/stats.hpp"

namespace neuroevo {

enum class Task { mountain_car, double_pole, nm_double_pole, multiplexer, function_approx };

enum class Ablation {
  no_control,
  no_identity,
  no_neuromodulation,
  no_random,
  no_real_weights,
  no_sigmoid,
  no_slow,
  no_threshold,
};

inline constexpr Task kAllTasks[] = {Task::mountain_car, Task::double_pole, Task::nm_double_pole,
                                     Task::multiplexer, Task::function_approx};
inline constexpr Ablation kAllAblations[] = {
    Ablation::no_control, Ablation::no_identity, Ablation::no_neuromodulation,
    Ablation::no_random,  Ablation::no_real_weights, Ablation::no_sigmoid,
    Ablation::no_slow,    Ablation::no_threshold};

std::string_view to_string(Task task);
std::string_view to_string(Ablation ablation);
// Throw std::invalid_argument on unknown names.
Task parse_task(std::string_view name);
Ablation parse_ablation(std::string_view name);

inline constexpr std::size_t kDefaultTrials = 200000;
inline constexpr std::size_t kAblationTrials = 1000000;

struct ExperimentConfig {
  Task task = Task::mountain_car;
  std::size_t trials = kDefaultTrials;
  std::size_t runs = 30;
  std::vector<Ablation> ablations;
  bool normalize = false;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
  std::optional<std::size_t> step_cap;  // overrides the task's trial length cap
  unsigned threads = 1;                 // runs executed concurrently
  bool trace_best = false;              // replay each run's final best into a CSV trace
  EvolutionConfig evolution;            // base parameters before ablation

  // Throws std::invalid_argument, e.g. normalization combined with ablations.
  void validate() const;
};

// Removes the ablated options from the mutation draws of `base`.
EvolutionConfig apply_ablations(EvolutionConfig base, std::span<const Ablation> ablations);

std::unique_ptr<Environment> make_environment(Task task, bool normalize,
                                              std::optional<std::size_t> step_cap = std::nullopt);

std::uint64_t run_seed(std::uint64_t master, std::size_t run_index);

struct GenerationRow {
  std::size_t generation = 0;
  std::size_t trials = 0;
  double best_accumulated = 0.0;
  double best_of_window = 0.0;
  double mean_fitness = 0.0;
  std::size_t occupied_cells = 0;
  std::size_t best_neurons = 0;
  std::size_t best_connections = 0;
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<GenerationRow> rows;
  Genome final_best;
  // Best accumulated reward over the whole run and the genome that earned it.
  double best_ever = -std::numeric_limits<double>::infinity();
  Genome best_ever_genome;
};

// Called after every generation; returning true ends the run early.
using StopPredicate = std::function<bool(const GenerationRow&)>;

RunRecord run_single(const ExperimentConfig& cfg, std::size_t run_index,
                     const StopPredicate& stop = {});

struct AveragedRow {
  std::size_t generation = 0;
  std::size_t trials = 0;
  double best_of_window = 0.0;
  double best_accumulated = 0.0;
  double mean_fitness = 0.0;
  std::size_t runs = 0;
};

std::vector<AveragedRow> average_curves(std::span<const RunRecord> runs);

void write_run_csv(std::ostream& out, const RunRecord& record);
std::vector<GenerationRow> read_run_csv(std::istream& in);
void write_average_csv(std::ostream& out, std::span<const AveragedRow> rows);
void write_plot_script(std::ostream& out, const ExperimentConfig& cfg);

// Runs every seed (concurrently up to cfg.threads) and, when out_dir is set,
// writes run_NNN.csv, run_NNN_best.genome, average.csv, summary.csv and
// plot.gp.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

// Final best-of-window value of every run_*.csv in a directory, in file name order.
std::vector<double> read_final_values(const std::filesystem::path& dir);

void write_comparison(std::ostream& out, const Comparison& comparison);

}  // namespace neuroevo
