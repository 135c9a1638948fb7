#include "neuroevo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

namespace neuroevo {

namespace {

constexpr std::uint64_t kRunStream = 0x52554e;    // "RUN"
constexpr std::uint64_t kTraceStream = 0x545243;  // "TRC"

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string run_name(std::size_t run, std::string_view suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "run_%03zu%.*s", run, static_cast<int>(suffix.size()), suffix.data());
  return buf;
}

void remove_activation(EvolutionConfig& cfg, Activation a) { std::erase(cfg.hidden_activations, a); }

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::mountain_car: return "mountain_car";
    case Task::double_pole: return "double_pole";
    case Task::nm_double_pole: return "nm_double_pole";
    case Task::multiplexer: return "multiplexer";
    case Task::function_approx: return "function_approx";
  }
  return "?";
}

std::string_view to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::no_control: return "no_control";
    case Ablation::no_identity: return "no_identity";
    case Ablation::no_neuromodulation: return "no_neuromodulation";
    case Ablation::no_random: return "no_random";
    case Ablation::no_real_weights: return "no_real_weights";
    case Ablation::no_sigmoid: return "no_sigmoid";
    case Ablation::no_slow: return "no_slow";
    case Ablation::no_threshold: return "no_threshold";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  for (Task t : kAllTasks) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

Ablation parse_ablation(std::string_view name) {
  for (Ablation a : kAllAblations) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown ablation '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (runs == 0) throw std::invalid_argument("at least one run is required");
  if (trials == 0) throw std::invalid_argument("the trial budget must be positive");
  if (normalize && !ablations.empty()) {
    throw std::invalid_argument("ablation runs use raw input/output; drop --normalize");
  }
  if (normalize && task == Task::function_approx) {
    throw std::invalid_argument("function approximation is defined on raw input/output");
  }
  apply_ablations(evolution, ablations).validate();
}

EvolutionConfig apply_ablations(EvolutionConfig base, std::span<const Ablation> ablations) {
  for (Ablation a : ablations) {
    switch (a) {
      case Ablation::no_control: base.control_neuron_probability = 0.0; break;
      case Ablation::no_identity: remove_activation(base, Activation::identity); break;
      case Ablation::no_neuromodulation: base.neuromodulation_probability = 0.0; break;
      case Ablation::no_random: remove_activation(base, Activation::random); break;
      case Ablation::no_real_weights: base.real_weights = false; break;
      case Ablation::no_sigmoid: remove_activation(base, Activation::sigmoid); break;
      case Ablation::no_slow: base.adaptation_speeds = {1}; break;
      case Ablation::no_threshold: remove_activation(base, Activation::threshold); break;
    }
  }
  return base;
}

std::unique_ptr<Environment> make_environment(Task task, bool normalize,
                                              std::optional<std::size_t> step_cap) {
  std::unique_ptr<Environment> env;
  switch (task) {
    case Task::mountain_car:
      env = std::make_unique<MountainCar>(step_cap.value_or(MountainCar::kStepCap));
      break;
    case Task::double_pole:
      env = std::make_unique<DoublePole>(true, step_cap.value_or(double_pole::kStepCap));
      break;
    case Task::nm_double_pole:
      env = std::make_unique<DoublePole>(false, step_cap.value_or(double_pole::kStepCap));
      break;
    case Task::multiplexer:
      env = std::make_unique<Multiplexer>(3);
      break;
    case Task::function_approx:
      env = std::make_unique<FunctionApprox>();
      break;
  }
  if (normalize) env = std::make_unique<NormalizedEnvironment>(std::move(env));
  return env;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run_index) {
  return derive_seed(master, {kRunStream, run_index});
}

RunRecord run_single(const ExperimentConfig& cfg, std::size_t run_index, const StopPredicate& stop) {
  EvolutionConfig evo = apply_ablations(cfg.evolution, cfg.ablations);
  evo.master_seed = run_seed(cfg.seed, run_index);

  auto factory = [&cfg] { return make_environment(cfg.task, cfg.normalize, cfg.step_cap); };
  const auto probe = factory();
  EvolutionState state = start_evolution(evo, static_cast<int>(probe->observation_count()),
                                         static_cast<int>(probe->action_count()));

  RunRecord record;
  record.run = run_index;
  record.seed = evo.master_seed;
  const std::size_t population = evo.population_size;
  const std::size_t generations = (cfg.trials + population - 1) / population;
  std::vector<double> rewards;
  for (std::size_t g = 0; g < generations; ++g) {
    auto report = step_generation(state, factory, 1);
    rewards.clear();
    double fitness_sum = 0.0;
    for (const auto& t : report.trials) {
      rewards.push_back(t.accumulated);
      fitness_sum += t.fitness;
    }
    GenerationRow row;
    row.generation = report.generation;
    row.trials = report.generation * population;
    row.best_accumulated = report.trials[report.best_index].accumulated;
    row.best_of_window = best_of_window(rewards, population).front();
    row.mean_fitness = fitness_sum / static_cast<double>(report.trials.size());
    row.occupied_cells = report.occupied_cells;
    row.best_neurons = report.best_genome.neurons().size();
    row.best_connections = report.best_genome.connections().size();
    if (row.best_accumulated > record.best_ever) {
      record.best_ever = row.best_accumulated;
      record.best_ever_genome = report.best_genome;
    }
    record.final_best = std::move(report.best_genome);
    record.rows.push_back(row);
    if (stop && stop(row)) break;
  }
  return record;
}

std::vector<AveragedRow> average_curves(std::span<const RunRecord> runs) {
  std::vector<AveragedRow> out;
  for (const auto& run : runs) {
    for (std::size_t g = 0; g < run.rows.size(); ++g) {
      if (out.size() <= g) out.push_back({run.rows[g].generation, run.rows[g].trials});
      auto& a = out[g];
      a.best_of_window += run.rows[g].best_of_window;
      a.best_accumulated += run.rows[g].best_accumulated;
      a.mean_fitness += run.rows[g].mean_fitness;
      ++a.runs;
    }
  }
  for (auto& a : out) {
    const auto n = static_cast<double>(a.runs);
    a.best_of_window /= n;
    a.best_accumulated /= n;
    a.mean_fitness /= n;
  }
  return out;
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  out << "generation,trials,best_accumulated,best_of_window,mean_fitness,occupied_cells,"
         "best_neurons,best_connections\n";
  for (const auto& r : record.rows) {
    out << r.generation << ',' << r.trials << ',' << real(r.best_accumulated) << ','
        << real(r.best_of_window) << ',' << real(r.mean_fitness) << ',' << r.occupied_cells << ','
        << r.best_neurons << ',' << r.best_connections << '\n';
  }
}

std::vector<GenerationRow> read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("generation,", 0) != 0) {
    throw std::runtime_error("run CSV: missing header");
  }
  std::vector<GenerationRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    GenerationRow r;
    if (!(fields >> r.generation >> r.trials >> r.best_accumulated >> r.best_of_window >>
          r.mean_fitness >> r.occupied_cells >> r.best_neurons >> r.best_connections)) {
      throw std::runtime_error("run CSV: malformed row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

void write_average_csv(std::ostream& out, std::span<const AveragedRow> rows) {
  out << "generation,trials,best_of_window,best_accumulated,mean_fitness,runs\n";
  for (const auto& r : rows) {
    out << r.generation << ',' << r.trials << ',' << real(r.best_of_window) << ','
        << real(r.best_accumulated) << ',' << real(r.mean_fitness) << ',' << r.runs << '\n';
  }
}

void write_plot_script(std::ostream& out, const ExperimentConfig& cfg) {
  out << "# gnuplot -persist plot.gp\n"
         "set datafile separator ','\n"
         "set key bottom right\n"
         "set xlabel 'trials'\n"
         "set ylabel 'average accumulated reward'\n"
         "plot 'average.csv' using 2:3 skip 1 with lines title '"
      << to_string(cfg.task) << "'\n";
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<RunRecord> records(cfg.runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.runs; r = next++) {
      try {
        records[r] = run_single(cfg, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::clamp<unsigned>(cfg.threads, 1U, static_cast<unsigned>(cfg.runs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  if (cfg.out_dir.empty()) return records;
  std::filesystem::create_directories(cfg.out_dir);
  for (const auto& record : records) {
    std::ofstream(cfg.out_dir / run_name(record.run, ".csv")) << [&] {
      std::ostringstream s;
      write_run_csv(s, record);
      return s.str();
    }();
    std::ofstream(cfg.out_dir / run_name(record.run, "_best.genome")) << serialize_genome(record.final_best);
    if (cfg.trace_best) {
      std::ofstream trace(cfg.out_dir / run_name(record.run, "_trace.csv"));
      auto env = make_environment(cfg.task, cfg.normalize, cfg.step_cap);
      TracingEnvironment traced(*env, trace);
      Rng rng(derive_seed(record.seed, {kTraceStream}));
      evaluate(record.final_best, traced, rng, cfg.evolution.excitation_threshold);
    }
  }
  {
    std::ofstream out(cfg.out_dir / "average.csv");
    write_average_csv(out, average_curves(records));
  }
  {
    std::ofstream out(cfg.out_dir / "summary.csv");
    out << "run,seed,final_best_of_window,best_ever\n";
    for (const auto& record : records) {
      out << record.run << ',' << record.seed << ',' << real(record.rows.back().best_of_window) << ','
          << real(record.best_ever) << '\n';
    }
  }
  {
    std::ofstream out(cfg.out_dir / "plot.gp");
    write_plot_script(out, cfg);
  }
  return records;
}

std::vector<double> read_final_values(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::invalid_argument("not a directory: " + dir.string());
  }
  static const std::regex pattern(R"(run_\d+\.csv)");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (std::regex_match(entry.path().filename().string(), pattern)) files.push_back(entry.path());
  }
  std::ranges::sort(files);
  std::vector<double> finals;
  for (const auto& file : files) {
    std::ifstream in(file);
    const auto rows = read_run_csv(in);
    if (rows.empty()) throw std::runtime_error("empty run file: " + file.string());
    finals.push_back(rows.back().best_of_window);
  }
  if (finals.empty()) throw std::invalid_argument("no run_*.csv files in " + dir.string());
  return finals;
}

void write_comparison(std::ostream& out, const Comparison& c) {
  out << "control_mean,ablated_mean,percent_change,p_worse,p_better,tag\n"
      << real(c.control_mean) << ',' << real(c.ablated_mean) << ',' << real(c.percent) << ','
      << real(c.p_worse) << ',' << real(c.p_better) << ',' << c.tag << '\n';
}

}  // namespace neuroevo
