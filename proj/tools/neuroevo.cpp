#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "neuroevo/experiment.hpp"

using namespace neuroevo;

namespace {

int run_command(const ExperimentConfig& cfg) {
  const auto records = run_experiment(cfg);
  for (const auto& r : records) {
    std::printf("run %zu seed %llu final %.9g best %.9g\n", r.run,
                static_cast<unsigned long long>(r.seed), r.rows.back().best_of_window, r.best_ever);
  }
  return 0;
}

int stats_command(const std::string& control_dir, const std::string& ablated_dir) {
  const auto control = read_final_values(control_dir);
  const auto ablated = read_final_values(ablated_dir);
  write_comparison(std::cout, compare_samples(control, ablated));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neuroevolution experiment runner"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string task = "mountain_car";
  std::vector<std::string> ablations;
  std::size_t max_steps = 0;
  std::string out;
  cfg.threads = std::max(1U, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "evolve networks on a task and write per-run CSVs");
  run->add_option("--task", task, "mountain_car|double_pole|nm_double_pole|multiplexer|function_approx")
      ->required();
  run->add_option("--trials", cfg.trials, "trial budget per run")->capture_default_str();
  run->add_option("--runs", cfg.runs, "independent runs")->capture_default_str();
  run->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  run->add_option("--ablate", ablations, "remove a feature (repeatable)");
  run->add_flag("--normalize", cfg.normalize, "map observations/actions to fixed ranges");
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--max-steps", max_steps, "override the task's step cap");
  run->add_option("--threads", cfg.threads, "runs evaluated concurrently")->capture_default_str();
  run->add_flag("--trace", cfg.trace_best, "write a step trace of each run's final best");

  std::string control_dir, ablated_dir;
  auto* stats = app.add_subcommand("stats", "compare final results of two experiment directories");
  stats->add_option("--control", control_dir, "directory of the unmodified runs")->required();
  stats->add_option("--ablated", ablated_dir, "directory of the ablated runs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) return stats_command(control_dir, ablated_dir);

    cfg.task = parse_task(task);
    for (const auto& name : ablations) cfg.ablations.push_back(parse_ablation(name));
    if (max_steps > 0) cfg.step_cap = max_steps;
    cfg.out_dir = out;
    cfg.validate();
    return run_command(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
