#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttfit/als.hpp"
#include "ttfit/benchmarks.hpp"
#include "ttfit/experiment.hpp"
#include "ttfit/io.hpp"
#include "ttfit/pde.hpp"
#include "ttfit/sampling.hpp"

namespace {

std::string format_interval(double lo, double hi) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "[%g, %g]", lo, hi);
  return buf;
}

void list_benchmarks() {
  for (const std::string& name : ttfit::benchmark_names()) {
    const int d = (name == "pde-voi") ? 9 : 7;
    const ttfit::Benchmark b = ttfit::make_benchmark(name, d);
    bool uniform = true;
    for (const auto& iv : b.bounds)
      if (iv != b.bounds.front()) uniform = false;
    std::printf("%-12s d=%d  ", b.name.c_str(), b.d);
    if (uniform) {
      std::printf("%s per mode\n",
                  format_interval(b.bounds[0].first, b.bounds[0].second)
                      .c_str());
    } else {
      for (const auto& iv : b.bounds)
        std::printf("%s ", format_interval(iv.first, iv.second).c_str());
      std::printf("\n");
    }
  }
}

// Test-set error of a previously saved model, printed at full
// precision; uses the same test stream as run_experiment.
void eval_model(const ttfit::ExperimentSpec& spec, const std::string& path) {
  ttfit::Benchmark bench;
  if (spec.benchmark == "pde-voi") {
    ttfit::PdeConfig cfg;
    cfg.n = spec.pde_n;
    cfg.jacobi = true;
    bench = ttfit::make_pde_benchmark(cfg);
  } else {
    bench = ttfit::make_benchmark(spec.benchmark, spec.d);
  }
  const ttfit::TtTensor model = ttfit::load_model(path);
  if (model.dims() != std::vector<int>(bench.d, spec.grid_n))
    throw std::invalid_argument(
        "model in " + path + " does not match the experiment grid");

  const ttfit::Grid grid = ttfit::uniform_grid(bench.bounds, spec.grid_n);
  const std::vector<int> dims(bench.d, spec.grid_n);
  const auto test_idxs = ttfit::random_indices(
      dims, spec.test_size, ttfit::mix_seed(spec.seed, 2));
  const ttfit::Dataset test =
      ttfit::build_dataset(bench.eval, grid, test_idxs, 1);
  const double err =
      ttfit::relative_error(ttfit::tt_get_many(model, test.idxs), test.ys);
  std::printf("%.17g\n", err);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-train surrogate fitting from scattered samples"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a fitting experiment");
  std::string benchmark, init = "all", format = "csv";
  std::string out_path, config_path, save_model_path, eval_model_path,
      meta_path;
  int dim = 7, grid = 10, rank = 5, sweeps = 50, train = 10000, test = 10000,
      repeats = 10, pde_n = 63;
  double noise = 0.0;
  std::uint64_t seed = 0;

  run->add_option("--benchmark", benchmark, "Benchmark name");
  run->add_option("--dim", dim, "Dimensionality (piston: 7, pde-voi: 9)");
  run->add_option("--grid", grid, "Grid nodes per mode");
  run->add_option("--rank", rank, "Bond rank of the fitted tensor");
  run->add_option("--sweeps", sweeps, "Optimization sweeps");
  run->add_option("--train", train, "Training samples (stratified)");
  run->add_option("--test", test, "Test samples (uniform)");
  run->add_option("--init", init, "Fits to run: all, random or anova")
      ->check(CLI::IsMember({"all", "random", "anova"}));
  run->add_option("--noise", noise, "Multiplicative train noise level");
  run->add_option("--repeats", repeats, "Random-init repetitions");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--pde-n", pde_n, "Interior mesh points for pde-voi");
  run->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"csv", "markdown"}));
  run->add_option("--out", out_path, "Report file (default: stdout)");
  run->add_option("--meta", meta_path,
                  "Metadata sidecar path (default: <out>.meta.json)");
  run->add_option("--config", config_path,
                  "Experiment description JSON; explicit flags override it");
  run->add_option("--save-model", save_model_path,
                  "Save the fitted model-init tensor as JSON");
  run->add_option("--eval-model", eval_model_path,
                  "Skip fitting; print the test error of a saved model");

  CLI::App* list =
      app.add_subcommand("list-benchmarks", "List registered benchmarks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      list_benchmarks();
      return 0;
    }

    ttfit::ExperimentSpec spec;
    bool dim_given = run->count("--dim") > 0;
    if (!config_path.empty()) {
      const nlohmann::json j =
          nlohmann::json::parse(ttfit::read_text_file(config_path));
      spec = ttfit::spec_from_json(j);
      dim_given = dim_given || j.contains("d");
    }
    if (run->count("--benchmark")) spec.benchmark = benchmark;
    if (run->count("--dim")) spec.d = dim;
    if (run->count("--grid")) spec.grid_n = grid;
    if (run->count("--rank")) spec.rank = rank;
    if (run->count("--sweeps")) spec.sweeps = sweeps;
    if (run->count("--train")) spec.train_size = train;
    if (run->count("--test")) spec.test_size = test;
    if (run->count("--init")) spec.init = init;
    if (run->count("--noise")) spec.noise_sigma = noise;
    if (run->count("--repeats")) spec.repeats = repeats;
    if (run->count("--seed")) spec.seed = seed;
    if (run->count("--pde-n")) spec.pde_n = pde_n;
    if (!dim_given && spec.benchmark == "pde-voi") spec.d = 9;

    if (!eval_model_path.empty()) {
      eval_model(spec, eval_model_path);
      return 0;
    }

    const ttfit::ExperimentResult result = ttfit::run_experiment(spec);
    const std::string report = ttfit::emit_report(result.rows, format);
    if (out_path.empty())
      std::cout << report;
    else
      ttfit::write_text_file(out_path, report);

    std::string sidecar = meta_path;
    if (sidecar.empty() && !out_path.empty()) sidecar = out_path + ".meta.json";
    if (!sidecar.empty())
      ttfit::write_text_file(sidecar, result.metadata.dump(2) + "\n");

    if (!save_model_path.empty()) {
      if (!result.model)
        throw std::runtime_error(
            "no model-init fit in this experiment (init = random), nothing "
            "to save");
      ttfit::save_model(*result.model, save_model_path);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
