#include "ttfit/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ttfit/als.hpp"
#include "ttfit/anova.hpp"
#include "ttfit/benchmarks.hpp"
#include "ttfit/io.hpp"
#include "ttfit/pde.hpp"
#include "ttfit/sampling.hpp"

namespace ttfit {

namespace {

using nlohmann::json;

// Named random streams derived from the base seed.
enum Stream : std::uint64_t {
  kTrainStream = 1,
  kTestStream = 2,
  kNoiseStream = 3,
  kPadStream = 4,
  kAlsStreamBase = 100,
};

// Padding noise of the encoded initialization. Training values are
// scaled to order one before any fit, so this absolute level is a
// relative one as well.
constexpr double kPadNoise = 1e-3;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.benchmark.empty())
    throw std::invalid_argument("missing benchmark name");
  if (spec.d < 1) throw std::invalid_argument("dimension must be positive");
  if (spec.grid_n < 2)
    throw std::invalid_argument("grid needs at least 2 nodes per mode");
  if (spec.rank < 1) throw std::invalid_argument("rank must be positive");
  if (spec.sweeps < 1)
    throw std::invalid_argument("sweep count must be at least 1, got " +
                                std::to_string(spec.sweeps));
  if (spec.train_size < spec.grid_n)
    throw std::invalid_argument(
        "train size " + std::to_string(spec.train_size) +
        " cannot cover a grid with " + std::to_string(spec.grid_n) +
        " nodes per mode");
  if (spec.test_size < 1)
    throw std::invalid_argument("test size must be positive");
  if (spec.init != "all" && spec.init != "random" && spec.init != "anova")
    throw std::invalid_argument("init must be one of all, random, anova");
  if (spec.noise_sigma < 0.0)
    throw std::invalid_argument("noise level must be non-negative");
  if (spec.repeats < 1)
    throw std::invalid_argument("repeat count must be positive");
  if (spec.pde_n < 16)
    throw std::invalid_argument("mesh needs at least 16 interior points");
}

std::string format_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1e", x);
  return buf;
}

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  check_spec(spec);

  Benchmark bench;
  if (spec.benchmark == "pde-voi") {
    if (spec.d != 9)
      throw std::invalid_argument("pde-voi is defined for d = 9, got " +
                                  std::to_string(spec.d));
    PdeConfig cfg;
    cfg.n = spec.pde_n;
    cfg.jacobi = true;
    bench = make_pde_benchmark(cfg);
  } else {
    bench = make_benchmark(spec.benchmark, spec.d);
  }

  const Grid grid = uniform_grid(bench.bounds, spec.grid_n);
  const std::vector<int> dims(bench.d, spec.grid_n);

  const std::vector<MultiIndex> train_idxs =
      lhs_indices(dims, spec.train_size, mix_seed(spec.seed, kTrainStream));
  const std::vector<MultiIndex> test_idxs =
      random_indices(dims, spec.test_size, mix_seed(spec.seed, kTestStream));

  // The diffusion solve dominates its experiments; spread dataset
  // evaluation over the available cores (the result does not depend
  // on the split).
  int threads = 1;
  if (spec.benchmark == "pde-voi")
    threads = std::max(1u, std::thread::hardware_concurrency());

  Dataset train = build_dataset(bench.eval, grid, train_idxs, threads);
  const Dataset test = build_dataset(bench.eval, grid, test_idxs, threads);
  if (spec.noise_sigma > 0.0)
    train = add_noise(train, spec.noise_sigma,
                      mix_seed(spec.seed, kNoiseStream));

  // All fits see training values scaled to order one. The encoded
  // initialization mixes exact 0/1 chain entries with data-scale
  // entries inside one least-squares system, and once the output
  // scale is large the chain falls below the rounding floor of the
  // normal equations and the fit cannot hold on to it. The scale is
  // a power of two, so scaling values, model and fitted cores back
  // and forth is exact.
  double y_max = 0.0;
  for (double y : train.ys) y_max = std::max(y_max, std::abs(y));
  double y_scale = 1.0;
  if (y_max > 0.0) {
    y_scale = std::exp2(std::ceil(std::log2(y_max)));
    if (!std::isfinite(y_scale)) y_scale = std::exp2(1023.0);
  }
  Dataset fit_train = train;
  for (double& y : fit_train.ys) y /= y_scale;

  ExperimentResult result;
  json& meta = result.metadata;
  meta["spec"] = spec_to_json(spec);
  meta["dims"] = dims;
  meta["seeds"] = {
      {"train", mix_seed(spec.seed, kTrainStream)},
      {"test", mix_seed(spec.seed, kTestStream)},
      {"noise", mix_seed(spec.seed, kNoiseStream)},
      {"padding", mix_seed(spec.seed, kPadStream)},
  };
  meta["train_hash"] = dataset_hash(train);
  meta["test_hash"] = dataset_hash(test);
  meta["y_scale"] = y_scale;

  AlsConfig als_cfg;
  als_cfg.sweeps = spec.sweeps;

  auto unscale = [&](const TtTensor& fitted) {
    TtTensor t = fitted;
    if (y_scale != 1.0)
      for (double& v : t.core(0).v) v *= y_scale;
    return t;
  };
  auto test_error_of = [&](const TtTensor& fitted) {
    return relative_error(tt_get_many(unscale(fitted), test.idxs), test.ys);
  };

  // First-order model; basis of the encoded initialization.
  double t0 = now_seconds();
  const AnovaModel model = fit_anova(fit_train.idxs, fit_train.ys, dims);
  std::vector<double> pred_train(train.ys.size()), pred_test(test.ys.size());
  for (std::size_t s = 0; s < train.idxs.size(); ++s)
    pred_train[s] = y_scale * anova_eval(model, train.idxs[s]);
  for (std::size_t s = 0; s < test.idxs.size(); ++s)
    pred_test[s] = y_scale * anova_eval(model, test.idxs[s]);
  ResultRow anova_row{spec.benchmark, "ANOVA",
                      relative_error(pred_train, train.ys),
                      relative_error(pred_test, test.ys), now_seconds() - t0,
                      1};
  meta["wall_times"]["ANOVA"] = anova_row.wall_time_seconds;
  result.rows.push_back(anova_row);

  if (spec.init == "all" || spec.init == "random") {
    t0 = now_seconds();
    double train_sum = 0.0, test_sum = 0.0;
    json traces = json::array();
    json seeds = json::array();
    for (int rep = 0; rep < spec.repeats; ++rep) {
      const std::uint64_t seed = mix_seed(spec.seed, kAlsStreamBase + rep);
      seeds.push_back(seed);
      const TtTensor init = tt_random(dims, spec.rank, seed);
      const AlsReport report =
          als_run(init, fit_train.idxs, fit_train.ys, als_cfg);
      train_sum += report.train_error_per_sweep.back();
      test_sum += test_error_of(report.tensor);
      traces.push_back(report.train_error_per_sweep);
    }
    ResultRow row{spec.benchmark, "ALS", train_sum / spec.repeats,
                  test_sum / spec.repeats, now_seconds() - t0, spec.repeats};
    meta["seeds"]["als"] = seeds;
    meta["traces"]["ALS"] = traces;
    meta["wall_times"]["ALS"] = row.wall_time_seconds;
    result.rows.push_back(row);
  }

  if (spec.init == "all" || spec.init == "anova") {
    t0 = now_seconds();
    const TtTensor init = anova_to_tt(model, spec.rank, kPadNoise,
                                      mix_seed(spec.seed, kPadStream));
    const AlsReport report =
        als_run(init, fit_train.idxs, fit_train.ys, als_cfg);
    ResultRow row{spec.benchmark, "ANOVA-ALS",
                  report.train_error_per_sweep.back(),
                  test_error_of(report.tensor), now_seconds() - t0, 1};
    meta["traces"]["ANOVA-ALS"] = report.train_error_per_sweep;
    meta["wall_times"]["ANOVA-ALS"] = row.wall_time_seconds;
    meta["sweeps_run"] = report.sweeps_run;
    result.rows.push_back(row);
    result.model = unscale(report.tensor);
  }

  return result;
}

std::string emit_report(const std::vector<ResultRow>& rows,
                        const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("no rows to report");

  if (format == "csv") {
    std::ostringstream out;
    out << "benchmark,method,repeats,train_error,test_error,"
           "train_error_full,test_error_full\n";
    for (const ResultRow& r : rows)
      out << r.benchmark << ',' << r.method << ',' << r.repeats << ','
          << format_short(r.train_error) << ',' << format_short(r.test_error)
          << ',' << format_full(r.train_error) << ','
          << format_full(r.test_error) << "\n";
    return out.str();
  }

  if (format == "markdown") {
    std::vector<std::string> benchmarks;
    for (const ResultRow& r : rows)
      if (std::find(benchmarks.begin(), benchmarks.end(), r.benchmark) ==
          benchmarks.end())
        benchmarks.push_back(r.benchmark);
    std::vector<std::string> methods;
    for (const std::string& m : {"ANOVA", "ALS", "ANOVA-ALS"})
      for (const ResultRow& r : rows)
        if (r.method == m &&
            std::find(methods.begin(), methods.end(), m) == methods.end())
          methods.push_back(m);

    auto find_row = [&](const std::string& bench,
                        const std::string& method) -> const ResultRow* {
      for (const ResultRow& r : rows)
        if (r.benchmark == bench && r.method == method) return &r;
      return nullptr;
    };

    std::ostringstream out;
    out << "| Benchmark | |";
    for (const std::string& m : methods) out << ' ' << m << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
    out << "\n";
    for (const std::string& bench : benchmarks) {
      out << "| " << bench << " | Train |";
      for (const std::string& m : methods) {
        const ResultRow* r = find_row(bench, m);
        out << ' ' << (r ? format_short(r->train_error) : "") << " |";
      }
      out << "\n| | Test |";
      for (const std::string& m : methods) {
        const ResultRow* r = find_row(bench, m);
        out << ' ' << (r ? format_short(r->test_error) : "") << " |";
      }
      out << "\n";
    }
    return out.str();
  }

  throw std::invalid_argument("unknown report format: " + format);
}

json spec_to_json(const ExperimentSpec& spec) {
  return json{{"benchmark", spec.benchmark},
              {"d", spec.d},
              {"grid", spec.grid_n},
              {"rank", spec.rank},
              {"sweeps", spec.sweeps},
              {"train", spec.train_size},
              {"test", spec.test_size},
              {"init", spec.init},
              {"noise", spec.noise_sigma},
              {"repeats", spec.repeats},
              {"seed", spec.seed},
              {"pde_n", spec.pde_n}};
}

ExperimentSpec spec_from_json(const json& j) {
  try {
    ExperimentSpec spec;
    spec.benchmark = j.at("benchmark").get<std::string>();
    if (j.contains("d")) spec.d = j.at("d").get<int>();
    if (j.contains("grid")) spec.grid_n = j.at("grid").get<int>();
    if (j.contains("rank")) spec.rank = j.at("rank").get<int>();
    if (j.contains("sweeps")) spec.sweeps = j.at("sweeps").get<int>();
    if (j.contains("train")) spec.train_size = j.at("train").get<int>();
    if (j.contains("test")) spec.test_size = j.at("test").get<int>();
    if (j.contains("init")) spec.init = j.at("init").get<std::string>();
    if (j.contains("noise")) spec.noise_sigma = j.at("noise").get<double>();
    if (j.contains("repeats")) spec.repeats = j.at("repeats").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("pde_n")) spec.pde_n = j.at("pde_n").get<int>();
    return spec;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("invalid experiment description: ") +
                             e.what());
  }
}

}  // namespace ttfit
