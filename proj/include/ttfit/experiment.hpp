#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ttfit/tt_tensor.hpp"

namespace ttfit {

/// Everything one experiment depends on. Two runs with equal specs
/// produce identical result rows, byte for byte in any report format.
struct ExperimentSpec {
  std::string benchmark;
  int d = 7;
  int grid_n = 10;
  int rank = 5;
  int sweeps = 50;
  int train_size = 10000;
  int test_size = 10000;
  /// Which fits to run besides the first-order model: "random" (ALS
  /// from random cores), "anova" (ALS from the encoded model), or
  /// "all" for both.
  std::string init = "all";
  /// Multiplicative noise level applied to the training values.
  double noise_sigma = 0.0;
  /// Independent repetitions of the random-init fit; their errors are
  /// averaged into one row. The model-init fit is deterministic on a
  /// fixed train set and always runs once.
  int repeats = 10;
  std::uint64_t seed = 0;
  /// Mesh used when the benchmark is "pde-voi".
  int pde_n = 63;
};

struct ResultRow {
  std::string benchmark;
  std::string method;  // "ANOVA", "ALS" or "ANOVA-ALS"
  double train_error = 0.0;
  double test_error = 0.0;
  double wall_time_seconds = 0.0;
  int repeats = 1;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  /// Seeds, dataset hashes, wall times, per-sweep error traces.
  nlohmann::json metadata;
  /// Fitted tensor of the model-init run, when it ran.
  std::optional<TtTensor> model;
};

/// Runs the full pipeline on one benchmark: draw one stratified train
/// set and one uniform test set, fit the first-order model, then the
/// requested ALS variants on the identical training samples. Row
/// order is ANOVA, ALS, ANOVA-ALS (present subset).
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Renders rows as "csv" (two-significant-digit columns next to full
/// precision ones) or "markdown" (two lines per benchmark, Train and
/// Test, one column per method). Wall times are not included; they
/// live in the metadata, keeping reports byte-identical across runs.
std::string emit_report(const std::vector<ResultRow>& rows,
                        const std::string& format);

nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

}  // namespace ttfit
