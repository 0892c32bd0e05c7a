#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ttfit {

/// A black-box target function together with its domain: a name, a
/// dimensionality and one closed interval per coordinate. Evaluators
/// are pure; calling one never mutates shared state, so they are safe
/// to evaluate concurrently.
struct Benchmark {
  std::string name;
  int d = 0;
  std::vector<std::pair<double, double>> bounds;
  std::function<double(const std::vector<double>&)> eval;
};

/// Registry order used in reports: the twelve analytical functions
/// followed by the diffusion functional "pde-voi".
const std::vector<std::string>& benchmark_names();

/// Builds a registered benchmark for the given dimensionality.
/// "piston" is defined for d = 7 only and "pde-voi" for d = 9 (it is
/// created with its default mesh; see make_pde_benchmark for control
/// over the solver). Unknown names or unsupported dimensionalities
/// throw std::invalid_argument.
Benchmark make_benchmark(const std::string& name, int d);

}  // namespace ttfit
