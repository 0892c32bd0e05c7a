#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ttfit/util.hpp"

namespace ttfit {

/// Per-mode discretization of a box: grid[i][j] is the j-th node of
/// mode i. Nodes are uniformly spaced and include both endpoints.
using Grid = std::vector<std::vector<double>>;

/// Uniform grid with n nodes per mode (n >= 2) over the given closed
/// intervals. Throws std::invalid_argument on an empty box, a lower
/// bound not strictly below its upper bound, or n < 2.
Grid uniform_grid(const std::vector<std::pair<double, double>>& bounds, int n);

/// Maps a grid multi-index to the point it discretizes.
std::vector<double> index_to_point(const Grid& grid, const MultiIndex& idx);

/// Stratified sample of m multi-indices: within every mode each grid
/// value appears either floor(m / N_i) or ceil(m / N_i) times, with
/// the order shuffled independently per mode. Requires m >= max(N_i)
/// so every value is seen at least once. Deterministic in the seed.
std::vector<MultiIndex> lhs_indices(const std::vector<int>& dims, int m,
                                    std::uint64_t seed);

/// m multi-indices drawn independently and uniformly over the grid.
std::vector<MultiIndex> random_indices(const std::vector<int>& dims, int m,
                                       std::uint64_t seed);

/// Scattered observations of a function on a grid.
struct Dataset {
  std::vector<MultiIndex> idxs;
  std::vector<double> ys;
  /// Standard deviation of the multiplicative noise applied to ys,
  /// 0 when the values are exact.
  double noise_sigma = 0.0;
};

/// Evaluates fn at every indexed grid point. With n_threads > 1 the
/// evaluations are split across threads; results are written by
/// sample position, so the output is identical to the sequential one.
/// A non-finite value raises std::runtime_error naming the sample.
Dataset build_dataset(const std::function<double(const std::vector<double>&)>& fn,
                      const Grid& grid, const std::vector<MultiIndex>& idxs,
                      int n_threads = 1);

/// Multiplies every value by (1 + sigma * z) with z standard normal.
/// sigma = 0 returns the input unchanged. Indices are not touched.
Dataset add_noise(const Dataset& data, double sigma, std::uint64_t seed);

}  // namespace ttfit
