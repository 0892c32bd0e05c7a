#include "ttfit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace ttfit {

Grid uniform_grid(const std::vector<std::pair<double, double>>& bounds,
                  int n) {
  if (bounds.empty()) throw std::invalid_argument("empty box");
  if (n < 2)
    throw std::invalid_argument("grid needs at least 2 nodes per mode, got " +
                                std::to_string(n));
  Grid grid(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto [lo, hi] = bounds[i];
    if (!(lo < hi))
      throw std::invalid_argument("mode " + std::to_string(i) +
                                  " has an empty interval");
    grid[i].resize(n);
    for (int j = 0; j < n; ++j)
      grid[i][j] = lo + (hi - lo) * (static_cast<double>(j) / (n - 1));
    grid[i][0] = lo;
    grid[i][n - 1] = hi;
  }
  return grid;
}

std::vector<double> index_to_point(const Grid& grid, const MultiIndex& idx) {
  if (idx.size() != grid.size())
    throw std::invalid_argument("multi-index length differs from grid order");
  std::vector<double> x(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= static_cast<int>(grid[i].size()))
      throw std::invalid_argument(
          "index " + std::to_string(idx[i]) + " out of range for mode " +
          std::to_string(i) + " of size " + std::to_string(grid[i].size()));
    x[i] = grid[i][idx[i]];
  }
  return x;
}

std::vector<MultiIndex> lhs_indices(const std::vector<int>& dims, int m,
                                    std::uint64_t seed) {
  if (dims.empty()) throw std::invalid_argument("no modes");
  int max_dim = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1)
      throw std::invalid_argument("mode " + std::to_string(i) +
                                  " has non-positive size");
    max_dim = std::max(max_dim, dims[i]);
  }
  if (m < max_dim)
    throw std::invalid_argument(
        "sample count " + std::to_string(m) +
        " cannot cover every value of the largest mode (" +
        std::to_string(max_dim) + ")");

  std::mt19937_64 gen(seed);
  std::vector<MultiIndex> idxs(m, MultiIndex(dims.size()));
  std::vector<int> column(m);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    // Balanced value list: grid values round robin until m entries,
    // so per-value counts differ by at most one; then shuffled.
    for (int k = 0; k < m; ++k) column[k] = k % dims[i];
    std::shuffle(column.begin(), column.end(), gen);
    for (int k = 0; k < m; ++k) idxs[k][i] = column[k];
  }
  return idxs;
}

std::vector<MultiIndex> random_indices(const std::vector<int>& dims, int m,
                                       std::uint64_t seed) {
  if (dims.empty()) throw std::invalid_argument("no modes");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (dims[i] < 1)
      throw std::invalid_argument("mode " + std::to_string(i) +
                                  " has non-positive size");
  if (m < 0) throw std::invalid_argument("negative sample count");

  std::mt19937_64 gen(seed);
  std::vector<MultiIndex> idxs(m, MultiIndex(dims.size()));
  for (int k = 0; k < m; ++k)
    for (std::size_t i = 0; i < dims.size(); ++i) {
      std::uniform_int_distribution<int> pick(0, dims[i] - 1);
      idxs[k][i] = pick(gen);
    }
  return idxs;
}

Dataset build_dataset(
    const std::function<double(const std::vector<double>&)>& fn,
    const Grid& grid, const std::vector<MultiIndex>& idxs, int n_threads) {
  if (!fn) throw std::invalid_argument("missing evaluator");
  if (n_threads < 1) throw std::invalid_argument("thread count must be positive");

  for (const MultiIndex& idx : idxs) index_to_point(grid, idx);

  Dataset data;
  data.idxs = idxs;
  data.ys.resize(idxs.size());

  auto worker = [&](std::size_t begin, std::size_t end,
                    std::exception_ptr& err) {
    try {
      for (std::size_t k = begin; k < end; ++k)
        data.ys[k] = fn(index_to_point(grid, idxs[k]));
    } catch (...) {
      err = std::current_exception();
    }
  };

  const std::size_t n = idxs.size();
  if (n_threads == 1 || n < 2 * static_cast<std::size_t>(n_threads)) {
    std::exception_ptr err;
    worker(0, n, err);
    if (err) std::rethrow_exception(err);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(n_threads);
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      if (begin < end)
        pool.emplace_back(worker, begin, end, std::ref(errs[w]));
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& err : errs)
      if (err) std::rethrow_exception(err);
  }

  for (std::size_t k = 0; k < n; ++k)
    if (!std::isfinite(data.ys[k]))
      throw std::runtime_error("evaluation of sample " + std::to_string(k) +
                               " is not finite");
  return data;
}

Dataset add_noise(const Dataset& data, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise level must be non-negative");
  Dataset out = data;
  if (sigma == 0.0) return out;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& y : out.ys) y *= 1.0 + sigma * normal(gen);
  out.noise_sigma = sigma;
  return out;
}

}  // namespace ttfit
