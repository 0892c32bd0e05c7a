#include "ttfit/tt_tensor.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ttfit {

TtTensor::TtTensor(std::vector<TtCore> cores) : cores_(std::move(cores)) {
  if (cores_.empty())
    throw std::invalid_argument("tensor train needs at least one core");
  const int d = static_cast<int>(cores_.size());
  if (cores_.front().r_left != 1)
    throw std::invalid_argument("first core must have left rank 1, got " +
                                std::to_string(cores_.front().r_left));
  if (cores_.back().r_right != 1)
    throw std::invalid_argument("last core must have right rank 1, got " +
                                std::to_string(cores_.back().r_right));
  for (int k = 0; k < d; ++k) {
    const TtCore& c = cores_[k];
    if (c.r_left < 1 || c.n < 1 || c.r_right < 1)
      throw std::invalid_argument("core " + std::to_string(k) +
                                  " has a non-positive extent");
    const std::size_t want =
        static_cast<std::size_t>(c.r_left) * c.n * c.r_right;
    if (c.v.size() != want)
      throw std::invalid_argument(
          "core " + std::to_string(k) + " stores " +
          std::to_string(c.v.size()) + " values, shape needs " +
          std::to_string(want));
    if (k + 1 < d && c.r_right != cores_[k + 1].r_left)
      throw std::invalid_argument(
          "rank mismatch between cores " + std::to_string(k) + " and " +
          std::to_string(k + 1) + ": " + std::to_string(c.r_right) +
          " vs " + std::to_string(cores_[k + 1].r_left));
    for (double x : c.v)
      if (!std::isfinite(x))
        throw std::invalid_argument("core " + std::to_string(k) +
                                    " contains a non-finite value");
  }
}

std::vector<int> TtTensor::dims() const {
  std::vector<int> out(cores_.size());
  for (std::size_t k = 0; k < cores_.size(); ++k) out[k] = cores_[k].n;
  return out;
}

std::vector<int> TtTensor::ranks() const {
  std::vector<int> out(cores_.size() + 1);
  out[0] = 1;
  for (std::size_t k = 0; k < cores_.size(); ++k) out[k + 1] = cores_[k].r_right;
  return out;
}

namespace {

void check_index(const TtTensor& t, const MultiIndex& idx) {
  if (static_cast<int>(idx.size()) != t.order())
    throw std::invalid_argument(
        "multi-index has " + std::to_string(idx.size()) +
        " entries, tensor has order " + std::to_string(t.order()));
  for (int k = 0; k < t.order(); ++k)
    if (idx[k] < 0 || idx[k] >= t.core(k).n)
      throw std::invalid_argument(
          "index " + std::to_string(idx[k]) + " out of range for mode " +
          std::to_string(k) + " of size " + std::to_string(t.core(k).n));
}

// Left-to-right product of the selected core slices. `work` and `next`
// are scratch buffers sized to the largest rank.
double eval_entry(const TtTensor& t, const MultiIndex& idx,
                  std::vector<double>& work, std::vector<double>& next) {
  work.assign(1, 1.0);
  for (int k = 0; k < t.order(); ++k) {
    const TtCore& c = t.core(k);
    next.assign(c.r_right, 0.0);
    for (int a = 0; a < c.r_left; ++a) {
      const double wa = work[a];
      for (int b = 0; b < c.r_right; ++b)
        next[b] += wa * c.at(a, idx[k], b);
    }
    std::swap(work, next);
  }
  return work[0];
}

}  // namespace

double tt_get(const TtTensor& t, const MultiIndex& idx) {
  check_index(t, idx);
  std::vector<double> work, next;
  return eval_entry(t, idx, work, next);
}

std::vector<double> tt_get_many(const TtTensor& t,
                                const std::vector<MultiIndex>& idxs) {
  std::vector<double> out(idxs.size());
  std::vector<double> work, next;
  for (std::size_t i = 0; i < idxs.size(); ++i) {
    check_index(t, idxs[i]);
    out[i] = eval_entry(t, idxs[i], work, next);
  }
  return out;
}

TtTensor tt_random(const std::vector<int>& dims, int rank,
                   std::uint64_t seed) {
  if (dims.empty())
    throw std::invalid_argument("tt_random needs at least one mode");
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (dims[k] < 1)
      throw std::invalid_argument("mode " + std::to_string(k) +
                                  " has non-positive size");
  if (rank < 1) throw std::invalid_argument("rank must be positive");

  const int d = static_cast<int>(dims.size());
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TtCore> cores;
  cores.reserve(d);
  for (int k = 0; k < d; ++k) {
    const int rl = (k == 0) ? 1 : rank;
    const int rr = (k == d - 1) ? 1 : rank;
    TtCore c(rl, dims[k], rr);
    for (double& x : c.v) x = normal(gen);
    cores.push_back(std::move(c));
  }
  return TtTensor(std::move(cores));
}

FullTensor tt_to_full(const TtTensor& t, std::size_t max_entries) {
  const std::vector<int> dims = t.dims();
  std::size_t count = 1;
  for (int n : dims) {
    if (count > max_entries / static_cast<std::size_t>(n))
      throw std::length_error(
          "tensor has more than " + std::to_string(max_entries) +
          " entries, refusing to materialize");
    count *= static_cast<std::size_t>(n);
  }

  FullTensor full;
  full.dims = dims;
  full.values.resize(count);
  MultiIndex idx(dims.size(), 0);
  std::vector<double> work, next;
  for (std::size_t flat = 0; flat < count; ++flat) {
    full.values[flat] = eval_entry(t, idx, work, next);
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
  return full;
}

double relative_error(std::span<const double> pred,
                      std::span<const double> truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument(
        "length mismatch: " + std::to_string(pred.size()) + " vs " +
        std::to_string(truth.size()));
  if (truth.empty()) throw std::invalid_argument("empty input");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double diff = pred[i] - truth[i];
    num += diff * diff;
    den += truth[i] * truth[i];
  }
  if (den == 0.0)
    throw std::invalid_argument("reference vector has zero norm");
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace ttfit
