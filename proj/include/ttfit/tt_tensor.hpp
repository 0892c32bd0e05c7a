#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ttfit/util.hpp"

namespace ttfit {

/// One tensor-train core: a 3-dimensional array of shape
/// (r_left, n, r_right), stored contiguously with the left rank index
/// slowest and the right rank index fastest.
struct TtCore {
  int r_left = 1;
  int n = 1;
  int r_right = 1;
  std::vector<double> v;

  TtCore() = default;
  TtCore(int rl, int n_, int rr)
      : r_left(rl), n(n_), r_right(rr),
        v(static_cast<std::size_t>(rl) * n_ * rr, 0.0) {}

  double at(int a, int j, int b) const {
    return v[(static_cast<std::size_t>(a) * n + j) * r_right + b];
  }
  double& at(int a, int j, int b) {
    return v[(static_cast<std::size_t>(a) * n + j) * r_right + b];
  }
};

/// A tensor of order d held in the tensor-train format: a chain of d
/// cores whose bond ranks agree pairwise, with rank 1 at both ends.
/// An entry of the represented tensor is the product of one matrix
/// slice per core, selected by the entry's multi-index.
class TtTensor {
 public:
  /// Takes ownership of the core chain. Throws std::invalid_argument
  /// if the chain is empty, a boundary rank differs from 1, adjacent
  /// cores disagree on their shared rank, a core has a non-positive
  /// extent, a core's storage size does not match its shape, or any
  /// stored value is not finite.
  explicit TtTensor(std::vector<TtCore> cores);

  int order() const { return static_cast<int>(cores_.size()); }

  /// Mode sizes (N_1, ..., N_d).
  std::vector<int> dims() const;

  /// Bond ranks (R_0, ..., R_d) of length d+1; first and last are 1.
  std::vector<int> ranks() const;

  const TtCore& core(int k) const { return cores_[k]; }
  TtCore& core(int k) { return cores_[k]; }

 private:
  std::vector<TtCore> cores_;
};

/// Evaluates one entry of the represented tensor. The multi-index is
/// zero based; length or range violations throw std::invalid_argument
/// naming the offending mode.
double tt_get(const TtTensor& t, const MultiIndex& idx);

/// Evaluates a batch of entries; result[i] corresponds to idxs[i].
std::vector<double> tt_get_many(const TtTensor& t,
                                const std::vector<MultiIndex>& idxs);

/// Random tensor train with all internal bond ranks equal to `rank`
/// and entries drawn i.i.d. from the standard normal distribution.
/// Deterministic for a fixed (dims, rank, seed) triple.
TtTensor tt_random(const std::vector<int>& dims, int rank,
                   std::uint64_t seed);

/// Dense tensor in row-major order (last mode fastest).
struct FullTensor {
  std::vector<int> dims;
  std::vector<double> values;
};

/// Materializes every entry. Throws std::length_error, stating the
/// requested entry count, if the tensor has more than max_entries.
FullTensor tt_to_full(const TtTensor& t,
                      std::size_t max_entries = 10'000'000);

/// || pred - truth ||_2 / || truth ||_2. Throws std::invalid_argument
/// on length mismatch, empty input, or a zero-norm truth vector.
double relative_error(std::span<const double> pred,
                      std::span<const double> truth);

}  // namespace ttfit
