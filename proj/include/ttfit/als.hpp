#pragma once

#include <string>
#include <vector>

#include "ttfit/tt_tensor.hpp"
#include "ttfit/util.hpp"

namespace ttfit {

/// What to do when a core slice has fewer samples than unknowns.
enum class MinRowsPolicy { kError, kSkipSlice };

struct AlsConfig {
  int sweeps = 50;
  /// Early-stop threshold on the largest relative Frobenius change of
  /// any core over one sweep; 0 disables early stopping.
  double stop_delta = 0.0;
  /// Relative singular value cutoff of the minimum-norm least-squares
  /// solves; must lie in [0, 1).
  double ls_cutoff = 1e-12;
  MinRowsPolicy min_rows = MinRowsPolicy::kError;
};

struct AlsReport {
  TtTensor tensor;
  /// Training relative error after each completed sweep.
  std::vector<double> train_error_per_sweep;
  int sweeps_run = 0;
  bool converged = false;
};

/// Row vector carried into core i from the left: the product of the
/// slices of cores 0..i-1 selected by idx, of length ranks()[i].
/// For i = 0 this is the scalar chain [1]; i may be the order itself,
/// giving the full product as a length-1 vector.
std::vector<double> interface_left(const TtTensor& t, const MultiIndex& idx,
                                   int i);

/// Column vector carried into core i from the right: the product of
/// the slices of cores i+1..d-1, of length ranks()[i+1]. For the last
/// core this is [1]; i may be -1, giving the full product.
std::vector<double> interface_right(const TtTensor& t, const MultiIndex& idx,
                                    int i);

/// One least-squares row: the Kronecker product of the two interface
/// vectors, laid out with the left factor slowest. Matches the
/// row-major flattening of a core slice.
std::vector<double> build_ls_row(const std::vector<double>& g_left,
                                 const std::vector<double>& g_right);

/// Minimum-norm least-squares solution of the rows x cols system
/// a x = b, a given row-major. Singular values at or below
/// cutoff * (largest singular value) are discarded.
std::vector<double> least_squares_min_norm(const std::vector<double>& a,
                                           int rows, int cols,
                                           const std::vector<double>& b,
                                           double cutoff);

/// Re-fits every slice of core i of t, in place, holding all other
/// cores fixed: each slice solves the minimum-norm least-squares
/// system whose rows are Kronecker products of the sample interface
/// vectors. Samples must cover every grid value of mode i; a slice
/// with fewer samples than unknowns follows cfg.min_rows.
void als_update_core(TtTensor& t, int i, const std::vector<MultiIndex>& idxs,
                     const std::vector<double>& ys, const AlsConfig& cfg);

/// Alternating least squares from the given initial guess. One sweep
/// updates cores left to right and then right to left; the training
/// error is recorded after each sweep and never increases. Interface
/// products are cached and updated incrementally, which reproduces
/// the direct per-core computation bit for bit.
AlsReport als_run(const TtTensor& init, const std::vector<MultiIndex>& idxs,
                  const std::vector<double>& ys, const AlsConfig& cfg);

}  // namespace ttfit
