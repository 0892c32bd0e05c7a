#pragma once

#include <cstdint>
#include <vector>

#include "ttfit/tt_tensor.hpp"
#include "ttfit/util.hpp"

namespace ttfit {

/// First-order analysis-of-variance decomposition of scattered samples
/// on a grid: a global mean plus one centered univariate effect per
/// mode. terms[i][j] is the effect of grid value j in mode i, counts
/// keeps how many samples hit each value. The count-weighted sum of
/// each mode's effects is zero by construction.
struct AnovaModel {
  std::vector<int> dims;
  double f0 = 0.0;
  std::vector<std::vector<double>> terms;
  std::vector<std::vector<int>> counts;
};

/// Fits the model from sample indices and values: f0 is the sample
/// mean, terms[i][j] the mean over samples with index j in mode i
/// minus f0. Every grid value of every mode must be observed at least
/// once; an unobserved value raises std::runtime_error naming it.
/// Bucket values are summed in sorted order, so the fit is invariant
/// under any permutation of the samples, bit for bit.
AnovaModel fit_anova(const std::vector<MultiIndex>& idxs,
                     const std::vector<double>& ys,
                     const std::vector<int>& dims);

/// f0 plus the selected effect of each mode.
double anova_eval(const AnovaModel& m, const MultiIndex& idx);

/// Encodes the model as a tensor train with all internal bond ranks
/// equal to `rank` (rank >= 2 required; a one-mode model collapses to
/// a single core with ranks (1, 1)). The first 2x2 rank block of each
/// core carries the model exactly; the remaining entries are filled
/// with centered normal noise of standard deviation noise_scale so
/// that later rank-adaptive fitting can leave the encoded subspace.
/// With noise_scale = 0 the train reproduces anova_eval exactly.
TtTensor anova_to_tt(const AnovaModel& m, int rank, double noise_scale,
                     std::uint64_t seed);

}  // namespace ttfit
