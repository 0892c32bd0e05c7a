#include "ttfit/als.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ttfit {

namespace {

// Relative singular value floor below which the normal-equations path
// cannot resolve the spectrum (squared conditioning); smaller kept
// values trigger the exact singular value decomposition instead.
constexpr double kGramFloor = 1e-7;

void check_config(const AlsConfig& cfg) {
  if (cfg.sweeps < 1)
    throw std::invalid_argument("sweep count must be at least 1, got " +
                                std::to_string(cfg.sweeps));
  if (cfg.stop_delta < 0.0)
    throw std::invalid_argument("stop threshold must be non-negative");
  if (cfg.ls_cutoff < 0.0 || cfg.ls_cutoff >= 1.0)
    throw std::invalid_argument("singular value cutoff must lie in [0, 1)");
}

void check_data(const TtTensor& t, const std::vector<MultiIndex>& idxs,
                const std::vector<double>& ys) {
  if (idxs.size() != ys.size())
    throw std::invalid_argument(
        "index count " + std::to_string(idxs.size()) +
        " does not match value count " + std::to_string(ys.size()));
  if (ys.empty()) throw std::invalid_argument("no samples");
  const int d = t.order();
  for (const MultiIndex& idx : idxs) {
    if (static_cast<int>(idx.size()) != d)
      throw std::invalid_argument(
          "multi-index length differs from tensor order");
    for (int k = 0; k < d; ++k)
      if (idx[k] < 0 || idx[k] >= t.core(k).n)
        throw std::invalid_argument(
            "index " + std::to_string(idx[k]) + " out of range for mode " +
            std::to_string(k) + " of size " + std::to_string(t.core(k).n));
  }
}

// Re-fits core i of t in place. lefts(m) and rights(m) must return
// pointers to the interface vectors of sample m, of lengths r_left
// and r_right of that core.
template <class LeftFn, class RightFn>
void update_core_impl(TtTensor& t, int i, const std::vector<MultiIndex>& idxs,
                      const std::vector<double>& ys, const AlsConfig& cfg,
                      LeftFn&& lefts, RightFn&& rights) {
  TtCore& c = t.core(i);
  const int rl = c.r_left;
  const int rr = c.r_right;
  const int cols = rl * rr;

  std::vector<std::vector<int>> groups(c.n);
  for (std::size_t m = 0; m < idxs.size(); ++m)
    groups[idxs[m][i]].push_back(static_cast<int>(m));

  std::vector<double> a, b;
  for (int j = 0; j < c.n; ++j) {
    const std::vector<int>& members = groups[j];
    if (members.empty())
      throw std::runtime_error("grid value " + std::to_string(j) +
                               " of mode " + std::to_string(i) +
                               " was never observed");
    const int rows = static_cast<int>(members.size());
    if (rows < cols) {
      if (cfg.min_rows == MinRowsPolicy::kSkipSlice) continue;
      throw std::runtime_error(
          "slice " + std::to_string(j) + " of core " + std::to_string(i) +
          " has " + std::to_string(rows) + " samples for " +
          std::to_string(cols) + " unknowns");
    }

    a.resize(static_cast<std::size_t>(rows) * cols);
    b.resize(rows);
    for (int k = 0; k < rows; ++k) {
      const int m = members[k];
      const double* gl = lefts(m);
      const double* gr = rights(m);
      double* row = &a[static_cast<std::size_t>(k) * cols];
      for (int p = 0; p < rl; ++p)
        for (int q = 0; q < rr; ++q) row[p * rr + q] = gl[p] * gr[q];
      b[k] = ys[m];
    }

    const std::vector<double> g =
        least_squares_min_norm(a, rows, cols, b, cfg.ls_cutoff);

    // With the cutoff the solution is only the slice minimizer up to
    // truncation and rounding, and on an ill-conditioned slice it can
    // lose to the coefficients already in place. Keeping the better
    // of the two makes every update non-increasing in the training
    // objective.
    double res_new = 0.0, res_old = 0.0;
    for (int k = 0; k < rows; ++k) {
      const double* row = &a[static_cast<std::size_t>(k) * cols];
      double pn = 0.0, po = 0.0;
      for (int p = 0; p < rl; ++p)
        for (int q = 0; q < rr; ++q) {
          pn += row[p * rr + q] * g[p * rr + q];
          po += row[p * rr + q] * c.at(p, j, q);
        }
      res_new += (pn - b[k]) * (pn - b[k]);
      res_old += (po - b[k]) * (po - b[k]);
    }
    if (res_new <= res_old)
      for (int p = 0; p < rl; ++p)
        for (int q = 0; q < rr; ++q) c.at(p, j, q) = g[p * rr + q];
  }
}

}  // namespace

std::vector<double> interface_left(const TtTensor& t, const MultiIndex& idx,
                                   int i) {
  if (static_cast<int>(idx.size()) != t.order())
    throw std::invalid_argument("multi-index length differs from tensor order");
  if (i < 0 || i > t.order())
    throw std::invalid_argument("core position out of range");
  std::vector<double> v(1, 1.0), next;
  for (int k = 0; k < i; ++k) {
    const TtCore& c = t.core(k);
    if (idx[k] < 0 || idx[k] >= c.n)
      throw std::invalid_argument(
          "index " + std::to_string(idx[k]) + " out of range for mode " +
          std::to_string(k) + " of size " + std::to_string(c.n));
    next.assign(c.r_right, 0.0);
    for (int a = 0; a < c.r_left; ++a) {
      const double va = v[a];
      for (int b = 0; b < c.r_right; ++b) next[b] += va * c.at(a, idx[k], b);
    }
    std::swap(v, next);
  }
  return v;
}

std::vector<double> interface_right(const TtTensor& t, const MultiIndex& idx,
                                    int i) {
  if (static_cast<int>(idx.size()) != t.order())
    throw std::invalid_argument("multi-index length differs from tensor order");
  if (i < -1 || i >= t.order())
    throw std::invalid_argument("core position out of range");
  std::vector<double> v(1, 1.0), next;
  for (int k = t.order() - 1; k > i; --k) {
    const TtCore& c = t.core(k);
    if (idx[k] < 0 || idx[k] >= c.n)
      throw std::invalid_argument(
          "index " + std::to_string(idx[k]) + " out of range for mode " +
          std::to_string(k) + " of size " + std::to_string(c.n));
    next.assign(c.r_left, 0.0);
    for (int a = 0; a < c.r_left; ++a) {
      double s = 0.0;
      for (int b = 0; b < c.r_right; ++b) s += c.at(a, idx[k], b) * v[b];
      next[a] = s;
    }
    std::swap(v, next);
  }
  return v;
}

std::vector<double> build_ls_row(const std::vector<double>& g_left,
                                 const std::vector<double>& g_right) {
  if (g_left.empty() || g_right.empty())
    throw std::invalid_argument("interface vectors must be non-empty");
  std::vector<double> row(g_left.size() * g_right.size());
  for (std::size_t p = 0; p < g_left.size(); ++p)
    for (std::size_t q = 0; q < g_right.size(); ++q)
      row[p * g_right.size() + q] = g_left[p] * g_right[q];
  return row;
}

std::vector<double> least_squares_min_norm(const std::vector<double>& a,
                                           int rows, int cols,
                                           const std::vector<double>& b,
                                           double cutoff) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("system must have positive extents");
  if (a.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("matrix storage does not match its shape");
  if (b.size() != static_cast<std::size_t>(rows))
    throw std::invalid_argument("right-hand side length does not match");
  if (cutoff < 0.0 || cutoff >= 1.0)
    throw std::invalid_argument("singular value cutoff must lie in [0, 1)");

  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> A(a.data(), rows, cols);
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), rows);

  // Fast path: eigendecomposition of the normal equations. Its squared
  // conditioning cannot resolve singular values below about the square
  // root of machine precision, so if any retained one sits under that
  // floor the exact (and slower) decomposition of A itself is used.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(cols, cols);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition of the normal matrix failed");

  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double lam_max = std::max(lam.maxCoeff(), 0.0);
  const double smax = std::sqrt(lam_max);
  if (smax == 0.0) return std::vector<double>(cols, 0.0);

  bool gram_ok = true;
  for (int k = 0; k < cols; ++k) {
    const double s = std::sqrt(std::max(lam[k], 0.0));
    if (s > cutoff * smax && s < kGramFloor * smax) {
      gram_ok = false;
      break;
    }
  }

  Eigen::VectorXd x;
  if (gram_ok) {
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::VectorXd atb = A.transpose() * bv;
    x = Eigen::VectorXd::Zero(cols);
    for (int k = 0; k < cols; ++k) {
      const double s = std::sqrt(std::max(lam[k], 0.0));
      if (s > cutoff * smax) x += q.col(k) * (q.col(k).dot(atb) / lam[k]);
    }
    // One refinement step recovers most of the accuracy lost to the
    // squared conditioning of the normal equations.
    Eigen::VectorXd atr = A.transpose() * (bv - A * x);
    for (int k = 0; k < cols; ++k) {
      const double s = std::sqrt(std::max(lam[k], 0.0));
      if (s > cutoff * smax) x += q.col(k) * (q.col(k).dot(atr) / lam[k]);
    }
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv[0] : 0.0;
    x = Eigen::VectorXd::Zero(cols);
    for (int k = 0; k < sv.size(); ++k)
      if (sv[k] > cutoff * top)
        x += svd.matrixV().col(k) *
             (svd.matrixU().col(k).dot(bv) / sv[k]);
  }

  return std::vector<double>(x.data(), x.data() + cols);
}

void als_update_core(TtTensor& t, int i, const std::vector<MultiIndex>& idxs,
                     const std::vector<double>& ys, const AlsConfig& cfg) {
  check_config(cfg);
  check_data(t, idxs, ys);
  if (i < 0 || i >= t.order())
    throw std::invalid_argument("core position out of range");

  const int M = static_cast<int>(idxs.size());
  const int rl = t.core(i).r_left;
  const int rr = t.core(i).r_right;
  std::vector<double> lefts(static_cast<std::size_t>(M) * rl);
  std::vector<double> rights(static_cast<std::size_t>(M) * rr);
  for (int m = 0; m < M; ++m) {
    const std::vector<double> gl = interface_left(t, idxs[m], i);
    const std::vector<double> gr = interface_right(t, idxs[m], i);
    std::copy(gl.begin(), gl.end(), lefts.begin() + static_cast<std::size_t>(m) * rl);
    std::copy(gr.begin(), gr.end(), rights.begin() + static_cast<std::size_t>(m) * rr);
  }
  update_core_impl(
      t, i, idxs, ys, cfg,
      [&](int m) { return &lefts[static_cast<std::size_t>(m) * rl]; },
      [&](int m) { return &rights[static_cast<std::size_t>(m) * rr]; });
}

AlsReport als_run(const TtTensor& init, const std::vector<MultiIndex>& idxs,
                  const std::vector<double>& ys, const AlsConfig& cfg) {
  check_config(cfg);
  check_data(init, idxs, ys);

  TtTensor t = init;
  const int d = t.order();
  const std::size_t M = idxs.size();

  // Cached interface products per sample: left[i] holds the row
  // vectors entering core i from the left (M x r_left(i), sample
  // major), right[i] the column vectors from the right (M x
  // r_right(i)). Updated incrementally along each sweep with exactly
  // the recurrence of interface_left / interface_right.
  std::vector<std::vector<double>> left(d), right(d);
  left[0].assign(M, 1.0);
  right[d - 1].assign(M, 1.0);

  auto refresh_left = [&](int i) {
    // left[i + 1] from left[i] through core i
    const TtCore& c = t.core(i);
    left[i + 1].resize(M * static_cast<std::size_t>(c.r_right));
    for (std::size_t m = 0; m < M; ++m) {
      const double* src = &left[i][m * static_cast<std::size_t>(c.r_left)];
      double* dst = &left[i + 1][m * static_cast<std::size_t>(c.r_right)];
      const int j = idxs[m][i];
      for (int b = 0; b < c.r_right; ++b) dst[b] = 0.0;
      for (int a = 0; a < c.r_left; ++a) {
        const double va = src[a];
        for (int b = 0; b < c.r_right; ++b) dst[b] += va * c.at(a, j, b);
      }
    }
  };
  auto refresh_right = [&](int i) {
    // right[i - 1] from right[i] through core i
    const TtCore& c = t.core(i);
    right[i - 1].resize(M * static_cast<std::size_t>(c.r_left));
    for (std::size_t m = 0; m < M; ++m) {
      const double* src = &right[i][m * static_cast<std::size_t>(c.r_right)];
      double* dst = &right[i - 1][m * static_cast<std::size_t>(c.r_left)];
      const int j = idxs[m][i];
      for (int a = 0; a < c.r_left; ++a) {
        double s = 0.0;
        for (int b = 0; b < c.r_right; ++b) s += c.at(a, j, b) * src[b];
        dst[a] = s;
      }
    }
  };
  for (int i = d - 1; i >= 1; --i) refresh_right(i);

  auto update = [&](int i) {
    const int rl = t.core(i).r_left;
    const int rr = t.core(i).r_right;
    update_core_impl(
        t, i, idxs, ys, cfg,
        [&](int m) { return &left[i][static_cast<std::size_t>(m) * rl]; },
        [&](int m) { return &right[i][static_cast<std::size_t>(m) * rr]; });
  };

  std::vector<double> errors;
  int sweeps_run = 0;
  bool converged = false;

  std::vector<TtCore> snapshot;
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    if (cfg.stop_delta > 0.0) {
      snapshot.clear();
      for (int i = 0; i < d; ++i) snapshot.push_back(t.core(i));
    }

    for (int i = 0; i < d; ++i) {
      update(i);
      if (i + 1 < d) refresh_left(i);
    }
    for (int i = d - 1; i >= 0; --i) {
      update(i);
      if (i >= 1) refresh_right(i);
    }

    const std::vector<double> pred = tt_get_many(t, idxs);
    errors.push_back(relative_error(pred, ys));
    sweeps_run = sweep + 1;

    if (cfg.stop_delta > 0.0) {
      double change = 0.0;
      for (int i = 0; i < d; ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < snapshot[i].v.size(); ++k) {
          const double diff = t.core(i).v[k] - snapshot[i].v[k];
          num += diff * diff;
          den += snapshot[i].v[k] * snapshot[i].v[k];
        }
        const double rel = den > 0.0
                               ? std::sqrt(num) / std::sqrt(den)
                               : (num > 0.0 ? 1.0 : 0.0);
        change = std::max(change, rel);
      }
      if (change < cfg.stop_delta) {
        converged = true;
        break;
      }
    }
  }
  return AlsReport{std::move(t), std::move(errors), sweeps_run, converged};
}

}  // namespace ttfit
