#pragma once

#include <utility>
#include <vector>

#include "ttfit/benchmarks.hpp"

namespace ttfit {

/// An m x m grid of equal disks inside the unit square. The radius is
/// 1/(4m+2) and the gap between disks and to the boundary is
/// q = (1 - 2m rho)/(m + 1), so the disks are pairwise disjoint and
/// strictly interior. Disk (i, j) (1-based row i along x, column j
/// along y) has the flat number (i-1)m + j.
struct DiskLayout {
  int m = 0;
  double rho = 0.0;
  std::vector<std::pair<double, double>> centers;
};

DiskLayout make_disk_layout(int m);

/// Piecewise-constant conductivity: p[mu] on disk mu (boundary circles
/// count as inside), 1 elsewhere.
double coefficient(const DiskLayout& layout, const std::vector<double>& p,
                   double x, double y);

struct PdeConfig {
  /// Interior mesh points per axis.
  int n = 127;
  /// Relative residual target of the conjugate gradient solver.
  double cg_tol = 1e-10;
  int cg_max_iter = 100000;
  /// Diagonal preconditioning; changes the iteration count, not the
  /// accuracy of the returned field (same residual target).
  bool jacobi = false;
};

/// Discrete diffusion operator -div(k grad u) on the interior mesh of
/// the unit square with zero boundary data: 5-point flux stencil with
/// harmonic-mean edge coefficients. The operator is symmetric positive
/// definite. Fields are stored row-major as u[i * n + j] where i
/// indexes x and j indexes y.
///
/// All reductions group the (i, j) / (j, i) entry pairs, so the whole
/// solve commutes with transposing the disk pattern bit for bit; the
/// advertised transpose invariance of the functional is exact, not
/// approximate.
class DiffusionOperator {
 public:
  DiffusionOperator(const std::vector<double>& p, const PdeConfig& cfg,
                    int m = 3);

  int n() const { return n_; }
  double h() const { return h_; }

  void apply(const std::vector<double>& u, std::vector<double>& out) const;

  /// Diagonal of the operator, for preconditioning.
  const std::vector<double>& diagonal() const { return diag_; }

 private:
  int n_ = 0;
  double h_ = 0.0;
  std::vector<double> kx_;  // (n+1) x n edge coefficients along x
  std::vector<double> ky_;  // n x (n+1) edge coefficients along y
  std::vector<double> diag_;
};

/// Solution field of -div(k(x, p) grad u) = 1 with zero Dirichlet
/// data, on the n x n interior mesh. Throws std::runtime_error with
/// the final residual if conjugate gradients does not reach cg_tol
/// within cg_max_iter iterations.
std::vector<double> solve_diffusion(const std::vector<double>& p,
                                    const PdeConfig& cfg);

/// Mean temperature: composite trapezoidal quadrature of the solution
/// over the unit square (boundary values are zero).
double pde_voi(const std::vector<double>& p, const PdeConfig& cfg);

/// The functional as a registered 9-parameter black box on
/// [0.01, 1]^9 (3 x 3 disks), named "pde-voi".
Benchmark make_pde_benchmark(const PdeConfig& cfg);

}  // namespace ttfit
