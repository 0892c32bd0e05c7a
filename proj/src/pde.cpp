#include "ttfit/pde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ttfit {

namespace {

void check_config(const PdeConfig& cfg) {
  if (cfg.n < 16)
    throw std::invalid_argument("mesh needs at least 16 interior points, got " +
                                std::to_string(cfg.n));
  if (!(cfg.cg_tol > 0.0))
    throw std::invalid_argument("solver tolerance must be positive");
  if (cfg.cg_max_iter < 1)
    throw std::invalid_argument("iteration budget must be positive");
}

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

// Sum of a(i,j) * b(i,j) with the (i,j) / (j,i) pairs grouped, so the
// value is unchanged, bit for bit, when both fields are transposed.
double sym_dot(const std::vector<double>& a, const std::vector<double>& b,
               int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += a[static_cast<std::size_t>(i) * n + i] *
         b[static_cast<std::size_t>(i) * n + i];
    for (int j = i + 1; j < n; ++j)
      s += a[static_cast<std::size_t>(i) * n + j] *
               b[static_cast<std::size_t>(i) * n + j] +
           a[static_cast<std::size_t>(j) * n + i] *
               b[static_cast<std::size_t>(j) * n + i];
  }
  return s;
}

double sym_sum(const std::vector<double>& a, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += a[static_cast<std::size_t>(i) * n + i];
    for (int j = i + 1; j < n; ++j)
      s += a[static_cast<std::size_t>(i) * n + j] +
           a[static_cast<std::size_t>(j) * n + i];
  }
  return s;
}

}  // namespace

DiskLayout make_disk_layout(int m) {
  if (m < 1) throw std::invalid_argument("disk grid needs m >= 1");
  DiskLayout layout;
  layout.m = m;
  layout.rho = 1.0 / (4.0 * m + 2.0);
  const double q = (1.0 - 2.0 * m * layout.rho) / (m + 1.0);
  layout.centers.resize(static_cast<std::size_t>(m) * m);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j) {
      const double cx = i * q + (2.0 * i - 1.0) * layout.rho;
      const double cy = j * q + (2.0 * j - 1.0) * layout.rho;
      layout.centers[static_cast<std::size_t>(i - 1) * m + (j - 1)] = {cx, cy};
    }
  return layout;
}

double coefficient(const DiskLayout& layout, const std::vector<double>& p,
                   double x, double y) {
  if (p.size() != layout.centers.size())
    throw std::invalid_argument(
        "parameter vector has " + std::to_string(p.size()) +
        " entries, layout has " + std::to_string(layout.centers.size()) +
        " disks");
  const double r2 = layout.rho * layout.rho;
  for (std::size_t mu = 0; mu < layout.centers.size(); ++mu) {
    const double dx = x - layout.centers[mu].first;
    const double dy = y - layout.centers[mu].second;
    if (dx * dx + dy * dy <= r2) return p[mu];
  }
  return 1.0;
}

DiffusionOperator::DiffusionOperator(const std::vector<double>& p,
                                     const PdeConfig& cfg, int m) {
  check_config(cfg);
  const DiskLayout layout = make_disk_layout(m);
  if (p.size() != layout.centers.size())
    throw std::invalid_argument(
        "parameter vector has " + std::to_string(p.size()) +
        " entries, expected " + std::to_string(layout.centers.size()));
  for (std::size_t mu = 0; mu < p.size(); ++mu)
    if (!(p[mu] > 0.0) || !std::isfinite(p[mu]))
      throw std::invalid_argument("conductivity " + std::to_string(mu) +
                                  " must be positive and finite");

  n_ = cfg.n;
  h_ = 1.0 / (n_ + 1);

  // Conductivity at every mesh point including the boundary ring.
  const int nn = n_ + 2;
  std::vector<double> k(static_cast<std::size_t>(nn) * nn);
  for (int i = -1; i <= n_; ++i)
    for (int j = -1; j <= n_; ++j)
      k[static_cast<std::size_t>(i + 1) * nn + (j + 1)] =
          coefficient(layout, p, (i + 1) * h_, (j + 1) * h_);
  auto kat = [&](int i, int j) {
    return k[static_cast<std::size_t>(i + 1) * nn + (j + 1)];
  };

  kx_.resize(static_cast<std::size_t>(n_ + 1) * n_);
  ky_.resize(static_cast<std::size_t>(n_) * (n_ + 1));
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; j < n_; ++j)
      kx_[static_cast<std::size_t>(i) * n_ + j] =
          harmonic(kat(i - 1, j), kat(i, j));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= n_; ++j)
      ky_[static_cast<std::size_t>(i) * (n_ + 1) + j] =
          harmonic(kat(i, j - 1), kat(i, j));

  diag_.resize(static_cast<std::size_t>(n_) * n_);
  const double ih2 = 1.0 / (h_ * h_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double sx = kx_[static_cast<std::size_t>(i + 1) * n_ + j] +
                        kx_[static_cast<std::size_t>(i) * n_ + j];
      const double sy = ky_[static_cast<std::size_t>(i) * (n_ + 1) + j + 1] +
                        ky_[static_cast<std::size_t>(i) * (n_ + 1) + j];
      diag_[static_cast<std::size_t>(i) * n_ + j] = (sx + sy) * ih2;
    }
}

void DiffusionOperator::apply(const std::vector<double>& u,
                              std::vector<double>& out) const {
  const std::size_t size = static_cast<std::size_t>(n_) * n_;
  if (u.size() != size)
    throw std::invalid_argument("field size does not match the mesh");
  out.resize(size);
  const double ih2 = 1.0 / (h_ * h_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const std::size_t c = static_cast<std::size_t>(i) * n_ + j;
      const double uc = u[c];
      const double ue = (i + 1 < n_) ? u[c + n_] : 0.0;
      const double uw = (i > 0) ? u[c - n_] : 0.0;
      const double un = (j + 1 < n_) ? u[c + 1] : 0.0;
      const double us = (j > 0) ? u[c - 1] : 0.0;
      const double sx =
          kx_[static_cast<std::size_t>(i + 1) * n_ + j] * (uc - ue) +
          kx_[static_cast<std::size_t>(i) * n_ + j] * (uc - uw);
      const double sy =
          ky_[static_cast<std::size_t>(i) * (n_ + 1) + j + 1] * (uc - un) +
          ky_[static_cast<std::size_t>(i) * (n_ + 1) + j] * (uc - us);
      out[c] = (sx + sy) * ih2;
    }
}

std::vector<double> solve_diffusion(const std::vector<double>& p,
                                    const PdeConfig& cfg) {
  const DiffusionOperator op(p, cfg);
  const int n = op.n();
  const std::size_t size = static_cast<std::size_t>(n) * n;

  const std::vector<double> b(size, 1.0);
  const double b_norm = std::sqrt(sym_dot(b, b, n));
  const double target = cfg.cg_tol * b_norm;

  std::vector<double> u(size, 0.0);
  std::vector<double> r(b);
  std::vector<double> z(size), q(size);

  auto precondition = [&](const std::vector<double>& in,
                          std::vector<double>& out) {
    if (cfg.jacobi) {
      const std::vector<double>& d = op.diagonal();
      for (std::size_t k = 0; k < size; ++k) out[k] = in[k] / d[k];
    } else {
      out = in;
    }
  };

  precondition(r, z);
  std::vector<double> dir(z);
  double rz = sym_dot(r, z, n);
  double res = std::sqrt(sym_dot(r, r, n));

  int iter = 0;
  while (res > target) {
    if (iter >= cfg.cg_max_iter)
      throw std::runtime_error(
          "conjugate gradients did not converge in " +
          std::to_string(cfg.cg_max_iter) + " iterations, residual " +
          std::to_string(res / b_norm) + " of the right-hand side");
    op.apply(dir, q);
    const double alpha = rz / sym_dot(dir, q, n);
    for (std::size_t k = 0; k < size; ++k) u[k] += alpha * dir[k];
    for (std::size_t k = 0; k < size; ++k) r[k] -= alpha * q[k];
    res = std::sqrt(sym_dot(r, r, n));
    precondition(r, z);
    const double rz_next = sym_dot(r, z, n);
    const double beta = rz_next / rz;
    for (std::size_t k = 0; k < size; ++k) dir[k] = z[k] + beta * dir[k];
    rz = rz_next;
    ++iter;
  }
  return u;
}

double pde_voi(const std::vector<double>& p, const PdeConfig& cfg) {
  const std::vector<double> u = solve_diffusion(p, cfg);
  const double h = 1.0 / (cfg.n + 1);
  return h * h * sym_sum(u, cfg.n);
}

Benchmark make_pde_benchmark(const PdeConfig& cfg) {
  check_config(cfg);
  Benchmark b;
  b.name = "pde-voi";
  b.d = 9;
  b.bounds.assign(9, {0.01, 1.0});
  b.eval = [cfg](const std::vector<double>& x) {
    if (x.size() != 9)
      throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                  " coordinates, benchmark expects 9");
    return pde_voi(x, cfg);
  };
  return b;
}

}  // namespace ttfit
