#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ttfit/als.hpp"
#include "ttfit/sampling.hpp"
#include "ttfit/tt_tensor.hpp"

using namespace ttfit;

namespace {

TtTensor two_by_two() {
  TtCore c1(1, 2, 2);
  c1.at(0, 0, 0) = 1; c1.at(0, 0, 1) = 2;
  c1.at(0, 1, 0) = 3; c1.at(0, 1, 1) = 4;
  TtCore c2(2, 2, 1);
  c2.at(0, 0, 0) = 5; c2.at(1, 0, 0) = 7;
  c2.at(0, 1, 0) = 6; c2.at(1, 1, 0) = 8;
  return TtTensor({c1, c2});
}

std::vector<MultiIndex> random_idxs(const std::vector<int>& dims, int m,
                                    std::uint64_t seed) {
  return random_indices(dims, m, seed);
}

// Reference minimum-norm least squares through the singular value
// decomposition of the matrix itself.
std::vector<double> svd_min_norm(const std::vector<double>& a, int rows,
                                 int cols, const std::vector<double>& b,
                                 double cutoff) {
  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> A(a.data(), rows, cols);
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), rows);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  for (int k = 0; k < sv.size(); ++k)
    if (top > 0.0 && sv[k] > cutoff * top)
      x += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(bv) / sv[k]);
  return {x.data(), x.data() + cols};
}

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> residual(const std::vector<double>& a, int rows, int cols,
                             const std::vector<double>& b,
                             const std::vector<double>& x) {
  std::vector<double> r(rows);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols; ++j)
      s += a[static_cast<std::size_t>(i) * cols + j] * x[j];
    r[i] = b[i] - s;
  }
  return r;
}

}  // namespace

TEST_CASE("interface vectors of the reference train") {
  const TtTensor t = two_by_two();
  CHECK(interface_left(t, {0, 0}, 0) == std::vector<double>{1.0});
  CHECK(interface_left(t, {0, 1}, 1) == std::vector<double>{1.0, 2.0});
  CHECK(interface_left(t, {1, 0}, 1) == std::vector<double>{3.0, 4.0});
  CHECK(interface_right(t, {0, 0}, 0) == std::vector<double>{5.0, 7.0});
  CHECK(interface_right(t, {0, 1}, 0) == std::vector<double>{6.0, 8.0});
  CHECK(interface_right(t, {0, 0}, 1) == std::vector<double>{1.0});
}

TEST_CASE("full-chain interfaces collapse to the entry") {
  std::vector<TtCore> cores;
  for (int k = 0; k < 4; ++k) {
    TtCore c(1, 2, 1);
    c.v = {1.0, 1.0};
    cores.push_back(c);
  }
  const TtTensor ones(std::move(cores));
  CHECK(interface_left(ones, {0, 0, 0, 0}, 4) == std::vector<double>{1.0});
  CHECK(interface_right(ones, {0, 0, 0, 0}, -1) == std::vector<double>{1.0});

  const TtTensor t = tt_random({3, 4, 5}, 3, 8);
  for (const MultiIndex& idx : random_idxs(t.dims(), 10, 2)) {
    CHECK(interface_left(t, idx, 3)[0] ==
          doctest::Approx(tt_get(t, idx)).epsilon(1e-14));
    CHECK(interface_right(t, idx, -1)[0] ==
          doctest::Approx(tt_get(t, idx)).epsilon(1e-14));
  }
}

TEST_CASE("interfaces sandwich the core slice to the entry") {
  const TtTensor t = tt_random({4, 3, 5, 2}, 3, 21);
  for (const MultiIndex& idx : random_idxs(t.dims(), 25, 3)) {
    for (int i = 0; i < t.order(); ++i) {
      const auto gl = interface_left(t, idx, i);
      const auto gr = interface_right(t, idx, i);
      const TtCore& c = t.core(i);
      double s = 0.0;
      for (int a = 0; a < c.r_left; ++a)
        for (int b = 0; b < c.r_right; ++b)
          s += gl[a] * c.at(a, idx[i], b) * gr[b];
      CHECK(s == doctest::Approx(tt_get(t, idx)).epsilon(1e-12));
    }
  }
}

TEST_CASE("least-squares rows are Kronecker products") {
  CHECK(build_ls_row({1.0}, {1.0}) == std::vector<double>{1.0});
  CHECK(build_ls_row({2.0, 3.0}, {5.0, 7.0}) ==
        std::vector<double>{10.0, 14.0, 15.0, 21.0});

  // the row contracted with a flattened slice equals the bilinear form
  std::mt19937_64 gen(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> gl(3), gr(4), slice(12);
  for (double& x : gl) x = normal(gen);
  for (double& x : gr) x = normal(gen);
  for (double& x : slice) x = normal(gen);
  const auto row = build_ls_row(gl, gr);
  double via_row = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) via_row += row[k] * slice[k];
  double direct = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 4; ++b) direct += gl[a] * slice[a * 4 + b] * gr[b];
  CHECK(via_row == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("minimum-norm solver matches the singular value reference") {
  std::mt19937_64 gen(314);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto check_system = [&](std::vector<double> a, int rows, int cols,
                          std::vector<double> b) {
    const auto x = least_squares_min_norm(a, rows, cols, b, 1e-12);
    const auto ref = svd_min_norm(a, rows, cols, b, 1e-12);
    const double scale = std::max(1.0, vec_norm(ref));
    for (int j = 0; j < cols; ++j)
      CHECK(std::abs(x[j] - ref[j]) <= 1e-7 * scale);
    CHECK(vec_norm(residual(a, rows, cols, b, x)) <=
          vec_norm(residual(a, rows, cols, b, ref)) + 1e-9 * vec_norm(b));
  };

  SUBCASE("well conditioned") {
    for (int trial = 0; trial < 5; ++trial) {
      const int rows = 60, cols = 12;
      std::vector<double> a(rows * cols), b(rows);
      for (double& x : a) x = normal(gen);
      for (double& x : b) x = normal(gen);
      check_system(a, rows, cols, b);
    }
  }

  SUBCASE("rank deficient: duplicated and zero columns") {
    const int rows = 50, cols = 10;
    std::vector<double> a(rows * cols), b(rows);
    for (double& x : a) x = normal(gen);
    for (double& x : b) x = normal(gen);
    for (int i = 0; i < rows; ++i) {
      a[static_cast<std::size_t>(i) * cols + 7] =
          a[static_cast<std::size_t>(i) * cols + 3];
      a[static_cast<std::size_t>(i) * cols + 9] = 0.0;
    }
    check_system(a, rows, cols, b);
    // the zero column must receive a zero coefficient
    const auto x = least_squares_min_norm(a, rows, cols, b, 1e-12);
    CHECK(x[9] == 0.0);
  }

  SUBCASE("ill conditioned scaling") {
    const int rows = 40, cols = 8;
    std::vector<double> a(rows * cols), b(rows);
    for (double& x : b) x = normal(gen);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        a[static_cast<std::size_t>(i) * cols + j] =
            normal(gen) * std::pow(10.0, -j);
    check_system(a, rows, cols, b);
  }

  SUBCASE("underdetermined") {
    const int rows = 5, cols = 9;
    std::vector<double> a(rows * cols), b(rows);
    for (double& x : a) x = normal(gen);
    for (double& x : b) x = normal(gen);
    const auto x = least_squares_min_norm(a, rows, cols, b, 1e-12);
    const auto ref = svd_min_norm(a, rows, cols, b, 1e-12);
    for (int j = 0; j < cols; ++j)
      CHECK(x[j] == doctest::Approx(ref[j]).epsilon(1e-8));
  }

  SUBCASE("zero matrix gives the zero solution") {
    const std::vector<double> a(20, 0.0);
    const std::vector<double> b(5, 1.0);
    CHECK(least_squares_min_norm(a, 5, 4, b, 1e-12) ==
          std::vector<double>(4, 0.0));
  }

  SUBCASE("large cutoff truncates hard") {
    // second singular direction is 1e-3 of the first; cutoff 1e-2
    // must discard it
    const int rows = 30, cols = 2;
    std::vector<double> a(rows * cols), b(rows);
    for (int i = 0; i < rows; ++i) {
      const double u = normal(gen);
      const double v = normal(gen);
      a[static_cast<std::size_t>(i) * cols] = u;
      a[static_cast<std::size_t>(i) * cols + 1] = 1e-3 * v;
      b[i] = normal(gen);
    }
    const auto x = least_squares_min_norm(a, rows, cols, b, 1e-2);
    const auto ref = svd_min_norm(a, rows, cols, b, 1e-2);
    CHECK(std::abs(x[0] - ref[0]) <= 1e-9 * std::max(1.0, std::abs(ref[0])));
    CHECK(std::abs(x[1] - ref[1]) <= 1e-9);
  }
}

TEST_CASE("solver input validation") {
  const std::vector<double> a{1.0, 2.0};
  CHECK_THROWS_AS(least_squares_min_norm(a, 2, 1, {1.0}, 1e-12),
                  std::invalid_argument);
  CHECK_THROWS_AS(least_squares_min_norm(a, 1, 2, {1.0}, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(least_squares_min_norm(a, 1, 2, {1.0}, -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(least_squares_min_norm(a, 0, 2, {}, 1e-12),
                  std::invalid_argument);
}

TEST_CASE("a core update keeps an already-exact train fixed") {
  const std::vector<int> dims{5, 5, 5};
  const TtTensor truth = tt_random(dims, 2, 400);
  const auto idxs = lhs_indices(dims, 500, 7);
  const std::vector<double> ys = tt_get_many(truth, idxs);

  AlsConfig cfg;
  const auto probes = random_idxs(dims, 50, 5);
  for (int i = 0; i < 3; ++i) {
    TtTensor t = truth;
    als_update_core(t, i, idxs, ys, cfg);
    const auto before = tt_get_many(truth, probes);
    const auto after = tt_get_many(t, probes);
    for (std::size_t k = 0; k < probes.size(); ++k)
      CHECK(after[k] == doctest::Approx(before[k]).epsilon(1e-9));
    CHECK(relative_error(tt_get_many(t, idxs), ys) <= 1e-10);
  }
}

TEST_CASE("a rank-1 slice update solves the scalar normal equation") {
  // d = 2, all ranks 1: updating core 0 slice j fits
  // g = sum(a_k y_k) / sum(a_k^2) with a_k the right interface value
  std::vector<TtCore> cores;
  TtCore c1(1, 2, 1);
  c1.v = {0.5, -0.25};
  TtCore c2(1, 3, 1);
  c2.v = {2.0, -1.0, 3.0};
  cores = {c1, c2};
  TtTensor t(std::move(cores));

  const std::vector<MultiIndex> idxs{{0, 0}, {0, 1}, {0, 2},
                                     {1, 0}, {1, 1}, {1, 2}};
  const std::vector<double> ys{4.0, -2.0, 9.0, 1.0, 0.5, -3.0};
  AlsConfig cfg;
  als_update_core(t, 0, idxs, ys, cfg);

  for (int j = 0; j < 2; ++j) {
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < idxs.size(); ++s) {
      if (idxs[s][0] != j) continue;
      const double a = c2.v[idxs[s][1]];
      num += a * ys[s];
      den += a * a;
    }
    CHECK(t.core(0).v[j] == doctest::Approx(num / den).epsilon(1e-13));
  }
}

TEST_CASE("incremental interface caching matches direct core updates") {
  const std::vector<int> dims{4, 3, 4, 3};
  const TtTensor truth = tt_random(dims, 3, 6021);
  const auto idxs = lhs_indices(dims, 600, 13);
  std::vector<double> ys = tt_get_many(truth, idxs);
  // perturb so the fit actually moves
  std::mt19937_64 gen(2);
  std::normal_distribution<double> normal(0.0, 0.05);
  for (double& y : ys) y += normal(gen);

  const TtTensor init = tt_random(dims, 3, 777);
  AlsConfig cfg;
  cfg.sweeps = 2;
  const AlsReport fast = als_run(init, idxs, ys, cfg);

  TtTensor slow = init;
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int i = 0; i < slow.order(); ++i)
      als_update_core(slow, i, idxs, ys, cfg);
    for (int i = slow.order() - 1; i >= 0; --i)
      als_update_core(slow, i, idxs, ys, cfg);
  }

  for (int k = 0; k < slow.order(); ++k)
    CHECK(fast.tensor.core(k).v == slow.core(k).v);
}

TEST_CASE("training error decreases monotonically over sweeps") {
  const std::vector<int> dims{6, 6, 6, 6};
  const TtTensor truth = tt_random(dims, 4, 52);
  const auto idxs = lhs_indices(dims, 1500, 19);
  std::vector<double> ys = tt_get_many(truth, idxs);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (double& y : ys) y *= 1.0 + normal(gen);

  AlsConfig cfg;
  cfg.sweeps = 12;
  const AlsReport report =
      als_run(tt_random(dims, 3, 99), idxs, ys, cfg);
  REQUIRE(report.train_error_per_sweep.size() == 12);
  for (std::size_t s = 1; s < report.train_error_per_sweep.size(); ++s)
    CHECK(report.train_error_per_sweep[s] <=
          report.train_error_per_sweep[s - 1] +
              1e-10 * std::max(1.0, report.train_error_per_sweep[s - 1]));
}

TEST_CASE("noiseless samples from a low-rank truth are recovered") {
  const std::vector<int> dims{6, 6, 6, 6};
  const TtTensor truth = tt_random(dims, 2, 8080);
  const auto idxs = lhs_indices(dims, 2000, 23);
  const std::vector<double> ys = tt_get_many(truth, idxs);

  AlsConfig cfg;
  cfg.sweeps = 30;
  const AlsReport report =
      als_run(tt_random(dims, 2, 17), idxs, ys, cfg);

  const auto test_idxs = random_idxs(dims, 500, 29);
  const double err = relative_error(tt_get_many(report.tensor, test_idxs),
                                    tt_get_many(truth, test_idxs));
  CHECK(err < 1e-8);
}

TEST_CASE("the fit is deterministic") {
  const std::vector<int> dims{4, 4, 4};
  const TtTensor truth = tt_random(dims, 2, 31);
  const auto idxs = lhs_indices(dims, 300, 37);
  const std::vector<double> ys = tt_get_many(truth, idxs);
  const TtTensor init = tt_random(dims, 2, 41);

  AlsConfig cfg;
  cfg.sweeps = 5;
  const AlsReport a = als_run(init, idxs, ys, cfg);
  const AlsReport b = als_run(init, idxs, ys, cfg);
  for (int k = 0; k < 3; ++k)
    CHECK(a.tensor.core(k).v == b.tensor.core(k).v);
  CHECK(a.train_error_per_sweep == b.train_error_per_sweep);
}

TEST_CASE("early stopping reports convergence") {
  const std::vector<int> dims{4, 4, 4};
  const TtTensor truth = tt_random(dims, 2, 61);
  const auto idxs = lhs_indices(dims, 400, 67);
  const std::vector<double> ys = tt_get_many(truth, idxs);

  AlsConfig cfg;
  cfg.sweeps = 50;
  cfg.stop_delta = 1e-10;
  const AlsReport report = als_run(truth, idxs, ys, cfg);
  CHECK(report.converged);
  CHECK(report.sweeps_run < 50);
  CHECK(report.train_error_per_sweep.back() <= 1e-12);
}

TEST_CASE("configuration validation") {
  const std::vector<int> dims{3, 3};
  const TtTensor t = tt_random(dims, 2, 1);
  const auto idxs = lhs_indices(dims, 20, 1);
  const std::vector<double> ys(20, 1.0);

  AlsConfig cfg;
  cfg.sweeps = 0;
  CHECK_THROWS_AS(als_run(t, idxs, ys, cfg), std::invalid_argument);
  cfg.sweeps = 1;
  cfg.stop_delta = -1.0;
  CHECK_THROWS_AS(als_run(t, idxs, ys, cfg), std::invalid_argument);
  cfg.stop_delta = 0.0;
  cfg.ls_cutoff = 1.0;
  CHECK_THROWS_AS(als_run(t, idxs, ys, cfg), std::invalid_argument);
}

TEST_CASE("unobserved mode values are refused") {
  const std::vector<int> dims{3, 3};
  const TtTensor t = tt_random(dims, 2, 5);
  // mode 1 never takes value 2
  const std::vector<MultiIndex> idxs{{0, 0}, {1, 1}, {2, 0}, {0, 1},
                                     {1, 0}, {2, 1}, {0, 0}, {1, 1}};
  const std::vector<double> ys(8, 1.0);
  AlsConfig cfg;
  CHECK_THROWS_WITH_AS(als_run(t, idxs, ys, cfg),
                       doctest::Contains("mode 1"), std::runtime_error);
}

TEST_CASE("slices with fewer samples than unknowns follow the policy") {
  const std::vector<int> dims{3, 3};
  const TtTensor init = tt_random(dims, 2, 5);
  // value 2 of mode 0 appears once; its slice needs r_left*r_right = 2
  std::vector<MultiIndex> idxs{{0, 0}, {0, 1}, {0, 2}, {1, 0},
                               {1, 1}, {1, 2}, {2, 0}};
  std::vector<double> ys(idxs.size(), 1.0);
  for (std::size_t s = 0; s < ys.size(); ++s)
    ys[s] = static_cast<double>(s + 1);

  AlsConfig cfg;
  SUBCASE("erroring names the slice and core") {
    CHECK_THROWS_WITH_AS(als_run(init, idxs, ys, cfg),
                         doctest::Contains("slice 2"), std::runtime_error);
    CHECK_THROWS_WITH_AS(als_run(init, idxs, ys, cfg),
                         doctest::Contains("core 0"), std::runtime_error);
  }
  SUBCASE("skipping leaves the starved slice untouched") {
    cfg.min_rows = MinRowsPolicy::kSkipSlice;
    TtTensor t = init;
    als_update_core(t, 0, idxs, ys, cfg);
    const TtCore& c = t.core(0);
    const TtCore& c0 = init.core(0);
    // slice 2 kept its initial values, slices 0 and 1 were re-fit
    CHECK(c.at(0, 2, 0) == c0.at(0, 2, 0));
    CHECK(c.at(0, 2, 1) == c0.at(0, 2, 1));
    CHECK(c.at(0, 0, 0) != c0.at(0, 0, 0));
  }
}
