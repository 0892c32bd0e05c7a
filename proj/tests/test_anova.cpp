#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ttfit/anova.hpp"
#include "ttfit/sampling.hpp"
#include "ttfit/tt_tensor.hpp"

using namespace ttfit;

namespace {

std::vector<MultiIndex> all_indices(const std::vector<int>& dims) {
  std::vector<MultiIndex> out;
  MultiIndex idx(dims.size(), 0);
  while (true) {
    out.push_back(idx);
    int k = static_cast<int>(dims.size()) - 1;
    for (; k >= 0; --k) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

AnovaModel random_model(const std::vector<int>& dims, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  AnovaModel m;
  m.dims = dims;
  m.f0 = normal(gen);
  m.terms.resize(dims.size());
  m.counts.resize(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    m.terms[i].resize(dims[i]);
    m.counts[i].assign(dims[i], 1);
    for (double& t : m.terms[i]) t = normal(gen);
  }
  return m;
}

}  // namespace

TEST_CASE("constant samples give the constant and zero effects") {
  const std::vector<MultiIndex> idxs{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<double> ys(4, 3.25);
  const AnovaModel m = fit_anova(idxs, ys, {2, 2});
  CHECK(m.f0 == 3.25);
  for (const auto& mode : m.terms)
    for (double t : mode) CHECK(t == 0.0);
}

TEST_CASE("one-mode fit splits mean and effects") {
  const std::vector<MultiIndex> idxs{{0}, {1}};
  const std::vector<double> ys{0.0, 2.0};
  const AnovaModel m = fit_anova(idxs, ys, {2});
  CHECK(m.f0 == 1.0);
  CHECK(m.terms[0][0] == -1.0);
  CHECK(m.terms[0][1] == 1.0);
  CHECK(m.counts[0] == std::vector<int>{1, 1});
  CHECK(anova_eval(m, {1}) == 2.0);
}

TEST_CASE("additive functions are reproduced exactly") {
  // f(x1, x2) = x1 + x2 on the grid {0,1,2} x {0,1,2}, full sampling
  const std::vector<int> dims{3, 3};
  std::vector<MultiIndex> idxs = all_indices(dims);
  std::vector<double> ys;
  for (const MultiIndex& idx : idxs)
    ys.push_back(static_cast<double>(idx[0] + idx[1]));
  const AnovaModel m = fit_anova(idxs, ys, dims);
  CHECK(m.f0 == doctest::Approx(2.0).epsilon(1e-15));
  for (std::size_t s = 0; s < idxs.size(); ++s)
    CHECK(anova_eval(m, idxs[s]) == doctest::Approx(ys[s]).epsilon(1e-14));
}

TEST_CASE("count-weighted effects sum to zero in every mode") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<int> dims{3 + static_cast<int>(gen() % 3),
                                2 + static_cast<int>(gen() % 4),
                                4};
    const int m = 50 + static_cast<int>(gen() % 100);
    const auto idxs = lhs_indices(dims, m, gen());
    std::vector<double> ys(m);
    for (double& y : ys) y = normal(gen);
    const AnovaModel model = fit_anova(idxs, ys, dims);

    double scale = std::abs(model.f0);
    for (const auto& mode : model.terms)
      for (double t : mode) scale = std::max(scale, std::abs(t));
    for (std::size_t i = 0; i < dims.size(); ++i) {
      double weighted = 0.0;
      int total = 0;
      for (int j = 0; j < dims[i]; ++j) {
        weighted += model.counts[i][j] * model.terms[i][j];
        total += model.counts[i][j];
      }
      CHECK(total == m);
      CHECK(std::abs(weighted) <= 1e-9 * m * std::max(1.0, scale));
    }
  }
}

TEST_CASE("fit is invariant under sample permutation, bit for bit") {
  std::mt19937_64 gen(77);
  const std::vector<int> dims{4, 3, 5};
  auto idxs = lhs_indices(dims, 64, 9);
  std::vector<double> ys(idxs.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& y : ys) y = normal(gen);

  const AnovaModel a = fit_anova(idxs, ys, dims);

  std::vector<std::size_t> perm(idxs.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::shuffle(perm.begin(), perm.end(), gen);
  std::vector<MultiIndex> idxs2;
  std::vector<double> ys2;
  for (std::size_t k : perm) {
    idxs2.push_back(idxs[k]);
    ys2.push_back(ys[k]);
  }
  const AnovaModel b = fit_anova(idxs2, ys2, dims);

  CHECK(a.f0 == b.f0);
  CHECK(a.terms == b.terms);
  CHECK(a.counts == b.counts);
}

TEST_CASE("unobserved grid values are refused") {
  // mode 1 never sees value 2
  const std::vector<MultiIndex> idxs{{0, 0}, {1, 1}, {2, 0}};
  const std::vector<double> ys{1.0, 2.0, 3.0};
  CHECK_THROWS_WITH_AS(fit_anova(idxs, ys, {3, 3}),
                       doctest::Contains("mode 1"), std::runtime_error);
}

TEST_CASE("fit input validation") {
  CHECK_THROWS_AS(fit_anova({{0}}, {1.0, 2.0}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_anova({}, {}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_anova({{0, 0}}, {1.0}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(fit_anova({{5}}, {1.0}, {2}), std::invalid_argument);
}

TEST_CASE("sample mean of the model over the train set equals f0 plus effects") {
  std::mt19937_64 gen(15);
  const std::vector<int> dims{5, 4};
  const auto idxs = lhs_indices(dims, 40, 3);
  std::vector<double> ys(idxs.size());
  std::normal_distribution<double> normal(1.0, 3.0);
  for (double& y : ys) y = normal(gen);
  const AnovaModel m = fit_anova(idxs, ys, dims);

  double mean_y = 0.0, mean_pred = 0.0;
  for (std::size_t s = 0; s < idxs.size(); ++s) {
    mean_y += ys[s];
    mean_pred += anova_eval(m, idxs[s]);
  }
  mean_y /= static_cast<double>(ys.size());
  mean_pred /= static_cast<double>(ys.size());
  CHECK(mean_pred == doctest::Approx(mean_y).epsilon(1e-12));
}

TEST_CASE("exact encoding reproduces the model on every index") {
  for (int trial = 0; trial < 6; ++trial) {
    const std::vector<int> dims{3, 4, 2, 3};
    const AnovaModel m = random_model(dims, 500 + trial);
    const TtTensor t = anova_to_tt(m, 2, 0.0, 0);
    CHECK(t.ranks() == std::vector<int>{1, 2, 2, 2, 1});
    for (const MultiIndex& idx : all_indices(dims))
      CHECK(tt_get(t, idx) ==
            doctest::Approx(anova_eval(m, idx)).epsilon(1e-13));
  }
}

TEST_CASE("zero model encodes to the zero tensor") {
  AnovaModel m;
  m.dims = {3, 3};
  m.f0 = 0.0;
  m.terms = {{0, 0, 0}, {0, 0, 0}};
  m.counts = {{1, 1, 1}, {1, 1, 1}};
  const TtTensor t = anova_to_tt(m, 2, 0.0, 0);
  for (const MultiIndex& idx : all_indices(m.dims))
    CHECK(tt_get(t, idx) == 0.0);
}

TEST_CASE("padding widens the ranks and stays near the model") {
  const std::vector<int> dims{4, 4, 4};
  const AnovaModel m = random_model(dims, 9001);
  const double noise = 1e-3;
  const TtTensor t = anova_to_tt(m, 5, noise, 11);
  CHECK(t.ranks() == std::vector<int>{1, 5, 5, 1});

  double max_diff = 0.0;
  for (const MultiIndex& idx : all_indices(dims))
    max_diff = std::max(max_diff,
                        std::abs(tt_get(t, idx) - anova_eval(m, idx)));
  CHECK(max_diff > 0.0);
  CHECK(max_diff <= 100.0 * noise);
}

TEST_CASE("padding is deterministic in the seed") {
  const AnovaModel m = random_model({3, 3}, 4);
  const TtTensor a = anova_to_tt(m, 4, 1e-3, 42);
  const TtTensor b = anova_to_tt(m, 4, 1e-3, 42);
  const TtTensor c = anova_to_tt(m, 4, 1e-3, 43);
  for (int k = 0; k < 2; ++k) CHECK(a.core(k).v == b.core(k).v);
  CHECK(a.core(0).v != c.core(0).v);
}

TEST_CASE("encoding validates the rank") {
  const AnovaModel m = random_model({3, 3}, 1);
  CHECK_THROWS_AS(anova_to_tt(m, 1, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(anova_to_tt(m, 2, -1.0, 0), std::invalid_argument);
}

TEST_CASE("one-mode model collapses to a single core") {
  const AnovaModel m = random_model({6}, 2);
  const TtTensor t = anova_to_tt(m, 5, 1e-3, 0);
  CHECK(t.ranks() == std::vector<int>{1, 1});
  for (int j = 0; j < 6; ++j)
    CHECK(tt_get(t, {j}) == m.f0 + m.terms[0][j]);
}
