#include "ttfit/anova.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ttfit {

namespace {

double sorted_mean(std::vector<double>& bucket) {
  std::sort(bucket.begin(), bucket.end());
  double s = 0.0;
  for (double y : bucket) s += y;
  return s / static_cast<double>(bucket.size());
}

void check_model(const AnovaModel& m) {
  if (m.dims.empty() || m.terms.size() != m.dims.size())
    throw std::invalid_argument("malformed analysis-of-variance model");
  for (std::size_t i = 0; i < m.dims.size(); ++i)
    if (static_cast<int>(m.terms[i].size()) != m.dims[i])
      throw std::invalid_argument("model terms of mode " + std::to_string(i) +
                                  " do not match its grid size");
}

}  // namespace

AnovaModel fit_anova(const std::vector<MultiIndex>& idxs,
                     const std::vector<double>& ys,
                     const std::vector<int>& dims) {
  if (idxs.size() != ys.size())
    throw std::invalid_argument(
        "index count " + std::to_string(idxs.size()) +
        " does not match value count " + std::to_string(ys.size()));
  if (ys.empty()) throw std::invalid_argument("no samples");
  if (dims.empty()) throw std::invalid_argument("no modes");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (dims[i] < 1)
      throw std::invalid_argument("mode " + std::to_string(i) +
                                  " has non-positive size");
  const int d = static_cast<int>(dims.size());
  for (const MultiIndex& idx : idxs) {
    if (static_cast<int>(idx.size()) != d)
      throw std::invalid_argument("multi-index length differs from mode count");
    for (int i = 0; i < d; ++i)
      if (idx[i] < 0 || idx[i] >= dims[i])
        throw std::invalid_argument(
            "index " + std::to_string(idx[i]) + " out of range for mode " +
            std::to_string(i) + " of size " + std::to_string(dims[i]));
  }

  AnovaModel m;
  m.dims = dims;

  std::vector<double> all(ys);
  m.f0 = sorted_mean(all);

  m.terms.resize(d);
  m.counts.resize(d);
  for (int i = 0; i < d; ++i) {
    std::vector<std::vector<double>> buckets(dims[i]);
    for (std::size_t s = 0; s < ys.size(); ++s)
      buckets[idxs[s][i]].push_back(ys[s]);
    m.terms[i].resize(dims[i]);
    m.counts[i].resize(dims[i]);
    for (int j = 0; j < dims[i]; ++j) {
      if (buckets[j].empty())
        throw std::runtime_error("grid value " + std::to_string(j) +
                                 " of mode " + std::to_string(i) +
                                 " was never observed");
      m.counts[i][j] = static_cast<int>(buckets[j].size());
      m.terms[i][j] = sorted_mean(buckets[j]) - m.f0;
    }
  }
  return m;
}

double anova_eval(const AnovaModel& m, const MultiIndex& idx) {
  check_model(m);
  const int d = static_cast<int>(m.dims.size());
  if (static_cast<int>(idx.size()) != d)
    throw std::invalid_argument("multi-index length differs from mode count");
  double y = m.f0;
  for (int i = 0; i < d; ++i) {
    if (idx[i] < 0 || idx[i] >= m.dims[i])
      throw std::invalid_argument(
          "index " + std::to_string(idx[i]) + " out of range for mode " +
          std::to_string(i) + " of size " + std::to_string(m.dims[i]));
    y += m.terms[i][idx[i]];
  }
  return y;
}

TtTensor anova_to_tt(const AnovaModel& m, int rank, double noise_scale,
                     std::uint64_t seed) {
  check_model(m);
  if (rank < 2)
    throw std::invalid_argument("encoding rank must be at least 2, got " +
                                std::to_string(rank));
  if (noise_scale < 0.0)
    throw std::invalid_argument("noise scale must be non-negative");
  const int d = static_cast<int>(m.dims.size());

  if (d == 1) {
    TtCore c(1, m.dims[0], 1);
    for (int j = 0; j < m.dims[0]; ++j)
      c.at(0, j, 0) = m.f0 + m.terms[0][j];
    return TtTensor({std::move(c)});
  }

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto pad = [&]() { return noise_scale == 0.0 ? 0.0 : noise_scale * normal(gen); };

  std::vector<TtCore> cores;
  cores.reserve(d);
  for (int k = 0; k < d; ++k) {
    const int rl = (k == 0) ? 1 : rank;
    const int rr = (k == d - 1) ? 1 : rank;
    TtCore c(rl, m.dims[k], rr);
    for (int a = 0; a < rl; ++a)
      for (int j = 0; j < m.dims[k]; ++j)
        for (int b = 0; b < rr; ++b) {
          double x;
          if (a >= 2 || b >= 2) {
            x = pad();
          } else if (k == 0) {
            x = (b == 0) ? 1.0 : m.terms[k][j];
          } else if (k == d - 1) {
            x = (a == 0) ? m.terms[k][j] + m.f0 : 1.0;
          } else {
            if (a == 0)
              x = (b == 0) ? 1.0 : m.terms[k][j];
            else
              x = (b == 0) ? 0.0 : 1.0;
          }
          c.at(a, j, b) = x;
        }
    cores.push_back(std::move(c));
  }
  return TtTensor(std::move(cores));
}

}  // namespace ttfit
