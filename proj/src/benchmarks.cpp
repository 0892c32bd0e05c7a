#include "ttfit/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ttfit/pde.hpp"

namespace ttfit {

namespace {

constexpr double kPi = std::numbers::pi;

void check_arity(const std::vector<double>& x, int d) {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                " coordinates, benchmark expects " +
                                std::to_string(d));
}

std::vector<std::pair<double, double>> box(int d, double lo, double hi) {
  return std::vector<std::pair<double, double>>(d, {lo, hi});
}

double ackley(const std::vector<double>& x) {
  const double a = 20.0, b = 0.2, c = 2.0 * kPi;
  const double d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double xi : x) {
    sq += xi * xi;
    cs += std::cos(c * xi);
  }
  return -a * std::exp(-b * std::sqrt(sq / d)) - std::exp(cs / d) + a +
         std::exp(1.0);
}

double alpine(const std::vector<double>& x) {
  double s = 0.0;
  for (double xi : x) s += std::abs(xi * std::sin(xi) + 0.1 * xi);
  return s;
}

double dixon(const std::vector<double>& x) {
  double s = (x[0] - 1.0) * (x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double t = 2.0 * x[i] * x[i] - x[i - 1];
    s += static_cast<double>(i + 1) * t * t;
  }
  return s;
}

double exponential(const std::vector<double>& x) {
  double sq = 0.0;
  for (double xi : x) sq += xi * xi;
  return -std::exp(-0.5 * sq);
}

double grienwank(const std::vector<double>& x) {
  double s = 0.0, p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * x[i] / 4000.0;
    p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return s - p + 1.0;
}

double michalewicz(const std::vector<double>& x) {
  const int m = 10;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t =
        std::sin(static_cast<double>(i + 1) * x[i] * x[i] / kPi);
    s += std::sin(x[i]) * std::pow(t, 2 * m);
  }
  return -s;
}

double piston(const std::vector<double>& x) {
  const double m = x[0], s = x[1], v0 = x[2], k = x[3], p0 = x[4],
               ta = x[5], t0 = x[6];
  const double a = p0 * s + 19.62 * m - k * v0 / s;
  const double pv = p0 * v0 / t0;
  const double v = s / (2.0 * k) * (std::sqrt(a * a + 4.0 * k * pv * ta) - a);
  return 2.0 * kPi * std::sqrt(m / (k + s * s * pv * ta / (v * v)));
}

double qing(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i] * x[i] - static_cast<double>(i + 1);
    s += t * t;
  }
  return s;
}

double rastrigin(const std::vector<double>& x) {
  const double a = 10.0;
  double s = a * static_cast<double>(x.size());
  for (double xi : x) s += xi * xi - a * std::cos(2.0 * kPi * xi);
  return s;
}

double rosenbrock(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double t1 = x[i + 1] - x[i] * x[i];
    const double t2 = 1.0 - x[i];
    s += 100.0 * t1 * t1 + t2 * t2;
  }
  return s;
}

double schaffer(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double r2 = x[i] * x[i] + x[i + 1] * x[i + 1];
    const double sn = std::sin(std::sqrt(r2));
    const double dn = 1.0 + 0.001 * r2;
    s += 0.5 + (sn * sn - 0.5) / (dn * dn);
  }
  return s;
}

double schwefel(const std::vector<double>& x) {
  double s = 418.9829 * static_cast<double>(x.size());
  for (double xi : x) s -= xi * std::sin(std::sqrt(std::abs(xi)));
  return s;
}

struct Entry {
  double (*fn)(const std::vector<double>&);
  double lo, hi;
};

Entry analytical_entry(const std::string& name) {
  if (name == "ackley") return {ackley, -32.768, 32.768};
  if (name == "alpine") return {alpine, -10.0, 10.0};
  if (name == "dixon") return {dixon, -10.0, 10.0};
  if (name == "exponential") return {exponential, -1.0, 1.0};
  if (name == "grienwank") return {grienwank, -600.0, 600.0};
  if (name == "michalewicz") return {michalewicz, 0.0, kPi};
  if (name == "qing") return {qing, 0.0, 500.0};
  if (name == "rastrigin") return {rastrigin, -5.12, 5.12};
  if (name == "rosenbrock") return {rosenbrock, -2.048, 2.048};
  if (name == "schaffer") return {schaffer, -100.0, 100.0};
  if (name == "schwefel") return {schwefel, -500.0, 500.0};
  throw std::invalid_argument("unknown benchmark: " + name);
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {
      "ackley",      "alpine", "dixon",     "exponential",
      "grienwank",   "michalewicz", "piston", "qing",
      "rastrigin",   "rosenbrock", "schaffer", "schwefel",
      "pde-voi"};
  return names;
}

Benchmark make_benchmark(const std::string& name, int d) {
  if (name == "pde-voi") {
    if (d != 9)
      throw std::invalid_argument("pde-voi is defined for d = 9, got " +
                                  std::to_string(d));
    return make_pde_benchmark(PdeConfig{});
  }
  if (name == "piston") {
    if (d != 7)
      throw std::invalid_argument("piston is defined for d = 7, got " +
                                  std::to_string(d));
    Benchmark b;
    b.name = name;
    b.d = 7;
    b.bounds = {{30.0, 60.0},       {0.005, 0.020}, {0.002, 0.010},
                {1000.0, 5000.0},   {90000.0, 110000.0}, {290.0, 296.0},
                {340.0, 360.0}};
    b.eval = [](const std::vector<double>& x) {
      check_arity(x, 7);
      return piston(x);
    };
    return b;
  }

  const Entry e = analytical_entry(name);
  if (d < 2)
    throw std::invalid_argument("benchmark needs d >= 2, got " +
                                std::to_string(d));
  Benchmark b;
  b.name = name;
  b.d = d;
  b.bounds = box(d, e.lo, e.hi);
  b.eval = [fn = e.fn, d](const std::vector<double>& x) {
    check_arity(x, d);
    return fn(x);
  };
  return b;
}

}  // namespace ttfit
