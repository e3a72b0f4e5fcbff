#ifndef NOETHERLAB_TESTS_SUPPORT_HPP
#define NOETHERLAB_TESTS_SUPPORT_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "noetherlab/csv.hpp"
#include "noetherlab/mechsys.hpp"

namespace testing_support {

using noetherlab::Mat;
using noetherlab::Vec;

inline std::uint64_t seed() {
  if (const char* s = std::getenv("NOETHERLAB_SEED")) return std::strtoull(s, nullptr, 10);
  return 1234567;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(seed());
  return engine;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Vec random_vec(Eigen::Index n, double lo, double hi) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

/// A A^T + shift I with A uniform in [-1, 1].
inline Mat random_spd(Eigen::Index n, double shift = 0.5) {
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = uniform(-1.0, 1.0);
  return a * a.transpose() + shift * Mat::Identity(n, n);
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

/// Position-dependent, diagonally dominant metric in q1..qn with a smooth
/// confining potential. Coefficients are printed into the expressions.
inline noetherlab::LagrangianSystem random_metric_system(int n) {
  std::vector<std::string> coords;
  for (int i = 0; i < n; ++i) coords.push_back("q" + std::to_string(i + 1));
  auto num = [](double x) { return "(" + noetherlab::format_double(x) + ")"; };
  std::vector<std::string> g(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::string e;
      if (i == j)
        e = num(uniform(1.5, 3.0)) + " + " + num(uniform(0.1, 0.5)) + "*sin(" + coords[static_cast<std::size_t>(i)] + ")";
      else
        e = num(uniform(-0.2, 0.2)) + "*cos(" + coords[static_cast<std::size_t>(j)] + ")";
      g[static_cast<std::size_t>(i * n + j)] = g[static_cast<std::size_t>(j * n + i)] = e;
    }
  std::string v;
  for (int i = 0; i < n; ++i) {
    const std::string& q = coords[static_cast<std::size_t>(i)];
    if (i) v += " + ";
    v += num(uniform(0.5, 2.0)) + "*" + q + "^2 + " + num(uniform(0.0, 0.3)) + "*" + q + "^4";
  }
  return noetherlab::LagrangianSystem::with_metric(coords, g, v);
}

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-4) {
  const Eigen::Index n = x.size();
  Mat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Vec y = x;
        y[i] += si * h;
        y[j] += sj * h;
        return f(y);
      };
      H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  }
  return H;
}

}  // namespace testing_support

#endif
