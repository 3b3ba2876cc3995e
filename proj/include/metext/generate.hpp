#pragma once

// Seeded random instances: points in the unit square with a minimum
// separation, Euclidean ambient metric w, a random subset A, and random
// metrics on A obtained as shortest-path closures of perturbed copies
// of m. Doubles are derived from the raw generator output so byte
// determinism does not depend on library distribution internals.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "metext/io.hpp"

namespace metext {

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Floyd-Warshall closure; turns any symmetric positive matrix into a
// metric without changing small entries much.
inline Matrix shortest_path_closure(Matrix g) {
  const int n = static_cast<int>(g.size());
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g[i][j] = std::min(g[i][j], g[i][m] + g[m][j]);
  for (int i = 0; i < n; ++i) g[i][i] = 0.0;
  return g;
}

}  // namespace detail

// Random metric on k points: perturb the given base matrix entrywise by
// factors in [0.5, 1.5] and close under shortest paths.
inline Matrix random_metric(const Matrix& base, std::mt19937_64& rng) {
  const int k = static_cast<int>(base.size());
  Matrix g(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double factor = 0.5 + detail::uniform01(rng);
      g[i][j] = g[j][i] = base[i][j] * factor;
    }
  return detail::shortest_path_closure(std::move(g));
}

// n points in the unit square with pairwise separation >= 0.05,
// Euclidean w, |A| = k, and `family_size` random metrics on A named
// "d0", "d1", ... ("d0" is always m itself).
inline Instance generate_instance(int n, int k, std::uint64_t seed, int family_size = 3) {
  if (k < 1 || k > n) throw DomainError("generate_instance: need 1 <= k <= n");
  std::mt19937_64 rng(seed);

  std::vector<double> xs, ys;
  const double min_sep = 0.05;
  while (static_cast<int>(xs.size()) < n) {
    const double x = detail::uniform01(rng);
    const double y = detail::uniform01(rng);
    bool ok = true;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (std::hypot(x - xs[i], y - ys[i]) < min_sep) {
        ok = false;
        break;
      }
    if (ok) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }

  Matrix w(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w[i][j] = std::hypot(xs[i] - xs[j], ys[i] - ys[j]);

  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));

  // Random subset: Fisher-Yates prefix.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> subset(perm.begin(), perm.begin() + k);

  Instance inst;
  inst.pair = SubsetPair::create(
      FiniteMetricSpace::create(std::move(ids), std::move(w), MetricMode::Metric),
      std::move(subset));
  for (int f = 0; f < family_size; ++f) {
    Matrix d = (f == 0) ? inst.pair.restricted : random_metric(inst.pair.restricted, rng);
    inst.metrics.add("d" + std::to_string(f), std::move(d), MetricMode::Metric);
  }
  return inst;
}

}  // namespace metext
