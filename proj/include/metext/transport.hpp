#pragma once

// Exact 1-Wasserstein distances between finitely supported probability
// measures on (A, d). Primal plans come from successive-shortest-path
// min-cost flow on the bipartite support graph; dual potentials come
// from an independent linear program over pairwise Lipschitz
// constraints, so the duality gap is a genuine certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "metext/core.hpp"
#include "metext/simplex.hpp"

namespace metext {

struct DiscreteMeasure {
  std::vector<int> support;     // ascending point indices into A's ambient set
  std::vector<double> weights;  // positive, summing to 1

  int size() const { return static_cast<int>(support.size()); }

  static DiscreteMeasure dirac(int point) { return DiscreteMeasure{{point}, {1.0}}; }

  // Merges duplicate atoms, drops weights below 1e-15, checks the total.
  static DiscreteMeasure make(const std::vector<std::pair<int, double>>& atoms) {
    std::map<int, double> merged;
    for (auto [p, wgt] : atoms) {
      if (wgt < 0.0) throw StructuralError("measure: negative weight");
      merged[p] += wgt;
    }
    DiscreteMeasure mu;
    double total = 0.0;
    for (auto [p, wgt] : merged) {
      if (wgt < 1e-15) continue;
      mu.support.push_back(p);
      mu.weights.push_back(wgt);
      total += wgt;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw StructuralError("measure: weights sum to " + std::to_string(total));
    return mu;
  }

  bool operator==(const DiscreteMeasure& o) const {
    return support == o.support && weights == o.weights;
  }
};

struct TransportPlan {
  std::vector<int> rows;  // support of the first measure
  std::vector<int> cols;  // support of the second measure
  Matrix coupling;        // rows x cols, non-negative
};

struct DualPotential {
  std::vector<int> points;     // union support, ascending
  std::vector<double> values;  // 1-Lipschitz w.r.t. d on these points
};

namespace detail {

inline void check_support(const Matrix& d, const DiscreteMeasure& mu) {
  const int n = static_cast<int>(d.size());
  for (int p : mu.support)
    if (p < 0 || p >= n) throw DomainError("measure support outside the base set");
}

}  // namespace detail

// Exact optimal transport: min sum coupling * cost over couplings with
// marginals alpha and beta. Successive shortest paths with potentials;
// each augmentation exhausts a source or a sink, so at most n+m rounds.
inline std::pair<double, TransportPlan> w1(const Matrix& d, const DiscreteMeasure& alpha,
                                           const DiscreteMeasure& beta) {
  detail::check_support(d, alpha);
  detail::check_support(d, beta);
  const int n = alpha.size();
  const int m = beta.size();
  Matrix flow(n, std::vector<double>(m, 0.0));
  std::vector<double> supply = alpha.weights;
  std::vector<double> demand = beta.weights;
  auto cost = [&](int i, int j) { return d[alpha.support[i]][beta.support[j]]; };

  // Node potentials keep all reduced costs non-negative, so plain
  // Dijkstra over the n+m node residual graph stays valid.
  std::vector<double> pot(n + m, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  const double slack = 1e-15;

  while (true) {
    int active = -1;
    for (int i = 0; i < n; ++i)
      if (supply[i] > slack) {
        active = i;
        break;
      }
    if (active < 0) break;

    std::vector<double> distv(n + m, inf);
    std::vector<int> parent(n + m, -1);
    std::vector<bool> done(n + m, false);
    for (int i = 0; i < n; ++i)
      if (supply[i] > slack) distv[i] = 0.0;
    while (true) {
      int u = -1;
      for (int v = 0; v < n + m; ++v)
        if (!done[v] && distv[v] < inf && (u < 0 || distv[v] < distv[u])) u = v;
      if (u < 0) break;
      done[u] = true;
      if (u < n) {
        for (int j = 0; j < m; ++j) {
          const double rc = cost(u, j) + pot[u] - pot[n + j];
          if (distv[u] + rc < distv[n + j] - slack) {
            distv[n + j] = distv[u] + rc;
            parent[n + j] = u;
          }
        }
      } else {
        const int j = u - n;
        for (int i = 0; i < n; ++i) {
          if (flow[i][j] <= 0.0) continue;
          const double rc = -cost(i, j) + pot[u] - pot[i];
          if (distv[u] + rc < distv[i] - slack) {
            distv[i] = distv[u] + rc;
            parent[i] = u;
          }
        }
      }
    }

    int sink = -1;
    for (int j = 0; j < m; ++j)
      if (demand[j] > slack && distv[n + j] < inf &&
          (sink < 0 || distv[n + j] < distv[n + sink]))
        sink = j;
    if (sink < 0) throw StructuralError("w1: marginals do not balance");

    // Bottleneck along the augmenting path.
    double push = demand[sink];
    for (int v = n + sink; parent[v] >= 0; v = parent[v]) {
      const int p = parent[v];
      if (v < n) push = std::min(push, flow[v][p - n]);  // backward arc
    }
    int origin = n + sink;
    while (parent[origin] >= 0) origin = parent[origin];
    push = std::min(push, supply[origin]);

    for (int v = n + sink; parent[v] >= 0; v = parent[v]) {
      const int p = parent[v];
      if (v >= n)
        flow[p][v - n] += push;
      else
        flow[v][p - n] -= push;
    }
    supply[origin] -= push;
    demand[sink] -= push;
    for (int v = 0; v < n + m; ++v)
      if (distv[v] < inf) pot[v] += distv[v];
  }

  double value = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) value += flow[i][j] * cost(i, j);
  return {value, TransportPlan{alpha.support, beta.support, std::move(flow)}};
}

// Kantorovich-Rubinstein dual: maximize sum f d(alpha - beta) over
// functions f on the union support with f(x) - f(y) <= d(x, y) for all
// ordered pairs. Solved as a slack-form LP (f split into positive and
// negative parts), independent of the primal flow solver.
inline std::pair<double, DualPotential> kr_dual(const Matrix& d,
                                                const DiscreteMeasure& alpha,
                                                const DiscreteMeasure& beta) {
  detail::check_support(d, alpha);
  detail::check_support(d, beta);
  std::vector<int> points = alpha.support;
  points.insert(points.end(), beta.support.begin(), beta.support.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const int n = static_cast<int>(points.size());

  std::vector<double> charge(n, 0.0);  // alpha - beta per union point
  auto position = [&](int p) {
    return static_cast<int>(std::lower_bound(points.begin(), points.end(), p) -
                            points.begin());
  };
  for (int i = 0; i < alpha.size(); ++i) charge[position(alpha.support[i])] += alpha.weights[i];
  for (int j = 0; j < beta.size(); ++j) charge[position(beta.support[j])] -= beta.weights[j];

  if (n == 1) return {0.0, DualPotential{points, {0.0}}};

  // Variables: f_i = p_i - q_i plus one slack per ordered pair (i != j).
  const int num_pairs = n * (n - 1);
  const int num_vars = 2 * n + num_pairs;
  std::vector<std::vector<double>> a(num_pairs, std::vector<double>(num_vars, 0.0));
  std::vector<double> b(num_pairs, 0.0);
  std::vector<double> c(num_vars, 0.0);
  int row = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      a[row][i] = 1.0;
      a[row][n + i] = -1.0;
      a[row][j] = -1.0;
      a[row][n + j] = 1.0;
      a[row][2 * n + row] = 1.0;
      b[row] = d[points[i]][points[j]];
      ++row;
    }
  for (int i = 0; i < n; ++i) {
    c[i] = -charge[i];  // maximize charge . f
    c[n + i] = charge[i];
  }

  auto lp = solve_slack_form_lp(std::move(a), std::move(b), std::move(c));
  DualPotential potential;
  potential.points = points;
  potential.values.resize(n);
  for (int i = 0; i < n; ++i) potential.values[i] = lp.x[i] - lp.x[n + i];
  return {-lp.objective, std::move(potential)};
}

// Closed form for transport onto a Dirac target: sum c_i d(x_i, p).
inline double dirac_mix_distance(const Matrix& d, const std::vector<double>& weights,
                                 const std::vector<int>& points, int target) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    total += weights[i] * d[points[i]][target];
  return total;
}

// Upper bound for two mixtures on the same atoms, routed through an
// arbitrary base point b: sum |s_i - t_i| d(x_i, b).
inline double same_support_bound(const Matrix& d, const std::vector<double>& s,
                                 const std::vector<double>& t,
                                 const std::vector<int>& points, int b) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    total += std::abs(s[i] - t[i]) * d[points[i]][b];
  return total;
}

}  // namespace metext
