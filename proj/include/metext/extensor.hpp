#pragma once

// The metric extensor E and its pseudometric variant: assemble the
// weighted series of per-level hybrid distances between embedded
// points, with an exact closed-form tail past the stabilization level
// or a certified truncation bound. Also a shortest-path baseline that
// extends but is not isometric, for comparison.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "metext/core.hpp"
#include "metext/embedding.hpp"

namespace metext {

enum class ExtensionMode { Exact, Truncated };

struct ExtensionResult {
  Matrix matrix;  // over X
  ExtensionMode mode = ExtensionMode::Exact;
  MetricMode metric_mode = MetricMode::Metric;
  int S_star = 0;
  int S_used = 0;           // truncation level (== S_star in exact mode)
  double error_bound = 0.0; // 0 in exact mode
  std::string metric_name;
};

struct SharedPrecomputation {
  Embedding embedding;

  static SharedPrecomputation build(SubsetPair pair) {
    return SharedPrecomputation{embed(std::move(pair))};
  }
  const SubsetPair& pair() const { return embedding.pair; }
  int S_star() const { return embedding.S_star; }
};

namespace detail {

// Per-level hybrid distance at any stabilized level s > S*. All cells
// are singletons with sigma = 1 there, so the value is closed-form.
inline double stabilized_term(const Embedding& emb, const Matrix& d, int x, int y) {
  if (x == y) return 0.0;
  const auto& px = emb.points[x];
  const auto& py = emb.points[y];
  const auto& pair = emb.pair;
  const int ax = pair.subset_position(px.anchor);
  const int ay = pair.subset_position(py.anchor);
  if (px.in_A && py.in_A) return d[ax][ay];
  // Distinct outside points sit in disjoint singleton cells, so the
  // sup term is exactly 1; against an A point the other map is empty.
  return d[ax][ay] + 1.0;
}

inline void check_same_subset(const SharedPrecomputation& pre, const Matrix& d) {
  if (static_cast<int>(d.size()) != pre.pair().subset_size())
    throw StructuralError("extend: metric size does not match A");
}

// Series tail factor: the weights 2^{-(s+1)} for s > S sum to 2^{-(S+1)}.
inline double tail_weight(int S) { return std::exp2(-(S + 1)); }

}  // namespace detail

// Exact mode: E(d)(x,y) = sum_{s=0}^{S*} 2^{-(s+1)} hybrid_s(x,y) +
// 2^{-(S*+1)} * stabilized term. Restricts to d on A with weight sum 1.
inline ExtensionResult extend(const SharedPrecomputation& pre, const Matrix& d,
                              MetricMode mode = MetricMode::Metric,
                              std::string name = "") {
  detail::check_same_subset(pre, d);
  const auto& emb = pre.embedding;
  const auto& pair = emb.pair;
  const int n = pair.size();
  const int S = emb.S_star;

  ExtensionResult result;
  result.matrix.assign(n, std::vector<double>(n, 0.0));
  result.mode = ExtensionMode::Exact;
  result.metric_mode = mode;
  result.S_star = S;
  result.S_used = S;
  result.metric_name = std::move(name);

  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double total = 0.0;
      for (int s = 0; s <= S; ++s)
        total += std::exp2(-(s + 1)) *
                 hybrid_distance(d, pair, emb.snapshot(x, s), emb.snapshot(y, s));
      total += detail::tail_weight(S) * detail::stabilized_term(emb, d, x, y);
      result.matrix[x][y] = result.matrix[y][x] = total;
    }
  return result;
}

// Certified tail bound for truncation at level S: every omitted term is
// at most min_b (4 w(x,b) + 4 w(y,b) + 2) by routing both measures
// through delta_b, and the omitted weights sum to 2^{-(S+1)}.
inline double truncation_bound(const SubsetPair& pair, int S) {
  double worst = 0.0;
  const int n = pair.size();
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double best = std::numeric_limits<double>::infinity();
      for (int b : pair.subset_indices)
        best = std::min(best, 4.0 * pair.w(x, b) + 4.0 * pair.w(y, b) + 2.0);
      worst = std::max(worst, best);
    }
  return detail::tail_weight(S) * worst;
}

// Truncated mode: partial series up to level S plus the certified
// error bound. Levels past S* are evaluated via the stabilized form.
inline ExtensionResult extend_truncated(const SharedPrecomputation& pre, const Matrix& d,
                                        int S, MetricMode mode = MetricMode::Metric,
                                        std::string name = "") {
  detail::check_same_subset(pre, d);
  if (S < 0 || S > 64) throw DomainError("extend_truncated: S must be in [0, 64]");
  const auto& emb = pre.embedding;
  const auto& pair = emb.pair;
  const int n = pair.size();
  const int S_star = emb.S_star;

  ExtensionResult result;
  result.matrix.assign(n, std::vector<double>(n, 0.0));
  result.mode = ExtensionMode::Truncated;
  result.metric_mode = mode;
  result.S_star = S_star;
  result.S_used = S;
  result.error_bound = truncation_bound(pair, S);
  result.metric_name = std::move(name);

  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double total = 0.0;
      for (int s = 0; s <= std::min(S, S_star); ++s)
        total += std::exp2(-(s + 1)) *
                 hybrid_distance(d, pair, emb.snapshot(x, s), emb.snapshot(y, s));
      if (S > S_star)
        total += (detail::tail_weight(S_star) - detail::tail_weight(S)) *
                 detail::stabilized_term(emb, d, x, y);
      result.matrix[x][y] = result.matrix[y][x] = total;
    }
  return result;
}

// Smallest S within [0, 64] whose certified bound meets the target, or
// a domain error if none does.
inline int certified_truncation_level(const SubsetPair& pair, double target_error) {
  for (int S = 0; S <= 64; ++S)
    if (truncation_bound(pair, S) <= target_error) return S;
  throw DomainError("requested certified error not achievable with S <= 64");
}

// The same series applied to a pseudometric input; the output is a
// pseudometric on X restricting to d.
inline ExtensionResult extend_pseudometric(const SharedPrecomputation& pre,
                                           const Matrix& d, std::string name = "") {
  return extend(pre, d, MetricMode::Pseudometric, std::move(name));
}

inline std::map<std::string, ExtensionResult> extend_batch(const SharedPrecomputation& pre,
                                                           const MetricFamily& family,
                                                           ExtensionMode mode,
                                                           int S = -1) {
  std::map<std::string, ExtensionResult> results;
  for (const auto& [name, member] : family.members) {
    if (mode == ExtensionMode::Exact)
      results[name] = extend(pre, member.dist, member.mode, name);
    else
      results[name] = extend_truncated(pre, member.dist, S, member.mode, name);
  }
  return results;
}

// Shortest-path baseline: edges inside A cost d, edges touching X \ A
// cost w + diam_d(A)/2. Extends d but is not isometric in d.
inline Matrix baseline_extend(const SubsetPair& pair, const Matrix& d) {
  const int n = pair.size();
  const int k = pair.subset_size();
  double diam = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) diam = std::max(diam, d[i][j]);
  const double c = diam / 2.0;

  Matrix g(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int pi = pair.subset_position(i);
      const int pj = pair.subset_position(j);
      g[i][j] = (pi >= 0 && pj >= 0) ? d[pi][pj] : pair.w(i, j) + c;
    }
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g[i][j] = std::min(g[i][j], g[i][m] + g[m][j]);
  return g;
}

}  // namespace metext
