#pragma once

// The level stack: ramp profiles lambda_s, per-level measures H(x,s) on
// A and sparse maps h(x,s) over WD cells, the hybrid l1 distance on
// snapshots, and the finite stabilization level past which every
// snapshot collapses to a closed-form tail.

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <map>
#include <vector>

#include "metext/core.hpp"
#include "metext/transport.hpp"
#include "metext/wd.hpp"

namespace metext {

// Ramp at level s: 0 on [0, 2^{-s}], 1 on [2^{-s+1}, inf), linear in
// between. Monotone nondecreasing.
inline double lambda(int s, double t) {
  const double lo = std::exp2(-s);
  const double hi = std::exp2(-s + 1);
  if (t <= lo) return 0.0;
  if (t >= hi) return 1.0;
  return (t - lo) / (hi - lo);
}

// Global identifier of a WD cell across levels.
struct CellId {
  int center;
  int shell;
  int level;
  auto operator<=>(const CellId&) const = default;
};

using SparseMap = std::map<CellId, double>;  // zero entries omitted

// Max over the union of index sets of |f - g|; absent entries count 0.
inline double dsup_finite(const SparseMap& f, const SparseMap& g) {
  double mx = 0.0;
  for (const auto& [id, v] : f) {
    auto it = g.find(id);
    mx = std::max(mx, std::abs(v - (it == g.end() ? 0.0 : it->second)));
  }
  for (const auto& [id, v] : g)
    if (!f.count(id)) mx = std::max(mx, std::abs(v));
  return mx;
}

struct LevelSnapshot {
  int level = 0;
  DiscreteMeasure H;  // probability measure on A
  SparseMap h;        // entries only at this level's cells
};

// h(x, s): (O, s) -> lambda_s(w(x,A)) * sigma_{O,s}(x), zeros omitted.
inline SparseMap h_map(int x, int s, const WDCollection& wd, const SubsetPair& pair) {
  SparseMap result;
  if (pair.is_in_subset(x)) return result;
  const double ramp = lambda(s, pair.dist_to_subset(x));
  if (ramp == 0.0) return result;
  for (const auto& cell : wd.cells) {
    const double v = ramp * cell.sigma[x];
    if (v > 0.0) result[CellId{cell.center, cell.shell, s}] = v;
  }
  return result;
}

// H(x, s): delta_x for x in A; otherwise the gamma-weighted mixture of
// Diracs at the cell anchors, equal anchors merged.
inline DiscreteMeasure H_measure(int x, int s, const WDCollection& wd,
                                 const SubsetPair& pair) {
  (void)s;
  if (pair.is_in_subset(x)) return DiscreteMeasure::dirac(x);
  std::vector<std::pair<int, double>> atoms;
  for (const auto& cell : wd.cells)
    if (cell.gamma[x] > 0.0) atoms.emplace_back(cell.anchor, cell.gamma[x]);
  return DiscreteMeasure::make(atoms);
}

// W1(d)(H_p, H_q) + Dsup(h_p, h_q); the l1 hybrid of the two factors.
inline double hybrid_distance(const Matrix& d, const SubsetPair& pair,
                              const LevelSnapshot& p, const LevelSnapshot& q) {
  if (p.level != q.level)
    throw DomainError("hybrid_distance: snapshots at different levels");
  // Measures live on ambient indices; the cost matrix is over A, so map
  // through subset positions.
  auto to_subset = [&](const DiscreteMeasure& mu) {
    DiscreteMeasure out = mu;
    for (int& pnt : out.support) {
      const int pos = pair.subset_position(pnt);
      if (pos < 0) throw DomainError("hybrid_distance: atom outside A");
      pnt = pos;
    }
    return out;
  };
  const double transport = w1(d, to_subset(p.H), to_subset(q.H)).first;
  return transport + dsup_finite(p.h, q.h);
}

// Smallest level s0 such that for all s >= s0 every candidate WD cell
// is a singleton with ramp 1: (a) 2^{-s+1} <= min w(x,A) over outside
// points, and (b) max w(x,A) * 4^{-(s+1)} < the least positive pairwise
// distance. Snapshots at levels >= s0 equal the stabilized tail.
inline int stabilization_level(const SubsetPair& pair) {
  if (pair.outside_indices.empty()) return 0;
  double min_dist_a = std::numeric_limits<double>::infinity();
  double max_dist_a = 0.0;
  for (int x : pair.outside_indices) {
    const double da = pair.dist_to_subset(x);
    min_dist_a = std::min(min_dist_a, da);
    max_dist_a = std::max(max_dist_a, da);
  }
  double min_positive = std::numeric_limits<double>::infinity();
  const int n = pair.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (pair.w(i, j) > 0.0) min_positive = std::min(min_positive, pair.w(i, j));

  int s = 0;
  while (std::exp2(-s + 1) > min_dist_a ||
         max_dist_a * std::pow(4.0, -(s + 1)) >= min_positive) {
    ++s;
    if (s > 4096) throw StructuralError("stabilization_level: no finite level found");
  }
  return s;
}

struct EmbeddedPoint {
  int point = 0;
  bool in_A = false;
  int anchor = 0;  // equals the point itself when in_A
  std::vector<LevelSnapshot> snapshots;  // levels 0 .. S*
};

// Shared, d-independent precomputation: WD collections for every level
// up to S*, plus per-point snapshots and tail descriptors.
struct Embedding {
  SubsetPair pair;
  int S_star = 0;
  std::vector<WDCollection> levels;  // size S* + 1
  std::vector<EmbeddedPoint> points;

  const LevelSnapshot& snapshot(int x, int s) const { return points[x].snapshots[s]; }
};

inline Embedding embed(SubsetPair pair) {
  Embedding emb;
  emb.S_star = stabilization_level(pair);
  emb.levels.reserve(emb.S_star + 1);
  for (int s = 0; s <= emb.S_star; ++s) emb.levels.push_back(build_wd(pair, s));

  const int n = pair.size();
  emb.points.resize(n);
  for (int x = 0; x < n; ++x) {
    EmbeddedPoint& pt = emb.points[x];
    pt.point = x;
    pt.in_A = pair.is_in_subset(x);
    pt.anchor = pt.in_A ? x : pair.nearest_anchor(x);
    pt.snapshots.reserve(emb.S_star + 1);
    for (int s = 0; s <= emb.S_star; ++s) {
      LevelSnapshot snap;
      snap.level = s;
      snap.H = H_measure(x, s, emb.levels[s], pair);
      snap.h = h_map(x, s, emb.levels[s], pair);
      pt.snapshots.push_back(std::move(snap));
    }
  }
  emb.pair = std::move(pair);
  return emb;
}

}  // namespace metext
