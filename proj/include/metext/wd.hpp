#pragma once

// Strong (k, w)-WD collections on the complement of A: dyadic shells,
// tent-function partitions of unity, nearest anchors, and the rescaled
// sup-partition that attains 1 at every outside point.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "metext/core.hpp"

namespace metext {

// Shell V_i = { x : 2^{i-1} < w(x,A) < 2^{i+1} }, strict on both sides.
// Every outside point lies in one or two consecutive shells.
inline std::vector<int> shell_indices(double dist_to_A) {
  if (dist_to_A <= 0.0)
    throw DomainError("shell_indices: point lies in A (w(x,A) = 0)");
  std::vector<int> shells;
  const int center = static_cast<int>(std::floor(std::log2(dist_to_A)));
  for (int i = center - 2; i <= center + 2; ++i) {
    if (std::exp2(i - 1) < dist_to_A && dist_to_A < std::exp2(i + 1))
      shells.push_back(i);
  }
  return shells;
}

inline std::vector<int> shell_indices(int x, const SubsetPair& pair) {
  return shell_indices(pair.dist_to_subset(x));
}

inline bool in_shell(double dist_to_A, int i) {
  return std::exp2(i - 1) < dist_to_A && dist_to_A < std::exp2(i + 1);
}

struct WDCell {
  std::vector<int> members;   // subset of X \ A, ascending ambient indices
  int center;                 // p_O, in X \ A
  int anchor;                 // a_O, in A
  int shell;                  // i with members contained in V_i
  std::vector<double> gamma;  // over all of X; support inside members
  std::vector<double> sigma;  // same support, rescaled so the max is 1
};

struct WDCollection {
  int level = 0;  // k
  std::vector<WDCell> cells;
};

// Populates sigma from gamma: sigma_O(x) = (2/Phi(x)) * min(gamma_O(x),
// Phi(x)/2) with Phi(x) the pointwise max of gamma over cells. Off A the
// max of sigma is exactly 1; supports are unchanged.
inline void sup_partition(WDCollection& collection, const SubsetPair& pair) {
  const int n = pair.size();
  for (auto& cell : collection.cells) cell.sigma.assign(n, 0.0);
  for (int x : pair.outside_indices) {
    double phi = 0.0;
    for (const auto& cell : collection.cells) phi = std::max(phi, cell.gamma[x]);
    if (phi <= 0.0)
      throw StructuralError("sup_partition: outside point not covered (Phi = 0)");
    for (auto& cell : collection.cells)
      cell.sigma[x] = (2.0 / phi) * std::min(cell.gamma[x], phi / 2.0);
  }
}

// Builds a strong (k, w)-WD collection. Candidate cells are shell-
// restricted open balls of radius w(x,A)/4^{k+1} around each outside
// point; tent bumps are summed over candidates with identical member
// sets and then normalized. Deterministic: candidates are visited in
// (point index, shell index) order and the first occurrence of a member
// set fixes the cell's center and shell.
inline WDCollection build_wd(const SubsetPair& pair, int k) {
  if (k < 0) throw DomainError("build_wd: level k must be non-negative");
  WDCollection collection;
  collection.level = k;
  const int n = pair.size();
  const double radius_scale = std::pow(4.0, -(k + 1));

  std::vector<double> dist_a(n, 0.0);
  for (int x : pair.outside_indices) dist_a[x] = pair.dist_to_subset(x);

  std::map<std::vector<int>, std::size_t> by_members;
  for (int x : pair.outside_indices) {
    const double radius = dist_a[x] * radius_scale;
    for (int i : shell_indices(dist_a[x])) {
      std::vector<int> members;
      std::vector<double> bump(n, 0.0);
      for (int y : pair.outside_indices) {
        if (!in_shell(dist_a[y], i)) continue;
        if (pair.w(y, x) < radius) {
          members.push_back(y);
          bump[y] = radius - pair.w(y, x);
        }
      }
      auto it = by_members.find(members);
      if (it == by_members.end()) {
        WDCell cell;
        cell.center = x;
        cell.shell = i;
        cell.anchor = pair.nearest_anchor(x);
        cell.members = std::move(members);
        cell.gamma = std::move(bump);
        by_members.emplace(cell.members, collection.cells.size());
        collection.cells.push_back(std::move(cell));
      } else {
        auto& gamma = collection.cells[it->second].gamma;
        for (int y = 0; y < n; ++y) gamma[y] += bump[y];
      }
    }
  }

  // Normalize to a partition of unity on X \ A (WD5).
  std::vector<double> total(n, 0.0);
  for (const auto& cell : collection.cells)
    for (int y : cell.members) total[y] += cell.gamma[y];
  for (auto& cell : collection.cells)
    for (int y : cell.members) cell.gamma[y] /= total[y];

  sup_partition(collection, pair);
  return collection;
}

struct WDViolation {
  std::string condition;  // e.g. "WD3", "WD5", "factor4"
  int cell = -1;
  int point = -1;
  double slack = 0.0;
  std::string detail;
};

struct WDReport {
  std::vector<WDViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Re-checks WD1 through WD6 and the factor-4 anchor bound against an
// arbitrary collection, listing every violation with witnesses.
inline WDReport check_wd(const WDCollection& collection, const SubsetPair& pair) {
  WDReport report;
  const int n = pair.size();
  const int k = collection.level;
  const double radius_scale = std::pow(4.0, -(k + 1));
  const double anchor_slack = (std::pow(4.0, k + 1) + 1.0) * radius_scale;
  const double tol = 1e-12 * std::max(1.0, max_entry(pair.ambient.dist));
  auto flag = [&](std::string cond, int cell, int point, double slack, std::string detail) {
    report.violations.push_back({std::move(cond), cell, point, slack, std::move(detail)});
  };

  std::vector<double> dist_a(n, 0.0);
  for (int x = 0; x < n; ++x)
    if (!pair.is_in_subset(x)) dist_a[x] = pair.dist_to_subset(x);

  for (std::size_t c = 0; c < collection.cells.size(); ++c) {
    const auto& cell = collection.cells[c];
    const int ci = static_cast<int>(c);
    // WD1: center outside A, anchor inside A, gamma in [0,1].
    if (pair.is_in_subset(cell.center)) flag("WD1", ci, cell.center, 0, "center lies in A");
    if (!pair.is_in_subset(cell.anchor)) flag("WD1", ci, cell.anchor, 0, "anchor outside A");
    for (int x = 0; x < n; ++x)
      if (cell.gamma[x] < 0.0 || cell.gamma[x] > 1.0 + tol)
        flag("WD1", ci, x, cell.gamma[x], "gamma outside [0,1]");
    // WD2: members inside the shell-restricted ball around the center.
    const double radius = dist_a[cell.center] * radius_scale;
    for (int y : cell.members) {
      if (pair.is_in_subset(y)) flag("WD2", ci, y, 0, "member lies in A");
      if (!(pair.w(y, cell.center) < radius + tol))
        flag("WD2", ci, y, pair.w(y, cell.center) - radius, "member outside ball");
      if (!in_shell(dist_a[y], cell.shell))
        flag("WD2", ci, y, dist_a[y], "member outside shell");
    }
    // WD3: anchor within the allowed multiple of w(p_O, A).
    {
      const double bound = anchor_slack * dist_a[cell.center];
      const double got = pair.w(cell.center, cell.anchor);
      if (got > bound + tol) flag("WD3", ci, cell.anchor, got - bound, "anchor too far");
    }
    // WD4: support containment.
    for (int x = 0; x < n; ++x) {
      if (cell.gamma[x] > 0.0 &&
          !std::binary_search(cell.members.begin(), cell.members.end(), x))
        flag("WD4", ci, x, cell.gamma[x], "gamma positive off the member set");
      if ((cell.sigma[x] > 0.0) != (cell.gamma[x] > 0.0))
        flag("sigma", ci, x, cell.sigma[x], "sigma support differs from gamma support");
    }
    // WD6: diameter bound at every point of the support.
    double diam = 0.0;
    for (int y : cell.members)
      for (int z : cell.members) diam = std::max(diam, pair.w(y, z));
    for (int x = 0; x < n; ++x) {
      if (cell.gamma[x] <= 0.0) continue;
      const double bound = 16.0 * dist_a[x] * radius_scale;
      if (diam > bound + tol) flag("WD6", ci, x, diam - bound, "diameter exceeds bound");
      // Factor-4 anchor bound: w(a, a_O) <= 4 w(a, x) for every a in A.
      for (int a : pair.subset_indices)
        if (pair.w(a, cell.anchor) > 4.0 * pair.w(a, x) + tol)
          flag("factor4", ci, x, pair.w(a, cell.anchor) - 4.0 * pair.w(a, x),
               "anchor farther than 4x from a = " + pair.ambient.points[a]);
    }
  }

  // WD5: partition of unity off A, identically zero on A; sup-partition
  // attains 1 at every outside point.
  for (int x = 0; x < n; ++x) {
    double sum = 0.0, smax = 0.0;
    for (const auto& cell : collection.cells) {
      sum += cell.gamma[x];
      smax = std::max(smax, cell.sigma[x]);
    }
    if (pair.is_in_subset(x)) {
      if (sum != 0.0) flag("WD5", -1, x, sum, "gamma sum nonzero on A");
      if (smax != 0.0) flag("sigma", -1, x, smax, "sigma nonzero on A");
    } else {
      if (std::abs(sum - 1.0) > tol) flag("WD5", -1, x, sum - 1.0, "gamma sum not 1");
      if (std::abs(smax - 1.0) > tol) flag("sigma", -1, x, smax - 1.0, "max sigma not 1");
    }
  }
  return report;
}

}  // namespace metext
