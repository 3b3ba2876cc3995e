#pragma once

// Finite metric and pseudometric spaces: validation, subset pairs,
// sup-distance between metrics on a common point set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace metext {

using Matrix = std::vector<std::vector<double>>;

enum class MetricMode { Metric, Pseudometric };

inline const char* to_string(MetricMode m) {
  return m == MetricMode::Metric ? "metric" : "pseudometric";
}

// Raised for malformed inputs (non-square matrices, unknown point ids,
// mismatched dimensions). Distinct from metric-axiom violations, which
// are reported, not thrown.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Violation {
  enum class Kind {
    NonSquare,
    NegativeEntry,
    NonzeroDiagonal,
    Asymmetry,
    TriangleInequality,
    ZeroOffDiagonal,
  };
  Kind kind;
  int i = -1, j = -1, k = -1;
  double slack = 0.0;  // by how much the condition fails

  bool structural() const {
    return kind == Kind::NonSquare || kind == Kind::NegativeEntry;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::NonSquare:
        return "matrix is not square";
      case Kind::NegativeEntry:
        return "negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      case Kind::NonzeroDiagonal:
        return "nonzero diagonal at " + std::to_string(i);
      case Kind::Asymmetry:
        return "asymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      case Kind::TriangleInequality:
        return "triangle violation (" + std::to_string(i) + "," + std::to_string(j) +
               "," + std::to_string(k) + "), excess " + std::to_string(slack);
      case Kind::ZeroOffDiagonal:
        return "zero off-diagonal at (" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
    return "unknown";
  }
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool structural_error() const {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.structural(); });
  }
};

inline double max_entry(const Matrix& m) {
  double mx = 0.0;
  for (const auto& row : m)
    for (double v : row) mx = std::max(mx, std::abs(v));
  return mx;
}

// Checks the metric (or pseudometric) axioms. Triangle inequality is
// checked with absolute tolerance 1e-9 scaled by the largest entry.
inline ValidationReport validate_metric(const Matrix& dist, MetricMode mode) {
  ValidationReport report;
  const int n = static_cast<int>(dist.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(dist[i].size()) != n) {
      report.violations.push_back({Violation::Kind::NonSquare, i});
      return report;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dist[i][j] < 0.0)
        report.violations.push_back({Violation::Kind::NegativeEntry, i, j});
  if (report.structural_error()) return report;

  const double tol = 1e-9 * std::max(1.0, max_entry(dist));
  for (int i = 0; i < n; ++i)
    if (dist[i][i] != 0.0)
      report.violations.push_back({Violation::Kind::NonzeroDiagonal, i, -1, -1, dist[i][i]});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist[i][j] != dist[j][i])
        report.violations.push_back(
            {Violation::Kind::Asymmetry, i, j, -1, std::abs(dist[i][j] - dist[j][i])});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double excess = dist[i][k] - dist[i][j] - dist[j][k];
        if (excess > tol)
          report.violations.push_back({Violation::Kind::TriangleInequality, i, j, k, excess});
      }
  if (mode == MetricMode::Metric)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (dist[i][j] <= 0.0)
          report.violations.push_back({Violation::Kind::ZeroOffDiagonal, i, j});
  return report;
}

// Max absolute entrywise difference between two matrices on the same
// point set.
inline double sup_distance(const Matrix& d, const Matrix& e) {
  if (d.size() != e.size()) throw StructuralError("sup_distance: dimension mismatch");
  double mx = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].size() != e[i].size())
      throw StructuralError("sup_distance: dimension mismatch");
    for (std::size_t j = 0; j < d[i].size(); ++j)
      mx = std::max(mx, std::abs(d[i][j] - e[i][j]));
  }
  return mx;
}

struct FiniteMetricSpace {
  std::vector<std::string> points;
  Matrix dist;
  MetricMode mode = MetricMode::Metric;

  int size() const { return static_cast<int>(points.size()); }
  double d(int i, int j) const { return dist[i][j]; }

  int index_of(const std::string& id) const {
    for (int i = 0; i < size(); ++i)
      if (points[i] == id) return i;
    throw DomainError("unknown point id: " + id);
  }

  static FiniteMetricSpace create(std::vector<std::string> points, Matrix dist,
                                  MetricMode mode) {
    if (points.size() != dist.size())
      throw StructuralError("point count does not match matrix size");
    auto report = validate_metric(dist, mode);
    if (!report.ok())
      throw StructuralError("invalid " + std::string(to_string(mode)) + ": " +
                            report.violations.front().describe());
    return FiniteMetricSpace{std::move(points), std::move(dist), mode};
  }
};

// An ambient space (X, w) together with a nonempty subset A and the
// restricted matrix m = w|_{A x A}.
struct SubsetPair {
  FiniteMetricSpace ambient;         // (X, w)
  std::vector<int> subset_indices;   // A, ascending
  Matrix restricted;                 // m
  std::vector<bool> in_subset;
  std::vector<int> outside_indices;  // X \ A, ascending

  static SubsetPair create(FiniteMetricSpace ambient, std::vector<int> subset) {
    if (subset.empty()) throw StructuralError("subset A must be nonempty");
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    for (int idx : subset)
      if (idx < 0 || idx >= ambient.size())
        throw StructuralError("subset index out of range: " + std::to_string(idx));
    SubsetPair p;
    p.in_subset.assign(ambient.size(), false);
    for (int idx : subset) p.in_subset[idx] = true;
    for (int i = 0; i < ambient.size(); ++i)
      if (!p.in_subset[i]) p.outside_indices.push_back(i);
    const int k = static_cast<int>(subset.size());
    p.restricted.assign(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        p.restricted[i][j] = ambient.dist[subset[i]][subset[j]];
    p.subset_indices = std::move(subset);
    p.ambient = std::move(ambient);
    return p;
  }

  double w(int i, int j) const { return ambient.dist[i][j]; }
  int size() const { return ambient.size(); }
  int subset_size() const { return static_cast<int>(subset_indices.size()); }
  bool is_in_subset(int i) const { return in_subset[i]; }

  // Position of ambient index i within A, or -1.
  int subset_position(int i) const {
    auto it = std::lower_bound(subset_indices.begin(), subset_indices.end(), i);
    if (it == subset_indices.end() || *it != i) return -1;
    return static_cast<int>(it - subset_indices.begin());
  }

  // w(x, A) = min over a in A of w(x, a).
  double dist_to_subset(int x) const {
    check_point(x);
    double best = std::numeric_limits<double>::infinity();
    for (int a : subset_indices) best = std::min(best, w(x, a));
    return best;
  }

  // Nearest point of A, ties broken by lowest ambient index.
  int nearest_anchor(int x) const {
    check_point(x);
    int best = subset_indices.front();
    double bestd = w(x, best);
    for (int a : subset_indices)
      if (w(x, a) < bestd) {
        best = a;
        bestd = w(x, a);
      }
    return best;
  }

 private:
  void check_point(int x) const {
    if (x < 0 || x >= size()) throw DomainError("point index out of range");
  }
};

// Named collection of distance matrices over the same subset A.
struct MetricFamily {
  struct Member {
    Matrix dist;
    MetricMode mode = MetricMode::Metric;
  };
  std::map<std::string, Member> members;  // ordered for determinism

  void add(const std::string& name, Matrix dist, MetricMode mode) {
    auto report = validate_metric(dist, mode);
    if (!report.ok())
      throw StructuralError("metric '" + name + "' invalid: " +
                            report.violations.front().describe());
    members[name] = Member{std::move(dist), mode};
  }

  const Member& at(const std::string& name) const {
    auto it = members.find(name);
    if (it == members.end()) throw DomainError("unknown metric name: " + name);
    return it->second;
  }
};

}  // namespace metext
