#pragma once

// Minimal dense simplex solver for small linear programs of the form
//   minimize c^T x  subject to  A x = b,  x >= 0,  b >= 0,
// where the last m columns of A form an identity (slack) block, so the
// slack basis is immediately feasible. Bland's rule, so it terminates
// on degenerate instances. Sized for a few hundred variables.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace metext {

struct SimplexResult {
  std::vector<double> x;
  double objective = 0.0;
};

inline SimplexResult solve_slack_form_lp(std::vector<std::vector<double>> a,
                                         std::vector<double> b,
                                         std::vector<double> c) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  const double eps = 1e-11;

  // Tableau rows: [A | b]; basis starts at the trailing identity block.
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    basis[r] = n - m + r;
    a[r].push_back(b[r]);
  }
  // Reduced costs relative to the slack basis (slack costs are zero).
  std::vector<double> reduced(c);
  double objective = 0.0;

  while (true) {
    int entering = -1;
    for (int j = 0; j < n; ++j)
      if (reduced[j] < -eps) {  // Bland: lowest index
        entering = j;
        break;
      }
    if (entering < 0) break;

    int leaving = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      if (a[r][entering] > eps) {
        const double ratio = a[r][n] / a[r][entering];
        if (leaving < 0 || ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && basis[r] < basis[leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
    }
    if (leaving < 0) throw std::runtime_error("simplex: unbounded program");

    const double pivot = a[leaving][entering];
    for (int j = 0; j <= n; ++j) a[leaving][j] /= pivot;
    for (int r = 0; r < m; ++r) {
      if (r == leaving) continue;
      const double factor = a[r][entering];
      if (factor == 0.0) continue;
      for (int j = 0; j <= n; ++j) a[r][j] -= factor * a[leaving][j];
    }
    const double cf = reduced[entering];
    for (int j = 0; j < n; ++j) reduced[j] -= cf * a[leaving][j];
    objective += cf * a[leaving][n];
    basis[leaving] = entering;
  }

  SimplexResult result;
  result.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r) result.x[basis[r]] = a[r][n];
  result.objective = 0.0;
  for (int j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

}  // namespace metext
