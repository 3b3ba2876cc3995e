#pragma once

// Instance-level verification: runs every quantitative property of the
// construction against a concrete instance and reports pass/fail with
// witnesses. Tolerances: 1e-12 for identities forced by normalization,
// 1e-7 for LP-mediated identities, 1e-9 for series assembly.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "metext/core.hpp"
#include "metext/extensor.hpp"
#include "metext/generate.hpp"
#include "metext/io.hpp"

namespace metext {

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
  std::string id;
  std::string anchor;  // the property being checked, human readable
  CheckStatus status = CheckStatus::Pass;
  std::string witness;  // worst offender (pair / cell / level)
  double slack = 0.0;   // worst observed margin (positive = violation)
  double tolerance = 0.0;
};

struct VerificationReport {
  std::string instance_digest;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.status != CheckStatus::Fail; });
  }
};

struct VerifyConfig {
  std::uint64_t seed = 0;
  std::vector<int> truncation_offsets = {0, 5, 20};  // relative to S*
  // Optional planted matrices replacing E(d) in the output-side checks;
  // used to demonstrate that corruption is caught.
  std::map<std::string, Matrix> injected_extensions;
};

using Extender = std::function<Matrix(const SubsetPair&, const Matrix&)>;

// | max over X^2 of |Ext(d)-Ext(e)|  -  max over A^2 of |d-e| |.
inline double isometry_defect(const SubsetPair& pair, const Matrix& d, const Matrix& e,
                              const Extender& extender) {
  const Matrix ed = extender(pair, d);
  const Matrix ee = extender(pair, e);
  return std::abs(sup_distance(ed, ee) - sup_distance(d, e));
}

namespace detail {

struct CheckBuilder {
  CheckResult result;
  explicit CheckBuilder(std::string id, std::string anchor, double tol) {
    result.id = std::move(id);
    result.anchor = std::move(anchor);
    result.tolerance = tol;
    result.slack = -std::numeric_limits<double>::infinity();
  }
  // Records the worst margin; positive margin beyond tolerance fails.
  void observe(double margin, const std::string& witness) {
    if (margin > result.slack) {
      result.slack = margin;
      result.witness = witness;
    }
    if (margin > result.tolerance) result.status = CheckStatus::Fail;
  }
  CheckResult finish() {
    if (result.slack == -std::numeric_limits<double>::infinity()) result.slack = 0.0;
    return result;
  }
};

inline std::string pair_witness(const SubsetPair& pair, int x, int y) {
  return pair.ambient.points[x] + "," + pair.ambient.points[y];
}

inline DiscreteMeasure random_mixture(int k, std::mt19937_64& rng) {
  const int atoms = 1 + static_cast<int>(rng() % std::min(k, 4));
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (int i = k - 1; i > 0; --i)
    std::swap(idx[i], idx[rng() % static_cast<std::uint64_t>(i + 1)]);
  std::vector<std::pair<int, double>> parts;
  double total = 0.0;
  for (int i = 0; i < atoms; ++i) {
    const double wgt = 0.05 + metext::detail::uniform01(rng);
    parts.emplace_back(idx[i], wgt);
    total += wgt;
  }
  for (auto& [p, wgt] : parts) wgt /= total;
  return DiscreteMeasure::make(parts);
}

}  // namespace detail

inline VerificationReport run_suite(const SubsetPair& pair, const MetricFamily& family,
                                    const VerifyConfig& config = {}) {
  VerificationReport report;
  report.instance_digest =
      io::digest(io::instance_to_json(Instance{pair, family}));
  auto add = [&](CheckResult c) { report.checks.push_back(std::move(c)); };
  const int n = pair.size();
  const int k = pair.subset_size();
  std::mt19937_64 rng(config.seed);

  // --- Input validation -------------------------------------------------
  {
    detail::CheckBuilder c("input_axioms", "inputs satisfy the declared metric axioms", 0.0);
    c.observe(validate_metric(pair.ambient.dist, MetricMode::Metric).ok() ? 0.0 : 1.0, "w");
    c.observe(validate_metric(pair.restricted, MetricMode::Metric).ok() ? 0.0 : 1.0,
              "m = w restricted to A");
    for (const auto& [name, member] : family.members)
      c.observe(validate_metric(member.dist, member.mode).ok() ? 0.0 : 1.0, name);
    add(c.finish());
  }
  {
    detail::CheckBuilder c("sup_distance_axioms",
                           "sup-distance is a finite metric on the family", 1e-12);
    std::vector<const Matrix*> mats;
    for (const auto& [name, member] : family.members) mats.push_back(&member.dist);
    for (std::size_t a = 0; a < mats.size(); ++a)
      for (std::size_t b = 0; b < mats.size(); ++b) {
        const double dab = sup_distance(*mats[a], *mats[b]);
        if (!std::isfinite(dab)) c.observe(1.0, "infinite sup-distance");
        c.observe(std::abs(dab - sup_distance(*mats[b], *mats[a])), "symmetry");
        for (std::size_t e = 0; e < mats.size(); ++e)
          c.observe(dab - sup_distance(*mats[a], *mats[e]) - sup_distance(*mats[e], *mats[b]),
                    "triangle over three metrics");
      }
    add(c.finish());
  }

  // --- WD collections ----------------------------------------------------
  const SharedPrecomputation pre = SharedPrecomputation::build(pair);
  const Embedding& emb = pre.embedding;
  const int S_star = emb.S_star;
  {
    detail::CheckBuilder c("wd_conditions",
                           "WD1-WD6 and the factor-4 anchor bound at levels 0..max(2,S*)",
                           0.0);
    for (int lev = 0; lev <= std::max(2, S_star); ++lev) {
      const WDCollection wd = (lev <= S_star) ? emb.levels[lev] : build_wd(pair, lev);
      const WDReport r = check_wd(wd, pair);
      if (!r.ok())
        c.observe(1.0, "level " + std::to_string(lev) + ": " + r.violations.front().condition +
                           " " + r.violations.front().detail);
      else
        c.observe(0.0, "level " + std::to_string(lev));
    }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("h_small_implies_near",
                           "Dsup(h(x,N), 0) < 1 implies w(x,A) <= 2^{-N+1}", 1e-12);
    for (int x = 0; x < n; ++x)
      for (int s = 0; s <= S_star; ++s) {
        const auto& snap = emb.snapshot(x, s);
        if (dsup_finite(snap.h, {}) < 1.0 && !pair.is_in_subset(x))
          c.observe(pair.dist_to_subset(x) - std::exp2(-s + 1),
                    pair.ambient.points[x] + " at level " + std::to_string(s));
      }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("h_close_implies_close",
                           "ramp 1 and Dsup(h(x,N), h(y,N)) < 1 imply w(x,y) <= 16 4^{-N-1} w(x,A)",
                           1e-12);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (x == y || pair.is_in_subset(x) || pair.is_in_subset(y)) continue;
        for (int s = 0; s <= S_star; ++s) {
          if (lambda(s, pair.dist_to_subset(x)) != 1.0 ||
              lambda(s, pair.dist_to_subset(y)) != 1.0)
            continue;
          if (dsup_finite(emb.snapshot(x, s).h, emb.snapshot(y, s).h) < 1.0)
            c.observe(pair.w(x, y) - 16.0 * std::pow(4.0, -s - 1) * pair.dist_to_subset(x),
                      detail::pair_witness(pair, x, y) + " at level " + std::to_string(s));
        }
      }
    add(c.finish());
  }

  // --- Transport ---------------------------------------------------------
  {
    detail::CheckBuilder c("w1_dirac_mix",
                           "transport onto a Dirac equals the weighted sum of distances",
                           1e-10);
    const Matrix& m = pair.restricted;
    for (int trial = 0; trial < 50; ++trial) {
      const DiscreteMeasure mix = detail::random_mixture(k, rng);
      const int target = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
      const double closed = dirac_mix_distance(m, mix.weights, mix.support, target);
      const double solved = w1(m, mix, DiscreteMeasure::dirac(target)).first;
      c.observe(std::abs(solved - closed), "trial " + std::to_string(trial));
    }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("w1_same_support_bound",
                           "same-support transport is bounded through every base point",
                           1e-10);
    const Matrix& m = pair.restricted;
    for (int trial = 0; trial < 20; ++trial) {
      const DiscreteMeasure a = detail::random_mixture(k, rng);
      DiscreteMeasure b = detail::random_mixture(k, rng);
      // Align supports: use the union with zero-extended weights.
      std::vector<int> pts;
      std::vector<double> sw, tw;
      for (int i = 0; i < k; ++i) pts.push_back(i);
      sw.assign(k, 0.0);
      tw.assign(k, 0.0);
      for (int i = 0; i < a.size(); ++i) sw[a.support[i]] = a.weights[i];
      for (int i = 0; i < b.size(); ++i) tw[b.support[i]] = b.weights[i];
      const double value = w1(m, a, b).first;
      for (int base = 0; base < k; ++base)
        c.observe(value - same_support_bound(m, sw, tw, pts, base),
                  "trial " + std::to_string(trial) + " base " + std::to_string(base));
    }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("kr_duality_gap",
                           "primal transport value matches the Lipschitz dual", 1e-7);
    const Matrix& m = pair.restricted;
    for (int trial = 0; trial < 20; ++trial) {
      const DiscreteMeasure a = detail::random_mixture(k, rng);
      const DiscreteMeasure b = detail::random_mixture(k, rng);
      const double primal = w1(m, a, b).first;
      const auto [dual, f] = kr_dual(m, a, b);
      c.observe(std::abs(primal - dual), "trial " + std::to_string(trial));
      for (std::size_t i = 0; i < f.points.size(); ++i)
        for (std::size_t j = 0; j < f.points.size(); ++j)
          c.observe(std::abs(f.values[i] - f.values[j]) - m[f.points[i]][f.points[j]] - 1e-9,
                    "potential Lipschitz, trial " + std::to_string(trial));
    }
    add(c.finish());
  }

  // --- Reproduction and isometry conditions on snapshots ------------------------------------
  {
    detail::CheckBuilder c("snapshot_extension",
                           "hybrid distance on A-point snapshots reproduces d", 1e-9);
    for (const auto& [name, member] : family.members)
      for (int s = 0; s <= S_star; ++s)
        for (int i = 0; i < k; ++i)
          for (int j = i + 1; j < k; ++j) {
            const int a = pair.subset_indices[i];
            const int b = pair.subset_indices[j];
            const double got =
                hybrid_distance(member.dist, pair, emb.snapshot(a, s), emb.snapshot(b, s));
            c.observe(std::abs(got - member.dist[i][j]),
                      name + " " + detail::pair_witness(pair, a, b));
          }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("snapshot_isometry",
                           "snapshot-level sup distance between lifted metrics equals "
                           "the sup distance of the inputs",
                           1e-9);
    std::vector<std::pair<std::string, const Matrix*>> mats;
    for (const auto& [name, member] : family.members)
      if (member.mode == MetricMode::Metric) mats.emplace_back(name, &member.dist);
    for (std::size_t a = 0; a < mats.size(); ++a)
      for (std::size_t b = a + 1; b < mats.size(); ++b) {
        double lifted = 0.0;
        for (int s = 0; s <= S_star; ++s)
          for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
              const double hd =
                  hybrid_distance(*mats[a].second, pair, emb.snapshot(x, s), emb.snapshot(y, s));
              const double he =
                  hybrid_distance(*mats[b].second, pair, emb.snapshot(x, s), emb.snapshot(y, s));
              lifted = std::max(lifted, std::abs(hd - he));
            }
        c.observe(std::abs(lifted - sup_distance(*mats[a].second, *mats[b].second)),
                  mats[a].first + " vs " + mats[b].first);
      }
    add(c.finish());
  }

  // --- Extension ----------------------------------------------------------
  std::map<std::string, ExtensionResult> extensions;
  for (const auto& [name, member] : family.members)
    extensions[name] = extend(pre, member.dist, member.mode, name);
  for (const auto& [name, mat] : config.injected_extensions)
    if (extensions.count(name)) extensions[name].matrix = mat;

  {
    detail::CheckBuilder c("extension_exactness", "E(d) restricted to A equals d", 1e-9);
    for (const auto& [name, member] : family.members) {
      const Matrix& e = extensions[name].matrix;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          c.observe(std::abs(e[pair.subset_indices[i]][pair.subset_indices[j]] -
                             member.dist[i][j]),
                    name + " " + detail::pair_witness(pair, pair.subset_indices[i],
                                                      pair.subset_indices[j]));
    }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("extension_metricity",
                           "E(d) satisfies the input's metric axioms with strict "
                           "positivity off A",
                           0.0);
    for (const auto& [name, member] : family.members) {
      const auto& ext = extensions[name];
      const auto r = validate_metric(ext.matrix, member.mode);
      c.observe(r.ok() ? 0.0 : 1.0,
                name + (r.ok() ? "" : ": " + r.violations.front().describe()));
      const double floor = std::exp2(-(S_star + 1)) - 1e-12;
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
          if (pair.is_in_subset(x) && pair.is_in_subset(y)) continue;
          if (ext.matrix[x][y] < floor)
            c.observe(floor - ext.matrix[x][y], name + " " + detail::pair_witness(pair, x, y));
        }
    }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("isometry",
                           "sup distance of extended metrics equals that of the inputs",
                           1e-9);
    std::vector<std::string> names;
    for (const auto& [name, member] : family.members)
      if (member.mode == MetricMode::Metric) names.push_back(name);
    for (std::size_t a = 0; a < names.size(); ++a)
      for (std::size_t b = a + 1; b < names.size(); ++b) {
        const double defect =
            std::abs(sup_distance(extensions[names[a]].matrix, extensions[names[b]].matrix) -
                     sup_distance(family.at(names[a]).dist, family.at(names[b]).dist));
        c.observe(defect, names[a] + " vs " + names[b]);
      }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("bounded_extension",
                           "E(m)(x, y) <= 4 w(x, y) + 1 for every y in A", 1e-9);
    const ExtensionResult em = extend(pre, pair.restricted, MetricMode::Metric, "m");
    for (int x = 0; x < n; ++x)
      for (int y : pair.subset_indices)
        c.observe(em.matrix[x][y] - (4.0 * pair.w(x, y) + 1.0),
                  detail::pair_witness(pair, x, y));
    add(c.finish());
  }
  {
    detail::CheckBuilder c("mode_agreement",
                           "truncated series agrees with the exact value within its "
                           "certified bound",
                           0.0);
    for (const auto& [name, member] : family.members) {
      const Matrix exact = extend(pre, member.dist, member.mode, name).matrix;
      double previous_bound = std::numeric_limits<double>::infinity();
      for (int offset : config.truncation_offsets) {
        const int S = std::min(S_star + offset, 64);
        const ExtensionResult trunc = extend_truncated(pre, member.dist, S, member.mode, name);
        c.observe(sup_distance(exact, trunc.matrix) - trunc.error_bound,
                  name + " at S = " + std::to_string(S));
        c.observe(trunc.error_bound - previous_bound,
                  name + ": bound not monotone at S = " + std::to_string(S));
        previous_bound = trunc.error_bound;
      }
    }
    add(c.finish());
  }
  {
    detail::CheckBuilder c("baseline_extends",
                           "shortest-path baseline restricts to d and stays a metric", 1e-9);
    for (const auto& [name, member] : family.members) {
      if (member.mode != MetricMode::Metric) continue;
      const Matrix b = baseline_extend(pair, member.dist);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          c.observe(std::abs(b[pair.subset_indices[i]][pair.subset_indices[j]] -
                             member.dist[i][j]),
                    name);
      c.observe(validate_metric(b, MetricMode::Metric).ok() ? 0.0 : 1.0, name + " axioms");
    }
    add(c.finish());
  }

  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  return report;
}

namespace io {

inline nlohmann::json report_to_json(const VerificationReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j;
    j["id"] = c.id;
    j["anchor"] = c.anchor;
    j["status"] = c.status == CheckStatus::Pass     ? "pass"
                  : c.status == CheckStatus::Fail   ? "fail"
                                                    : "skipped";
    j["witness"] = c.witness;
    j["slack"] = c.slack;
    j["tolerance"] = c.tolerance;
    checks.push_back(j);
  }
  nlohmann::json j;
  j["instance"] = report.instance_digest;
  j["checks"] = checks;
  j["all_pass"] = report.all_pass();
  return j;
}

}  // namespace io
}  // namespace metext
