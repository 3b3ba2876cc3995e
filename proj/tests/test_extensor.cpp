#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "metext/extensor.hpp"
#include "metext/generate.hpp"
#include "metext/verify.hpp"

using namespace metext;

namespace {

Instance demo_instance() {
  // Two far anchors, each with a nearby satellite outside A. The inner
  // metrics are much smaller than the ambient one, which is what makes
  // the shortest-path baseline fail to be isometric.
  Matrix w = {{0.0, 2.0, 0.1, 2.1},
              {2.0, 0.0, 2.1, 0.1},
              {0.1, 2.1, 0.0, 2.2},
              {2.1, 0.1, 2.2, 0.0}};
  auto space = FiniteMetricSpace::create({"a1", "a2", "x", "y"}, w, MetricMode::Metric);
  Instance inst;
  inst.pair = SubsetPair::create(std::move(space), {0, 1});
  inst.metrics.add("d", {{0.0, 0.2}, {0.2, 0.0}}, MetricMode::Metric);
  inst.metrics.add("d3", {{0.0, 0.6}, {0.6, 0.0}}, MetricMode::Metric);
  return inst;
}

}  // namespace

TEST_CASE("extension restricts to the input on A") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Instance inst = generate_instance(10, 4, seed);
    const auto pre = SharedPrecomputation::build(inst.pair);
    for (const auto& [name, member] : inst.metrics.members) {
      const ExtensionResult r = extend(pre, member.dist, member.mode, name);
      REQUIRE(r.error_bound == 0.0);
      for (int i = 0; i < inst.pair.subset_size(); ++i)
        for (int j = 0; j < inst.pair.subset_size(); ++j)
          REQUIRE_THAT(r.matrix[inst.pair.subset_indices[i]][inst.pair.subset_indices[j]],
                       Catch::Matchers::WithinAbs(member.dist[i][j], 1e-9));
    }
  }
}

TEST_CASE("extension vanishes on the diagonal and is symmetric") {
  const Instance inst = generate_instance(12, 5, 31);
  const auto pre = SharedPrecomputation::build(inst.pair);
  const ExtensionResult r = extend(pre, inst.metrics.at("d1").dist);
  for (int x = 0; x < inst.pair.size(); ++x) {
    REQUIRE(r.matrix[x][x] == 0.0);
    for (int y = 0; y < inst.pair.size(); ++y)
      REQUIRE(r.matrix[x][y] == r.matrix[y][x]);
  }
}

TEST_CASE("extension output is a metric with strict positivity off A") {
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    const Instance inst = generate_instance(9, 4, seed);
    const auto pre = SharedPrecomputation::build(inst.pair);
    const ExtensionResult r = extend(pre, inst.metrics.at("d2").dist);
    REQUIRE(validate_metric(r.matrix, MetricMode::Metric).ok());
    const double floor = std::exp2(-(pre.S_star() + 1)) - 1e-12;
    for (int x = 0; x < inst.pair.size(); ++x)
      for (int y = x + 1; y < inst.pair.size(); ++y) {
        if (inst.pair.is_in_subset(x) && inst.pair.is_in_subset(y)) continue;
        REQUIRE(r.matrix[x][y] >= floor);
      }
  }
}

TEST_CASE("extension preserves sup distance between inputs") {
  std::mt19937_64 rng(55);
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const Instance inst = generate_instance(10, 4, seed);
    const auto pre = SharedPrecomputation::build(inst.pair);
    const Matrix d = random_metric(inst.pair.restricted, rng);
    const Matrix e = random_metric(inst.pair.restricted, rng);
    const ExtensionResult ed = extend(pre, d);
    const ExtensionResult ee = extend(pre, e);
    REQUIRE_THAT(sup_distance(ed.matrix, ee.matrix),
                 Catch::Matchers::WithinAbs(sup_distance(d, e), 1e-9));
  }
}

TEST_CASE("extension of the restricted metric obeys the anchored growth bound") {
  for (std::uint64_t seed = 60; seed < 66; ++seed) {
    const Instance inst = generate_instance(11, 5, seed);
    const auto pre = SharedPrecomputation::build(inst.pair);
    const ExtensionResult r = extend(pre, inst.pair.restricted);
    for (int x = 0; x < inst.pair.size(); ++x)
      for (int y : inst.pair.subset_indices)
        REQUIRE(r.matrix[x][y] <= 4.0 * inst.pair.w(x, y) + 1.0 + 1e-9);
  }
}

TEST_CASE("truncated extension converges to the exact value with a certified bound") {
  const Instance inst = generate_instance(10, 4, 70);
  const auto pre = SharedPrecomputation::build(inst.pair);
  const Matrix& d = inst.metrics.at("d1").dist;
  const ExtensionResult exact = extend(pre, d);
  double prev_bound = std::numeric_limits<double>::infinity();
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int S : {0, pre.S_star(), pre.S_star() + 5, pre.S_star() + 20, 64}) {
    const ExtensionResult trunc = extend_truncated(pre, d, S);
    const double gap = sup_distance(exact.matrix, trunc.matrix);
    REQUIRE(gap <= trunc.error_bound);
    REQUIRE(trunc.error_bound <= prev_bound);
    REQUIRE(gap <= prev_gap + 1e-15);
    prev_bound = trunc.error_bound;
    prev_gap = gap;
    REQUIRE(trunc.S_used == S);
    REQUIRE(trunc.mode == ExtensionMode::Truncated);
  }
  SECTION("past stabilization the gap is exactly the weighted tail term") {
    const int S = pre.S_star() + 3;
    const ExtensionResult trunc = extend_truncated(pre, d, S);
    double worst_tail = 0.0;
    for (int x = 0; x < inst.pair.size(); ++x)
      for (int y = x + 1; y < inst.pair.size(); ++y)
        worst_tail = std::max(worst_tail,
                              detail::stabilized_term(pre.embedding, d, x, y));
    REQUIRE_THAT(sup_distance(exact.matrix, trunc.matrix),
                 Catch::Matchers::WithinAbs(std::exp2(-(S + 1)) * worst_tail, 1e-12));
  }
  SECTION("levels out of range are rejected") {
    REQUIRE_THROWS_AS(extend_truncated(pre, d, -1), DomainError);
    REQUIRE_THROWS_AS(extend_truncated(pre, d, 65), DomainError);
  }
}

TEST_CASE("certified truncation level is minimal and can fail") {
  const Instance inst = generate_instance(9, 4, 71);
  const int S = certified_truncation_level(inst.pair, 1e-3);
  REQUIRE(truncation_bound(inst.pair, S) <= 1e-3);
  if (S > 0) REQUIRE(truncation_bound(inst.pair, S - 1) > 1e-3);
  REQUIRE_THROWS_AS(certified_truncation_level(inst.pair, 1e-30), DomainError);
}

TEST_CASE("batch extension equals member-by-member extension") {
  const Instance inst = generate_instance(10, 4, 72);
  const auto pre = SharedPrecomputation::build(inst.pair);
  const auto batch = extend_batch(pre, inst.metrics, ExtensionMode::Exact);
  REQUIRE(batch.size() == inst.metrics.members.size());
  for (const auto& [name, member] : inst.metrics.members) {
    const ExtensionResult solo = extend(pre, member.dist, member.mode, name);
    REQUIRE(batch.at(name).matrix == solo.matrix);
  }
  // Distinct inputs give distinct outputs.
  Matrix doubled = inst.metrics.at("d0").dist;
  for (auto& row : doubled)
    for (double& v : row) v *= 2.0;
  REQUIRE(sup_distance(extend(pre, doubled).matrix, batch.at("d0").matrix) > 0.0);
}

TEST_CASE("pseudometric inputs extend to pseudometrics") {
  const Instance inst = generate_instance(9, 4, 73);
  const auto pre = SharedPrecomputation::build(inst.pair);
  const int k = inst.pair.subset_size();
  SECTION("the zero pseudometric") {
    Matrix zero(k, std::vector<double>(k, 0.0));
    const ExtensionResult r = extend_pseudometric(pre, zero);
    REQUIRE(r.metric_mode == MetricMode::Pseudometric);
    REQUIRE(validate_metric(r.matrix, MetricMode::Pseudometric).ok());
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        REQUIRE(r.matrix[inst.pair.subset_indices[i]][inst.pair.subset_indices[j]] == 0.0);
  }
  SECTION("one glued pair stays glued") {
    Matrix glued = inst.metrics.at("d0").dist;
    // Pull points 0 and 1 of A together along shortest paths.
    glued[0][1] = glued[1][0] = 0.0;
    for (int m = 0; m < k; ++m)
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          glued[i][j] = std::min(glued[i][j], glued[i][m] + glued[m][j]);
    REQUIRE(validate_metric(glued, MetricMode::Pseudometric).ok());
    const ExtensionResult r = extend_pseudometric(pre, glued);
    REQUIRE(validate_metric(r.matrix, MetricMode::Pseudometric).ok());
    REQUIRE(r.matrix[inst.pair.subset_indices[0]][inst.pair.subset_indices[1]] == 0.0);
  }
  SECTION("on a genuine metric the pseudometric variant agrees with the metric one") {
    const Matrix& d = inst.metrics.at("d1").dist;
    REQUIRE(extend_pseudometric(pre, d).matrix == extend(pre, d).matrix);
  }
}

TEST_CASE("shortest-path baseline extends but is far from isometric on the demo") {
  const Instance inst = demo_instance();
  const Matrix& d = inst.metrics.at("d").dist;
  const Matrix& d3 = inst.metrics.at("d3").dist;

  const Matrix bd = baseline_extend(inst.pair, d);
  REQUIRE(validate_metric(bd, MetricMode::Metric).ok());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      REQUIRE(bd[inst.pair.subset_indices[i]][inst.pair.subset_indices[j]] == d[i][j]);

  const Extender baseline = [](const SubsetPair& p, const Matrix& dd) {
    return baseline_extend(p, dd);
  };
  const auto pre = SharedPrecomputation::build(inst.pair);
  const Extender series_extender = [&](const SubsetPair&, const Matrix& dd) {
    return extend(pre, dd).matrix;
  };
  const double baseline_defect = isometry_defect(inst.pair, d, d3, baseline);
  const double extensor_defect = isometry_defect(inst.pair, d, d3, series_extender);
  REQUIRE(baseline_defect >= 0.1);
  REQUIRE(extensor_defect <= 1e-9);
}

TEST_CASE("extend rejects matrices of the wrong size") {
  const Instance inst = generate_instance(8, 4, 74);
  const auto pre = SharedPrecomputation::build(inst.pair);
  REQUIRE_THROWS_AS(extend(pre, Matrix{{0, 1}, {1, 0}}), StructuralError);
}
