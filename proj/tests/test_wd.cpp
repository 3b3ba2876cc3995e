#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "metext/generate.hpp"
#include "metext/wd.hpp"

using namespace metext;

namespace {

// Independent oracle for shell membership: scan a wide index window
// against the strict inequalities.
std::vector<int> brute_shells(double dist) {
  std::vector<int> shells;
  for (int i = -60; i <= 60; ++i)
    if (std::exp2(i - 1) < dist && dist < std::exp2(i + 1)) shells.push_back(i);
  return shells;
}

SubsetPair single_outside_pair() {
  // A = {a}, one outside point at distance 1.
  Matrix w = {{0, 1}, {1, 0}};
  auto space = FiniteMetricSpace::create({"a", "x"}, w, MetricMode::Metric);
  return SubsetPair::create(std::move(space), {0});
}

bool collections_equal(const WDCollection& a, const WDCollection& b) {
  if (a.level != b.level || a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& ca = a.cells[i];
    const auto& cb = b.cells[i];
    if (ca.members != cb.members || ca.center != cb.center || ca.anchor != cb.anchor ||
        ca.shell != cb.shell || ca.gamma != cb.gamma || ca.sigma != cb.sigma)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("shell indices match the strict dyadic window") {
  REQUIRE(shell_indices(1.0) == std::vector<int>{0});
  REQUIRE(shell_indices(1.5) == std::vector<int>{0, 1});
  REQUIRE(shell_indices(std::exp2(-3)) == std::vector<int>{-3});
  for (double t : {0.03, 0.25, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.9, 17.0})
    REQUIRE(shell_indices(t) == brute_shells(t));
  REQUIRE_THROWS_AS(shell_indices(0.0), DomainError);
}

TEST_CASE("every outside point lies in one or two shells") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = generate_instance(14, 5, seed);
    for (int x : inst.pair.outside_indices) {
      const auto shells = shell_indices(x, inst.pair);
      REQUIRE(shells.size() >= 1);
      REQUIRE(shells.size() <= 2);
    }
  }
}

TEST_CASE("build_wd on an empty complement yields the empty collection") {
  Matrix w = {{0, 1}, {1, 0}};
  auto space = FiniteMetricSpace::create({"a", "b"}, w, MetricMode::Metric);
  const SubsetPair pair = SubsetPair::create(std::move(space), {0, 1});
  const WDCollection wd = build_wd(pair, 0);
  REQUIRE(wd.cells.empty());
  REQUIRE(check_wd(wd, pair).ok());
}

TEST_CASE("build_wd on a single outside point produces the hand-computed cell") {
  const SubsetPair pair = single_outside_pair();
  const WDCollection wd = build_wd(pair, 0);
  REQUIRE(wd.cells.size() == 1);
  const WDCell& cell = wd.cells[0];
  REQUIRE(cell.members == std::vector<int>{1});
  REQUIRE(cell.center == 1);
  REQUIRE(cell.anchor == 0);
  REQUIRE(cell.shell == 0);
  REQUIRE(cell.gamma[1] == 1.0);
  REQUIRE(cell.sigma[1] == 1.0);
  REQUIRE(cell.gamma[0] == 0.0);
}

TEST_CASE("build_wd output passes check_wd on random instances") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Instance inst = generate_instance(6 + static_cast<int>(seed) % 10, 4, seed);
    for (int k = 0; k <= 2; ++k) {
      const WDCollection wd = build_wd(inst.pair, k);
      const WDReport report = check_wd(wd, inst.pair);
      INFO("seed " << seed << " level " << k
                   << (report.ok() ? "" : " first: " + report.violations[0].condition +
                                              " " + report.violations[0].detail));
      REQUIRE(report.ok());
    }
  }
}

TEST_CASE("build_wd is deterministic") {
  const Instance inst = generate_instance(15, 6, 42);
  REQUIRE(collections_equal(build_wd(inst.pair, 1), build_wd(inst.pair, 1)));
}

TEST_CASE("the union of cells covers the complement of A") {
  const Instance inst = generate_instance(16, 5, 3);
  const WDCollection wd = build_wd(inst.pair, 0);
  for (int x : inst.pair.outside_indices) {
    bool covered = false;
    for (const auto& cell : wd.cells)
      if (std::binary_search(cell.members.begin(), cell.members.end(), x)) covered = true;
    REQUIRE(covered);
  }
}

TEST_CASE("sup_partition evaluates the rescaling formula") {
  // Two synthetic cells over a single outside point.
  Matrix w = {{0, 1}, {1, 0}};
  auto space = FiniteMetricSpace::create({"a", "x"}, w, MetricMode::Metric);
  const SubsetPair pair = SubsetPair::create(std::move(space), {0});
  auto make_collection = [&](double g1, double g2) {
    WDCollection c;
    c.level = 0;
    WDCell cell1{{1}, 1, 0, 0, {0.0, g1}, {}};
    WDCell cell2{{1}, 1, 0, 0, {0.0, g2}, {}};
    c.cells = {cell1, cell2};
    sup_partition(c, pair);
    return c;
  };
  SECTION("single active cell saturates") {
    WDCollection c;
    c.level = 0;
    c.cells = {WDCell{{1}, 1, 0, 0, {0.0, 1.0}, {}}};
    sup_partition(c, pair);
    REQUIRE(c.cells[0].sigma[1] == 1.0);
  }
  SECTION("gamma (0.9, 0.1) rescales to (1, 2/9)") {
    const auto c = make_collection(0.9, 0.1);
    REQUIRE(c.cells[0].sigma[1] == 1.0);
    REQUIRE_THAT(c.cells[1].sigma[1], Catch::Matchers::WithinAbs(2.0 / 9.0, 1e-15));
  }
  SECTION("gamma (0.5, 0.5): both reach the cap") {
    const auto c = make_collection(0.5, 0.5);
    REQUIRE(c.cells[0].sigma[1] == 1.0);
    REQUIRE(c.cells[1].sigma[1] == 1.0);
  }
  SECTION("an uncovered outside point is a structural failure") {
    WDCollection c;
    c.level = 0;
    c.cells = {WDCell{{1}, 1, 0, 0, {0.0, 0.0}, {}}};
    REQUIRE_THROWS_AS(sup_partition(c, pair), StructuralError);
  }
}

TEST_CASE("check_wd witnesses planted violations") {
  const Instance inst = generate_instance(12, 4, 11);
  WDCollection wd = build_wd(inst.pair, 0);
  REQUIRE(check_wd(wd, inst.pair).ok());

  SECTION("replacing an anchor with the farthest one breaks WD3 or factor4") {
    WDCollection bad = wd;
    for (auto& cell : bad.cells) {
      int farthest = inst.pair.subset_indices[0];
      for (int a : inst.pair.subset_indices)
        if (inst.pair.w(cell.center, a) > inst.pair.w(cell.center, farthest)) farthest = a;
      cell.anchor = farthest;
    }
    const auto report = check_wd(bad, inst.pair);
    REQUIRE_FALSE(report.ok());
    bool saw = false;
    for (const auto& v : report.violations)
      if (v.condition == "WD3" || v.condition == "factor4") saw = true;
    REQUIRE(saw);
  }
  SECTION("rescaling gamma by 0.5 breaks WD5") {
    WDCollection bad = wd;
    for (auto& cell : bad.cells)
      for (auto& g : cell.gamma) g *= 0.5;
    const auto report = check_wd(bad, inst.pair);
    REQUIRE_FALSE(report.ok());
    bool saw = false;
    for (const auto& v : report.violations)
      if (v.condition == "WD5") saw = true;
    REQUIRE(saw);
  }
}

TEST_CASE("factor-4 anchor bound holds with only arithmetic slack") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const Instance inst = generate_instance(14, 6, seed);
    for (int k = 0; k <= 2; ++k) {
      const WDCollection wd = build_wd(inst.pair, k);
      for (const auto& cell : wd.cells)
        for (int x : inst.pair.outside_indices) {
          if (cell.gamma[x] <= 0.0) continue;
          for (int a : inst.pair.subset_indices)
            REQUIRE(inst.pair.w(a, cell.anchor) <= 4.0 * inst.pair.w(a, x) + 1e-12);
        }
    }
  }
}
