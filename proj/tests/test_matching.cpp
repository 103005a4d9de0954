#include <doctest.h>

#include "support.hpp"
#include "tpot/matching.hpp"

using namespace tpot;

namespace {

PersistencePoint pt(int dim, double b, double d, Pixel bp = {}, Pixel dp = {}, bool essential = false) {
  return {dim, b, d, essential, bp, dp};
}

PersistenceDiagram diagram(std::vector<PersistencePoint> pts, Dims dims = {}) {
  return {std::move(pts), dims, std::nullopt};
}

double cost(const Matching& m) {
  double total = 0.0;
  for (const auto& pair : m.pairs) {
    const auto [bt, dt] = target_coordinates(pair);
    total += (pair.gen.birth - bt) * (pair.gen.birth - bt) + (pair.gen.death - dt) * (pair.gen.death - dt);
  }
  return total;
}

double target_persistence(const MatchPair& p) { return p.target ? p.target->persistence() : 0.0; }

}  // namespace

TEST_SUITE("matching") {
  TEST_CASE("single forced pair") {
    const auto m = match(diagram({pt(1, 0.9, 0.1)}), diagram({pt(1, 1.0, 0.0)}));
    REQUIRE(m.pairs.size() == 1);
    REQUIRE(m.pairs[0].target);
    CHECK(m.pairs[0].target->birth == 1.0);
    CHECK(m.pairs[0].target->death == 0.0);
  }

  TEST_CASE("rank order with one reference slot") {
    const auto m =
        match(diagram({pt(1, 0.6, 0.4, {0, 1}), pt(1, 0.9, 0.1, {0, 2})}), diagram({pt(1, 1.0, 0.0)}));
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[0].gen.birth == 0.9);
    CHECK(m.pairs[0].target->birth == 1.0);
    CHECK(m.pairs[1].gen.birth == 0.6);
    CHECK(m.pairs[1].to_diagonal());
    const auto [b, d] = target_coordinates(m.pairs[1]);
    CHECK(b == 0.5);
    CHECK(d == 0.5);
  }

  TEST_CASE("diagonal targets are midpoints") {
    CHECK(diagonal_target(pt(0, 0.6, 0.4)) == std::pair{0.5, 0.5});
    CHECK(diagonal_target(pt(0, 0.8, 0.8)) == std::pair{0.8, 0.8});
    CHECK(diagonal_target(pt(0, 1.0, 0.0)) == std::pair{0.5, 0.5});
  }

  TEST_CASE("essential points only meet essential points") {
    const auto gen = diagram({pt(0, 0.9, 0.1, {0, 0}, {1, 1}, true), pt(0, 0.95, 0.0, {2, 2})});
    const auto ref = diagram({pt(0, 0.7, 0.2, {0, 0}, {1, 1}, true)});
    const auto m = match(gen, ref, 0.5);
    REQUIRE(m.pairs.size() == 2);
    CHECK(m.pairs[0].gen.essential);
    CHECK(m.pairs[0].target->essential);
    CHECK_FALSE(m.pairs[1].gen.essential);
    CHECK(m.pairs[1].to_diagonal());
  }

  TEST_CASE("eps_min drops low-persistence generated points") {
    const auto gen = diagram({pt(1, 0.9, 0.1, {0, 0}), pt(1, 0.55, 0.5, {0, 1})});
    const auto ref = diagram({pt(1, 1.0, 0.0)});
    CHECK(match(gen, ref, 0.0).pairs.size() == 2);
    const auto m = match(gen, ref, 0.06);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0].gen.birth == 0.9);
  }

  TEST_CASE("dims must agree") {
    CHECK_THROWS_AS(match(diagram({}, Dims{true, false}), diagram({}, Dims{true, true})),
                    std::invalid_argument);
  }

  TEST_CASE("dimensions never cross") {
    const auto gen = diagram({pt(0, 0.9, 0.1, {0, 0}), pt(1, 0.8, 0.2, {0, 1})});
    const auto ref = diagram({pt(1, 1.0, 0.0)});
    const auto m = match(gen, ref);
    for (const auto& p : m.pairs) {
      if (p.target) CHECK(p.target->dim == p.gen.dim);
    }
    CHECK(m.pairs[0].gen.dim == 0);
    CHECK(m.pairs[0].to_diagonal());
  }

  TEST_CASE("identity matching costs nothing") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto d = compute_diagram(testing::random_field(9, 9, seed));
      const auto m = match(d, d);
      CHECK(m.pairs.size() == d.points.size());
      for (const auto& p : m.pairs) {
        REQUIRE(p.target);
        CHECK(*p.target == p.gen);
      }
      CHECK(cost(m) == 0.0);
    }
  }

  TEST_CASE("rank monotonicity and function property on random pairs") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto g = compute_diagram(testing::random_field(7, 6, 2 * seed));
      const auto r = compute_diagram(testing::random_field(6, 7, 2 * seed + 1));
      const auto m = match(g, r);
      CHECK(m.pairs.size() == g.points.size());
      for (const auto& a : m.pairs) {
        for (const auto& b : m.pairs) {
          if (a.gen.dim != b.gen.dim || a.gen.essential || b.gen.essential) continue;
          if (a.gen.persistence() > b.gen.persistence()) {
            CHECK(target_persistence(a) >= target_persistence(b));
          }
        }
      }
    }
  }

}  // TEST_SUITE
