#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "mspde/linalg/rng.hpp"
#include "mspde/partition/partition.hpp"

using namespace mspde;

TEST_CASE("grid lattice numbering is lexicographic with x fastest") {
  const Grid g = Grid::rect(0, 1, 4, 0, 2, 2);
  CHECK(g.node_count() == 15);
  CHECK(g.node_id(0, 0) == 0);
  CHECK(g.node_id(4, 0) == 4);
  CHECK(g.node_id(0, 1) == 5);
  CHECK(g.node_id(3, 2) == 13);
  const auto c = g.node_coords(13);
  CHECK(c[0] == 3);
  CHECK(c[1] == 2);
  CHECK(g.coord(0, 3) == doctest::Approx(0.75));
  CHECK(g.coord(1, 2) == doctest::Approx(2.0));
  CHECK(g.on_global_boundary(g.node_id(0, 1)));
  CHECK(g.on_global_boundary(g.node_id(2, 2)));
  CHECK(!g.on_global_boundary(g.node_id(2, 1)));

  CHECK(Grid::line_h(0, 1, 0.125).ax[0].cells == 8);
  CHECK_THROWS_AS(Grid::line_h(0, 1, 0.3), std::invalid_argument);
}

TEST_CASE("perimeter walks counterclockwise from the lowest corner") {
  const Grid g = Grid::rect(0, 1, 3, 0, 1, 3);
  Box b;
  b.lo = {0, 0};
  b.hi = {2, 2};
  const auto per = perimeter_nodes(g, b);
  // bottom edge, right edge, top (reversed), left (reversed)
  const std::vector<long> want = {g.node_id(0, 0), g.node_id(1, 0),
                                  g.node_id(2, 0), g.node_id(2, 1),
                                  g.node_id(2, 2), g.node_id(1, 2),
                                  g.node_id(0, 2), g.node_id(0, 1)};
  CHECK(per == want);

  const Grid l = Grid::line(0, 1, 6);
  Box lb;
  lb.lo = {1, 0};
  lb.hi = {4, 0};
  const auto lper = perimeter_nodes(l, lb);
  CHECK(lper == std::vector<long>{1, 4});
  CHECK(box_local_id(l, lb, 3) == 2);
  CHECK_THROWS_AS(box_local_id(l, lb, 5), std::invalid_argument);
}

TEST_CASE("two 1D patches with overlap 2 share exactly three nodes") {
  const Grid g = Grid::line(0, 1, 8);
  const Partition p = build_partition(g, {2, 1}, 2);
  REQUIRE(p.patches.size() == 2);
  CHECK(p.patches[0].box.lo[0] == 0);
  CHECK(p.patches[0].box.hi[0] == 5);
  CHECK(p.patches[1].box.lo[0] == 3);
  CHECK(p.patches[1].box.hi[0] == 8);

  // chi ramps linearly over the shared band and sums to one everywhere
  const Vector& c0 = p.patches[0].chi;
  const Vector& c1 = p.patches[1].chi;
  const std::vector<double> want0 = {1, 1, 1, 1, 0.5, 0};
  const std::vector<double> want1 = {0, 0.5, 1, 1, 1, 1};
  for (int i = 0; i < 6; ++i) {
    CHECK(c0(i) == doctest::Approx(want0[i]).epsilon(1e-12));
    CHECK(c1(i) == doctest::Approx(want1[i]).epsilon(1e-12));
  }

  CHECK(p.patches[0].neighbors == std::vector<int>{1});
  CHECK(p.patches[1].neighbors == std::vector<int>{0});

  // interior nodes = nodes in no neighboring patch
  CHECK(p.patches[0].interior_nodes == std::vector<long>{0, 1, 2});
  CHECK(p.patches[1].interior_nodes == std::vector<long>{6, 7, 8});
}

TEST_CASE("single patch owns everything with unit weights") {
  const Grid g = Grid::rect(0, 1, 5, 0, 1, 4);
  const Partition p = build_partition(g, {1, 1}, 2);
  REQUIRE(p.patches.size() == 1);
  CHECK(p.patches[0].neighbors.empty());
  CHECK((long)p.patches[0].interior_nodes.size() == g.node_count());
  CHECK(p.patches[0].chi.minCoeff() == 1.0);
  CHECK(p.patches[0].chi.maxCoeff() == 1.0);
}

TEST_CASE("3x3 decomposition gives the center patch eight neighbors") {
  const Grid g = Grid::rect(0, 1, 12, 0, 1, 12);
  const Partition p = build_partition(g, {3, 3}, 2);
  REQUIRE(p.patches.size() == 9);
  CHECK(p.patches[4].neighbors == std::vector<int>{0, 1, 2, 3, 5, 6, 7, 8});
}

TEST_CASE("partition invariants hold across configurations") {
  struct Case {
    int cx, cy, px, py, ov;
  };
  const std::vector<Case> cases = {{8, 1, 2, 1, 2},  {16, 1, 3, 1, 4},
                                   {12, 12, 2, 2, 2}, {16, 12, 3, 2, 3},
                                   {20, 20, 4, 3, 4}, {9, 7, 2, 2, 1}};
  for (const auto& cs : cases) {
    CAPTURE(cs.cx);
    CAPTURE(cs.px);
    CAPTURE(cs.ov);
    const Grid g = cs.cy == 1 ? Grid::line(0, 1, cs.cx)
                              : Grid::rect(0, 1, cs.cx, 0, 2, cs.cy);
    const Partition p = build_partition(g, {cs.px, cs.py}, cs.ov);

    // every node covered, owners consistent, chi sums to one
    Vector chisum = Vector::Zero(g.node_count());
    std::vector<int> cover(g.node_count(), 0);
    for (const Patch& k : p.patches) {
      const auto nodes = box_nodes(g, k.box);
      REQUIRE((long)k.chi.size() == (long)nodes.size());
      for (size_t i = 0; i < nodes.size(); ++i) {
        chisum(nodes[i]) += k.chi(i);
        cover[nodes[i]] += 1;
        CHECK(k.chi(i) >= 0.0);
        CHECK(k.chi(i) <= 1.0);
      }
      for (long n : k.interior_nodes) CHECK(p.owner[n] == k.id);
    }
    for (long n = 0; n < g.node_count(); ++n) {
      CHECK(cover[n] >= 1);
      CHECK(chisum(n) == doctest::Approx(1.0).epsilon(1e-12));
    }

    for (const Patch& k : p.patches) {
      // neighbor symmetry, no self loops
      for (int nb : k.neighbors) {
        CHECK(nb != k.id);
        const auto& back = p.patches[nb].neighbors;
        CHECK(std::find(back.begin(), back.end(), k.id) != back.end());
      }
      // interior nodes are exactly the patch nodes in no neighboring patch
      std::set<long> interior(k.interior_nodes.begin(), k.interior_nodes.end());
      for (long n : box_nodes(g, k.box)) {
        bool in_neighbor = false;
        for (int nb : k.neighbors) {
          const auto c = g.node_coords(n);
          if (p.patches[nb].box.contains(c[0], c[1])) in_neighbor = true;
        }
        CHECK(interior.count(n) == (in_neighbor ? 0u : 1u));
      }
    }
  }
}

TEST_CASE("build_partition rejects impossible layouts") {
  const Grid g = Grid::line(0, 1, 8);
  CHECK_THROWS_WITH_AS(build_partition(g, {2, 1}, 8),
                       "build_partition: degenerate overlap",
                       std::invalid_argument);
  CHECK_THROWS_AS(build_partition(g, {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_partition(g, {2, 1}, 0), std::invalid_argument);
}

TEST_CASE("restrict and extend round-trip patch fields") {
  const Grid g = Grid::rect(0, 1, 6, 0, 1, 6);
  const Partition p = build_partition(g, {2, 2}, 2);
  const Patch& k = p.patches[1];

  Vector coords(g.node_count());
  for (long n = 0; n < g.node_count(); ++n)
    coords(n) = g.coord(0, g.node_coords(n)[0]);
  const Vector local = restrict_to_patch(p, k, coords);
  const auto nodes = box_nodes(g, k.box);
  REQUIRE((long)local.size() == (long)nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    CHECK(local(i) == coords(nodes[i]));

  CHECK(restrict_to_patch(p, k, Vector::Ones(g.node_count())).minCoeff() == 1.0);

  const Vector back = restrict_to_patch(p, k, extend_by_zero(p, k, local));
  CHECK((back - local).cwiseAbs().maxCoeff() == 0.0);

  // two values per node
  Vector two = Vector::LinSpaced(2 * g.node_count(), 0, 1);
  const Vector l2 = restrict_to_patch(p, k, two, 2);
  CHECK((restrict_to_patch(p, k, extend_by_zero(p, k, l2, 2), 2) - l2)
            .cwiseAbs()
            .maxCoeff() == 0.0);

  CHECK_THROWS_AS(restrict_to_patch(p, k, Vector::Ones(3)),
                  std::invalid_argument);
}

TEST_CASE("pou_blend reproduces constants and ramps across overlaps") {
  const Grid g = Grid::line(0, 1, 8);
  const Partition p = build_partition(g, {2, 1}, 2);

  std::vector<Vector> consts = {Vector::Constant(6, 3.5), Vector::Constant(6, 3.5)};
  const Vector c = pou_blend(p, consts);
  for (long n = 0; n < 9; ++n) CHECK(c(n) == doctest::Approx(3.5).epsilon(1e-12));

  // u1 = 0, u2 = 1: blend equals chi_2, the linear ramp over nodes 3..5
  std::vector<Vector> step = {Vector::Zero(6), Vector::Ones(6)};
  const Vector s = pou_blend(p, step);
  const std::vector<double> want = {0, 0, 0, 0, 0.5, 1, 1, 1, 1};
  for (long n = 0; n < 9; ++n) CHECK(s(n) == doctest::Approx(want[n]).epsilon(1e-12));

  // linearity
  CounterRng rng(4);
  std::vector<Vector> f(2), h(2), combo(2);
  for (int m = 0; m < 2; ++m) {
    f[m] = Vector::NullaryExpr(6, [&](Eigen::Index) { return rng.normal(); });
    h[m] = Vector::NullaryExpr(6, [&](Eigen::Index) { return rng.normal(); });
    combo[m] = 2.0 * f[m] - 3.0 * h[m];
  }
  const Vector lhs = pou_blend(p, combo);
  const Vector rhs = 2.0 * pou_blend(p, f) - 3.0 * pou_blend(p, h);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

  std::vector<Vector> missing = {Vector::Zero(6)};
  CHECK_THROWS_AS(pou_blend(p, missing), std::invalid_argument);

  // single patch: identity
  const Partition one = build_partition(g, {1, 1}, 2);
  Vector v = Vector::LinSpaced(9, 0, 1);
  CHECK((pou_blend(one, {v}) - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partition exports a JSON summary") {
  const Grid g = Grid::rect(0, 1, 8, 0, 1, 8);
  const Partition p = build_partition(g, {2, 2}, 2);
  const nlohmann::json j = partition_to_json(p);
  REQUIRE(j.contains("patches"));
  REQUIRE(j["patches"].size() == 4);
  CHECK(j["patches"][0].contains("box"));
  CHECK(j["patches"][0].contains("neighbors"));
  CHECK(j["patches"][0].contains("chi"));
  CHECK(j["overlap"] == 2);
}
