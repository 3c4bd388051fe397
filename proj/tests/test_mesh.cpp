#include <catch2/catch_amalgamated.hpp>

#include "plreg/core/rng.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"
#include "plreg/mesh/io.hpp"

using namespace plreg;

TEST_CASE("parabolic distance") {
  CHECK(parabolic_distance(point1(0.3, 1.0), point1(0.3, 1.0)) == 0.0);
  // spatial offset 3, temporal offset 4 -> max{3, 2}
  CHECK(parabolic_distance(point1(0.0, 0.0), point1(3.0, 4.0)) == Catch::Approx(3.0));
  // spatial offset 1, temporal offset 9 -> max{1, 3}
  CHECK(parabolic_distance(point1(0.0, 0.0), point1(1.0, 9.0)) == Catch::Approx(3.0));
  CHECK_THROWS_AS(parabolic_distance(point1(0, 0), point2(0, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("parabolic distance triangle inequality") {
  CounterRng rng(7, 0);
  for (int k = 0; k < 500; ++k) {
    const Point a = point2(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Point b = point2(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Point c = point2(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(parabolic_distance(a, c) <=
          parabolic_distance(a, b) + parabolic_distance(b, c) + 1e-12);
  }
}

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(SpaceTimeGrid::make_1d(-0.1, 0.1, 0, 1, 0, 1),
                  std::invalid_argument);
  // ragged extent
  CHECK_THROWS_AS(SpaceTimeGrid::make_1d(0.3, 0.1, 0, 1, 0, 1),
                  std::invalid_argument);
  // fewer than 3 nodes
  CHECK_THROWS_AS(SpaceTimeGrid::make_1d(1.0, 0.1, 0, 1, 0, 1),
                  std::invalid_argument);
  const auto g = SpaceTimeGrid::make_1d(0.1, 0.05, -1, 1, 0, 0.5);
  CHECK(g.nx(0) == 21);
  CHECK(g.nt() == 11);
  CHECK(g.total_nodes() == 21 * 11);
}

TEST_CASE("cylinder node sets") {
  const auto g = share(SpaceTimeGrid::make_1d(0.1, 0.1, -1, 1, 0, 1));

  SECTION("degenerate radius keeps only the center column") {
    const auto c = ParabolicCylinder::standard(point1(0.0, 0.5), 0.04, 0.25);
    const auto nodes = cylinder_nodes(*g, c);
    for (auto i : nodes) {
      const auto z = g->node_point(i);
      CHECK(z.x[0] == Catch::Approx(0.0).margin(1e-12));
    }
    CHECK(nodes.size() == 5);  // t in (0.25, 0.75) exclusive: 0.3 .. 0.7
  }

  SECTION("intrinsic with lambda = 1 equals the standard cylinder") {
    const auto ci = ParabolicCylinder::intrinsic(point1(0.1, 0.5), 0.35, 1.0, 3.7);
    const auto cs = ParabolicCylinder::standard(point1(0.1, 0.5), 0.35, 0.35 * 0.35);
    CHECK(cylinder_nodes(*g, ci) == cylinder_nodes(*g, cs));
  }

  SECTION("open-ball membership with radius 0.25 gives 5 nodes per level") {
    const auto c = ParabolicCylinder::standard(point1(0.0, 0.5), 0.25, 0.15);
    const auto nodes = cylinder_nodes(*g, c);
    int per_level = 0;
    for (auto i : nodes) {
      const auto z = g->node_point(i);
      if (std::abs(z.t - 0.5) < 1e-12) ++per_level;
    }
    CHECK(per_level == 5);
  }

  SECTION("off-grid center throws, on-grid empty set does not") {
    const auto off = ParabolicCylinder::standard(point1(3.0, 0.5), 0.2, 0.1);
    CHECK_THROWS_AS(cylinder_nodes(*g, off), std::invalid_argument);
    const auto tiny =
        ParabolicCylinder::standard(point1(0.05, 0.5001), 0.01, 1e-6);
    CHECK(cylinder_nodes(*g, tiny).empty());
  }

  SECTION("ordering is ascending (lexicographic in indices)") {
    const auto c = ParabolicCylinder::standard(point1(0.0, 0.5), 0.5, 0.3);
    const auto nodes = cylinder_nodes(*g, c);
    CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  }
}

TEST_CASE("cylinder node sets in two dimensions") {
  const auto g = share(SpaceTimeGrid::make_2d(0.25, 0.1, -1, 1, -1, 1, 0, 1));
  const auto c = ParabolicCylinder::standard(point2(0, 0, 0.5), 0.6, 0.15);
  const auto nodes = cylinder_nodes(*g, c);
  REQUIRE_FALSE(nodes.empty());
  int per_level = 0;
  for (auto i : nodes) {
    const auto z = g->node_point(i);
    CHECK(std::hypot(z.x[0], z.x[1]) < 0.6);
    if (std::abs(z.t - 0.5) < 1e-12) ++per_level;
  }
  // offsets {0, +-0.25, +-0.5} per axis with x^2 + y^2 < 0.36: the full
  // 5x5 block minus the four (+-0.5, +-0.5) corners
  CHECK(per_level == 21);
}

TEST_CASE("intrinsic cylinder geometry") {
  const auto c = ParabolicCylinder::intrinsic(point1(0, 0), 0.4, 2.0, 3.0);
  CHECK(c.spatial_radius() == 0.4 / 2.0);
  CHECK(c.time_halfwidth() == std::pow(2.0, -3.0) * (0.4 * 0.4));
  CHECK_THROWS_AS(ParabolicCylinder::intrinsic(point1(0, 0), 0.4, 0.5, 3.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ParabolicCylinder::standard(point1(0, 0), -0.1, 0.5),
                  std::invalid_argument);
}

TEST_CASE("measure and integrate") {
  const auto g = share(SpaceTimeGrid::make_1d(0.05, 0.05, -1, 1, 0, 1));
  const auto c = ParabolicCylinder::standard(point1(0.0, 0.5), 0.5, 0.25);
  const auto nodes = cylinder_nodes(*g, c);

  SECTION("empty set has measure zero") {
    CHECK(measure(*g, {}) == 0.0);
  }

  SECTION("full grid measure is near the box volume") {
    std::vector<std::int64_t> all(static_cast<std::size_t>(g->total_nodes()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::int64_t>(i);
    const double vol = measure(*g, all);
    // one-cell boundary discrepancy allowance
    CHECK(std::abs(vol - 2.0 * 1.0) <= (g->h() + g->dt()) * (2.0 + 1.0 + 1.0));
  }

  SECTION("additivity over halves") {
    std::vector<std::int64_t> lo(nodes.begin(), nodes.begin() + static_cast<long>(nodes.size() / 2));
    std::vector<std::int64_t> hi(nodes.begin() + static_cast<long>(nodes.size() / 2), nodes.end());
    CHECK(measure(*g, lo) + measure(*g, hi) == Catch::Approx(measure(*g, nodes)));
  }

  SECTION("constant integrates to c * measure, odd function to zero") {
    const auto one = GridFunction(g, 1.0);
    CHECK(integrate(one, c) == Catch::Approx(measure(*g, nodes)));
    const auto cgf = GridFunction(g, 3.25);
    CHECK(integrate(cgf, c) == Catch::Approx(3.25 * measure(*g, nodes)));
    const auto odd = GridFunction::sample(g, [](const Point& z) { return z.x[0]; });
    CHECK(integrate(odd, c) == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("integrate is bounded by sup times measure") {
    const auto f = GridFunction::sample(g, [](const Point& z) {
      return std::sin(13.0 * z.x[0] + 7.0 * z.t);
    });
    CHECK(std::abs(integrate(f, c)) <= 1.0 * measure(*g, nodes) + 1e-12);
  }
}

TEST_CASE("discrete gradient") {
  const auto g = share(SpaceTimeGrid::make_1d(0.1, 0.1, -1, 1, 0, 1));

  SECTION("constant field has zero gradient") {
    const auto u = GridFunction(g, 4.0);
    const auto grad = discrete_gradient(u);
    for (std::int64_t i = 0; i < u.size(); ++i)
      CHECK(grad.comp[0][i] == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("affine is exact everywhere, quadratic exact in the interior") {
    const auto lin = GridFunction::sample(g, [](const Point& z) { return 3.0 * z.x[0]; });
    const auto glin = discrete_gradient(lin);
    for (std::int64_t i = 0; i < lin.size(); ++i)
      CHECK(glin.comp[0][i] == Catch::Approx(3.0).margin(1e-12));

    const auto quad = GridFunction::sample(g, [](const Point& z) { return z.x[0] * z.x[0]; });
    const auto gq = discrete_gradient(quad);
    const auto& gr = *g;
    for (int it = 0; it < gr.nt(); ++it)
      for (int ix = 1; ix + 1 < gr.nx(0); ++ix)
        CHECK(gq.comp[0][gr.index(it, ix)] ==
              Catch::Approx(2.0 * gr.x(0, ix)).margin(1e-12));
  }

  SECTION("2d gradient of a plane") {
    const auto g2 = share(SpaceTimeGrid::make_2d(0.1, 0.1, 0, 1, 0, 1, 0, 0.5));
    const auto u = GridFunction::sample(
        g2, [](const Point& z) { return 2.0 * z.x[0] - 5.0 * z.x[1]; });
    const auto grad = discrete_gradient(u);
    for (std::int64_t i = 0; i < u.size(); ++i) {
      CHECK(grad.comp[0][i] == Catch::Approx(2.0).margin(1e-12));
      CHECK(grad.comp[1][i] == Catch::Approx(-5.0).margin(1e-12));
    }
  }
}

TEST_CASE("field io round trip") {
  const auto g = share(SpaceTimeGrid::make_2d(0.25, 0.1, 0, 1, -1, 0, 0, 0.5));
  const auto u = GridFunction::sample(g, [](const Point& z) {
    return std::cos(z.x[0]) * z.x[1] + z.t;
  });
  const std::string path = "/tmp/plreg_io_test.field";
  write_field(path, u);
  const auto v = read_field(path);
  REQUIRE(v.size() == u.size());
  for (std::int64_t i = 0; i < u.size(); ++i) CHECK(v[i] == u[i]);
  CHECK(v.grid().dim() == 2);
  CHECK(v.grid().nx(1) == g->nx(1));
  write_field_csv("/tmp/plreg_io_test.csv", u);
}

TEST_CASE("deterministic reduction is independent of thread count") {
  std::vector<double> data(100000);
  CounterRng rng(123, 5);
  for (auto& d : data) d = rng.uniform(-1.0, 1.0) * std::exp(rng.uniform(0, 20));
  reduce::set_thread_count(1);
  const double s1 = reduce::sum(data);
  reduce::set_thread_count(3);
  const double s3 = reduce::sum(data);
  reduce::set_thread_count(1);
  CHECK(s1 == s3);
}
