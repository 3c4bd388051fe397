#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "plreg/core/rng.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/solver/evolve.hpp"
#include "plreg/solver/oracles.hpp"

using namespace plreg;

namespace {

double mass_1d(const Slice& u, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) s += u[i];
  return s * h;  // periodic: last node duplicates the first
}

}  // namespace

TEST_CASE("explicit step basics") {
  const auto g = share(SpaceTimeGrid::make_1d(0.05, 0.0001, -1, 1, 0, 0.002));
  FluxParams fp{3.0, 0.0, 1.0, 4.0};
  SolveConfig cfg;
  cfg.boundary = BoundaryKind::periodic;

  SECTION("constant stays constant") {
    Slice u(static_cast<std::size_t>(g->spatial_nodes()), 2.5);
    const auto v = step(u, *g, fp, cfg, g->t(1));
    for (double x : v) CHECK(x == Catch::Approx(2.5).margin(1e-15));
  }

  SECTION("mass conserved exactly under periodic boundaries") {
    Slice u(static_cast<std::size_t>(g->spatial_nodes()));
    for (int i = 0; i < g->nx(0); ++i)
      u[static_cast<std::size_t>(i)] = std::exp(-4.0 * g->x(0, i) * g->x(0, i));
    u[u.size() - 1] = u[0];
    const double m0 = mass_1d(u, g->h());
    auto v = step(u, *g, fp, cfg, g->t(1));
    v = step(v, *g, fp, cfg, g->t(2));
    CHECK(mass_1d(v, g->h()) == Catch::Approx(m0).epsilon(1e-14));
  }

  SECTION("CFL violation throws") {
    const auto gbad = share(SpaceTimeGrid::make_1d(0.05, 0.01, -1, 1, 0, 0.05));
    Slice u(static_cast<std::size_t>(gbad->spatial_nodes()));
    for (int i = 0; i < gbad->nx(0); ++i)
      u[static_cast<std::size_t>(i)] = 5.0 * std::sin(M_PI * gbad->x(0, i));
    CHECK_THROWS_AS(step(u, *gbad, fp, cfg, gbad->t(1)), CflError);
  }

  SECTION("p below the admissible window is rejected") {
    const auto g2 = share(SpaceTimeGrid::make_2d(0.25, 0.001, 0, 1, 0, 1, 0, 0.01));
    FluxParams bad{0.9, 0.1, 0.5, 2.0};
    Slice u(static_cast<std::size_t>(g2->spatial_nodes()), 0.0);
    CHECK_THROWS_AS(step(u, *g2, bad, cfg, g2->t(1)), std::invalid_argument);
  }
}

TEST_CASE("heat equation Fourier mode decay") {
  // p = 2, u = sin(pi x) on [-1,1] periodic decays like exp(-pi^2 t)
  const double h = 1.0 / 32.0;
  const double dt = 1e-4;
  const auto g = share(SpaceTimeGrid::make_1d(h, dt, -1, 1, 0, 0.02));
  FluxParams fp{2.0, 0.0, 1.0, 2.0};
  SolveConfig cfg;
  cfg.boundary = BoundaryKind::periodic;
  const auto res = solve(g, [](const Point& z) { return std::sin(M_PI * z.x[0]); },
                         fp, cfg);
  const double T = g->t_hi();
  const double expected = std::exp(-M_PI * M_PI * T);
  double worst = 0.0;
  for (int ix = 0; ix < g->nx(0); ++ix) {
    const double ref = expected * std::sin(M_PI * g->x(0, ix));
    worst = std::max(worst, std::abs(res.u.at(g->nt() - 1, ix) - ref));
  }
  CHECK(worst < 5.0 * (dt + h * h * dt / dt) * T + 5e-4);
}

TEST_CASE("explicit comparison principle") {
  const auto g = share(SpaceTimeGrid::make_1d(0.1, 0.0002, -1, 1, 0, 0.002));
  CounterRng rng(77, 0);
  for (double p : {1.5, 2.0, 3.0}) {
    FluxParams fp{p, p < 2 ? 0.1 : 0.0, 1.0, 4.0};
    SolveConfig cfg;
    cfg.boundary = BoundaryKind::periodic;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = static_cast<std::size_t>(g->spatial_nodes());
      Slice u(n), v(n);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        u[i] = rng.uniform(-0.05, 0.05);
        v[i] = u[i] + rng.uniform(0, 0.05);
      }
      u[n - 1] = u[0];
      v[n - 1] = v[0];
      const auto un = step(u, *g, fp, cfg, g->t(1));
      const auto vn = step(v, *g, fp, cfg, g->t(1));
      for (std::size_t i = 0; i < n; ++i) CHECK(un[i] <= vn[i] + 1e-12);
    }
  }
}

TEST_CASE("semi-implicit matches explicit on the heat equation") {
  const auto g = share(SpaceTimeGrid::make_1d(1.0 / 16, 5e-4, -1, 1, 0, 0.01));
  FluxParams fp{2.0, 0.0, 1.0, 2.0};
  SolveConfig ex;
  ex.boundary = BoundaryKind::periodic;
  SolveConfig im = ex;
  im.scheme = Scheme::semi_implicit;
  auto init = [](const Point& z) { return std::cos(M_PI * z.x[0]); };
  const auto a = solve(g, init, fp, ex);
  const auto b = solve(g, init, fp, im);
  double worst = 0.0;
  for (std::int64_t i = 0; i < a.u.size(); ++i)
    worst = std::max(worst, std::abs(a.u[i] - b.u[i]));
  // schemes differ at O(dt^2) per step over 20 steps
  CHECK(worst < 5e-3);
}

TEST_CASE("semi-implicit handles the singular range with regularization") {
  const auto g = share(SpaceTimeGrid::make_1d(1.0 / 16, 1e-3, -1, 1, 0, 0.02));
  FluxParams fp{1.5, 1e-6, 0.5, 2.0};
  SolveConfig cfg;
  cfg.scheme = Scheme::semi_implicit;
  cfg.boundary = BoundaryKind::periodic;
  const auto res = solve(g, [](const Point& z) {
    return std::exp(-8.0 * z.x[0] * z.x[0]);
  }, fp, cfg);
  res.u.check_finite();
  // diffusion shrinks the peak
  CHECK(res.u.at(g->nt() - 1, g->nx(0) / 2) < 1.0);
  CHECK(res.u.at(g->nt() - 1, g->nx(0) / 2) > 0.0);
}

TEST_CASE("heat kernel oracle") {
  SECTION("peak value at t = 1/(4 pi) is one") {
    CHECK(heat_kernel(point1(0.0, 1.0 / (4.0 * M_PI)), 1) == Catch::Approx(1.0));
  }
  SECTION("even in x") {
    CHECK(heat_kernel(point1(0.37, 0.5), 1) ==
          Catch::Approx(heat_kernel(point1(-0.37, 0.5), 1)));
  }
  SECTION("unit mass by quadrature") {
    const double h = 0.01;
    double s = 0.0;
    for (int i = -1500; i <= 1500; ++i)
      s += heat_kernel(point1(i * h, 0.25), 1) * h;
    CHECK(s == Catch::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("Barenblatt oracle") {
  const double p = 3.0;
  Barenblatt bb(p, 1, 1.0);

  SECTION("compact support") {
    const double r = bb.support_radius(1.0);
    CHECK(bb(point1(r * 1.01, 1.0)) == 0.0);
    CHECK(bb(point1(r * 0.99, 1.0)) > 0.0);
  }

  SECTION("mass is invariant between t = 1 and t = 2") {
    const double h = 1e-3;
    auto mass_at = [&](double t) {
      const double R = bb.support_radius(t) + 0.1;
      const int n = static_cast<int>(R / h) + 1;
      double s = 0.0;
      for (int i = -n; i <= n; ++i) s += bb(point1(i * h, t)) * h;
      return s;
    };
    CHECK(mass_at(1.0) == Catch::Approx(1.0).epsilon(1e-4));
    CHECK(mass_at(2.0) == Catch::Approx(1.0).epsilon(1e-4));
  }

  SECTION("p <= 2 rejected") {
    CHECK_THROWS_AS(Barenblatt(2.0, 1, 1.0), std::invalid_argument);
  }
}

TEST_CASE("solver converges to the Barenblatt solution") {
  // one resolution here; the full refinement study lives in the acceptance suite
  const double p = 3.0;
  Barenblatt bb(p, 1, 1.0);
  const double t0 = 0.5, T = 0.1;
  const double h = 1.0 / 32.0;
  const double lam = 2.0;  // rough gradient bound for the CFL budget
  const double dt_target = 0.2 * h * h / (2 * lam);
  const int nsteps = static_cast<int>(std::ceil(T / dt_target));
  const double dt = T / nsteps;
  const auto g = share(SpaceTimeGrid::make_1d(h, dt, -1.5, 1.5, t0, t0 + T));
  FluxParams fp{p, 0.0, 1.0, 4.0};
  SolveConfig cfg;
  cfg.boundary = BoundaryKind::dirichlet_oracle;
  cfg.boundary_values = [&](const Point& z) { return bb(z); };
  const auto res = solve(g, [&](const Point& z) { return bb(z); }, fp, cfg);
  double err = 0.0;
  for (int ix = 0; ix < g->nx(0); ++ix)
    err = std::max(err, std::abs(res.u.at(g->nt() - 1, ix) -
                                 bb(point1(g->x(0, ix), g->t_hi()))));
  CHECK(err < 0.02);
}
