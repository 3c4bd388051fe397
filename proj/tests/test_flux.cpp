#include <catch2/catch_amalgamated.hpp>

#include "plreg/core/rng.hpp"
#include "plreg/solver/flux.hpp"

using namespace plreg;

TEST_CASE("flux closed form") {
  SECTION("singular origin maps to zero for p < 2 with s = 0") {
    FluxParams fp{1.5, 0.0, 0.5, 1.0};
    const auto out = flux(vec2(0, 0), fp);
    CHECK(out.v[0] == 0.0);
    CHECK(out.v[1] == 0.0);
  }

  SECTION("p = 2 is the identity for any s") {
    FluxParams fp{2.0, 0.7, 1.0, 1.0};
    const auto out = flux(vec2(0.3, -1.2), fp);
    CHECK(out.v[0] == Catch::Approx(0.3));
    CHECK(out.v[1] == Catch::Approx(-1.2));
  }

  SECTION("p = 4, s = 0, zeta = (2,0)") {
    FluxParams fp{4.0, 0.0, 1.0, 3.0};
    const auto out = flux(vec2(2, 0), fp);
    CHECK(out.v[0] == Catch::Approx(8.0));
    CHECK(out.v[1] == 0.0);
  }

  SECTION("p <= 1 rejected") {
    FluxParams fp{1.0, 0.0, 1.0, 1.0};
    CHECK_THROWS_AS(flux(vec1(1.0), fp), std::invalid_argument);
  }

  SECTION("odd symmetry") {
    FluxParams fp{2.7, 0.3, 1.0, 2.0};
    CounterRng rng(3, 0);
    for (int k = 0; k < 200; ++k) {
      const auto z = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
      const auto a = flux(z, fp);
      const auto b = flux(vec2(-z.v[0], -z.v[1]), fp);
      CHECK(a.v[0] == Catch::Approx(-b.v[0]).margin(1e-15));
      CHECK(a.v[1] == Catch::Approx(-b.v[1]).margin(1e-15));
    }
  }
}

TEST_CASE("flux jacobian") {
  SECTION("p = 2 gives the identity") {
    FluxParams fp{2.0, 0.1, 1.0, 1.0};
    const auto j = flux_jacobian(vec2(0.4, 0.9), fp);
    CHECK(j.m[0][0] == Catch::Approx(1.0));
    CHECK(j.m[1][1] == Catch::Approx(1.0));
    CHECK(j.m[0][1] == Catch::Approx(0.0).margin(1e-15));
  }

  SECTION("p = 4, zeta = (1,0), s = 0 gives diag(3,1)") {
    FluxParams fp{4.0, 0.0, 1.0, 3.0};
    const auto j = flux_jacobian(vec2(1, 0), fp);
    CHECK(j.m[0][0] == Catch::Approx(3.0));
    CHECK(j.m[1][1] == Catch::Approx(1.0));
    CHECK(j.m[0][1] == Catch::Approx(0.0).margin(1e-15));
  }

  SECTION("symmetric for random arguments") {
    FluxParams fp{3.3, 0.2, 1.0, 3.0};
    CounterRng rng(11, 0);
    for (int k = 0; k < 200; ++k) {
      const auto j = flux_jacobian(vec2(rng.uniform(-3, 3), rng.uniform(-3, 3)), fp);
      CHECK(j.m[0][1] == j.m[1][0]);
    }
  }

  SECTION("eigenvalues live in [min(1,p-1) m, max(1,p-1) m]") {
    CounterRng rng(19, 0);
    for (double p : {1.5, 2.0, 3.0, 4.5}) {
      FluxParams fp{p, 0.25, 1.0, 10.0};
      for (int k = 0; k < 200; ++k) {
        const auto z = vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
        const double m = std::pow(z.norm_sq() + fp.s * fp.s, (p - 2.0) / 2.0);
        const auto j = flux_jacobian(z, fp);
        CHECK(spectral_norm_sym(j) <= std::max(1.0, p - 1.0) * m * (1 + 1e-12));
        CHECK(min_eig_sym(j) >= std::min(1.0, p - 1.0) * m * (1 - 1e-12));
      }
    }
  }

  SECTION("undefined at the singular point for p < 2") {
    FluxParams fp{1.5, 0.0, 0.5, 1.0};
    CHECK_THROWS_AS(flux_jacobian(vec2(0, 0), fp), std::domain_error);
  }
}

TEST_CASE("flux monotonicity") {
  CounterRng rng(23, 0);
  for (double p : {1.5, 2.0, 3.0}) {
    FluxParams fp{p, 0.1, 1.0, 3.0};
    for (int k = 0; k < 300; ++k) {
      const auto z1 = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
      const auto z2 = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
      const auto f1 = flux(z1, fp);
      const auto f2 = flux(z2, fp);
      const double dot = (f1.v[0] - f2.v[0]) * (z1.v[0] - z2.v[0]) +
                         (f1.v[1] - f2.v[1]) * (z1.v[1] - z2.v[1]);
      CHECK(dot >= -1e-12);
    }
  }
}

TEST_CASE("structure conditions") {
  SECTION("prototype window passes for p = 3") {
    FluxParams fp{3.0, 0.1, std::min(1.0, 3.0 - 1.0), 2.0 * std::max(1.0, 3.0 - 1.0)};
    const auto rep = verify_structure(fp, 2000);
    CHECK(rep.pass);
  }

  SECTION("oversized lower constant fails for p = 1.5") {
    FluxParams fp{1.5, 0.1, 10.0, 20.0};
    const auto rep = verify_structure(fp, 2000);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_lower_ratio < 1.0);
  }

  SECTION("linear case is tight") {
    // ellipticity ratio is exactly 1; the growth side needs C1 = 2 because the
    // |A| term and the |A'| term each contribute |zeta|
    FluxParams fp{2.0, 0.0, 1.0, 2.0};
    const auto rep = verify_structure(fp, 2000);
    CHECK(rep.pass);
    CHECK(rep.worst_lower_ratio == Catch::Approx(1.0));
    CHECK(rep.worst_upper_ratio == Catch::Approx(1.0));
  }
}
