#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plreg/iterate/constants.hpp"
#include "plreg/iterate/degiorgi.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

namespace detail {

// common shape of the closed-form supremum bounds:
//   [ 2^{1/sigma} growth^{(N+2)/2} J^{2/(N+2)} C1 radius_weight (1-s)^{-2}
//   ]^{level_power sigma / (2 eps')}
//   * (4^sigma)^{level_power (level_power - 2 eps') / (4 eps'^2)},
// capped below by 1 (the max-with-1 convention).
inline double sup_bound_formula(double J, double sigma_frac, double eps_eff,
                                const BoundConstants& bc, double C1) {
  if (J < 0.0) throw std::invalid_argument("sup bound: negative integral");
  if (J == 0.0) return 1.0;
  const double bracket = std::pow(2.0, 1.0 / bc.sigma) *
                         std::pow(bc.growth, (bc.N + 2.0) / 2.0) *
                         std::pow(J, 2.0 / (bc.N + 2.0)) * C1 *
                         bc.radius_weight /
                         ((1.0 - sigma_frac) * (1.0 - sigma_frac));
  const double X = bc.level_power;
  const double first = std::pow(bracket, X * bc.sigma / (2.0 * eps_eff));
  const double second = std::pow(std::pow(4.0, bc.sigma),
                                 X * (X - 2.0 * eps_eff) / (4.0 * eps_eff * eps_eff));
  return std::max(first * second, 1.0);
}

}  // namespace detail

// v_integral is the integral of v^{p+eps} over the base cylinder.
inline double lipschitz_bound(double v_integral, double sigma_frac, double rho,
                              double theta, double eps, int N, double p,
                              double C1) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("lipschitz_bound: need eps in (0,1)");
  if (!(sigma_frac > 0.0 && sigma_frac < 1.0))
    throw std::invalid_argument("lipschitz_bound: need sigma in (0,1)");
  const auto e = choose_exponents(ExponentMode::unified, p, N);
  const auto bc = bound_constants(N, p, e, rho, theta);
  return detail::sup_bound_formula(v_integral, sigma_frac, eps, bc, C1);
}

// v_integral is the integral of v^{p-2+eps}; admissible for p >= 2 and
// eps in (0, 2].
inline double degenerate_bound(double v_integral, double sigma_frac, double rho,
                               double theta, double eps, int N, double p,
                               double C1) {
  if (!(p >= 2.0))
    throw std::invalid_argument("degenerate_bound: need p >= 2");
  if (!(eps > 0.0 && eps <= 2.0))
    throw std::invalid_argument("degenerate_bound: need eps in (0,2]");
  const auto e = choose_exponents(ExponentMode::degenerate, p, N);
  const auto bc = bound_constants(N, p, e, rho, theta);
  return detail::sup_bound_formula(v_integral, sigma_frac, eps, bc, C1);
}

// v_integral is the integral of v^{eps}; admissible for 2N/(N+2) < p <= 2 and
// eps in (2-p, 3]; the effective offset is eps + p - 2.
inline double singular_bound(double v_integral, double sigma_frac, double rho,
                             double theta, double eps, int N, double p,
                             double C1) {
  if (!(p > 2.0 * N / (N + 2.0) && p <= 2.0))
    throw std::invalid_argument("singular_bound: need 2N/(N+2) < p <= 2");
  if (!(eps > 2.0 - p && eps <= 3.0))
    throw std::invalid_argument("singular_bound: need eps in (2-p, 3]");
  const auto e = choose_exponents(ExponentMode::singular, p, N);
  const auto bc = bound_constants(N, p, e, rho, theta);
  return detail::sup_bound_formula(v_integral, sigma_frac, eps + p - 2.0, bc, C1);
}

struct SecondIteration {
  std::vector<double> M;              // sup of v over the growing cylinders
  std::vector<double> step_constant;  // measured per-step recursion constants
  double recursion_constant = 0.0;    // max over steps
  double claimed_constant = 0.0;      // bracket^sigma capped below by 1
  bool step_claim_holds = false;      // measured <= claimed at every step
  double final_bound = 0.0;
  double lipschitz_value = 0.0;
  bool consistent = false;  // final_bound reproduces the closed form
};

// Second pass: growing cylinders rho_n = sigma rho + (1-sigma) rho (1-2^{-n}),
// M_n = sup v, checked against M_n <= 2^{2 n sigma} M_{n+1}^{1-a} K with
// a = 2 eps' / level_power, then inverted through the bounded recursion.
inline SecondIteration second_iteration(const GridFunction& v, const Point& z0,
                                        double sigma_frac, double eps,
                                        const BoundConstants& bc, double C1,
                                        int n_levels = 12) {
  if (!(eps > 0.0)) throw std::invalid_argument("second_iteration: need eps > 0");
  const auto& g = v.grid();
  const double eps_eff = bc.mode == ExponentMode::singular
                             ? eps + bc.p - 2.0
                             : eps;
  const double integrand = bc.mode == ExponentMode::unified ? bc.p + eps
                           : bc.mode == ExponentMode::degenerate
                               ? bc.p - 2.0 + eps
                               : eps;
  const auto base = ParabolicCylinder::standard(z0, bc.rho, bc.theta, false);
  const double J = integrate_nodes(g, cylinder_nodes(g, base),
                                   [&](std::int64_t i) {
                                     return std::pow(std::max(v[i], 0.0), integrand);
                                   });
  SecondIteration out;
  auto grow = [&](double base_r, int n) {
    return sigma_frac * base_r +
           (1.0 - sigma_frac) * base_r * (1.0 - std::pow(2.0, -n));
  };
  for (int n = 0; n <= n_levels; ++n) {
    const auto cyl = ParabolicCylinder::standard(
        z0, grow(bc.rho, n), grow(bc.theta, n), false);
    out.M.push_back(sup_nodes(v, cylinder_nodes(g, cyl)));
  }
  const double a = 2.0 * eps_eff / bc.level_power;
  const double bracket = std::pow(bc.growth, (bc.N + 2.0) / 2.0) *
                         std::pow(J, 2.0 / (bc.N + 2.0)) * C1 *
                         bc.radius_weight /
                         ((1.0 - sigma_frac) * (1.0 - sigma_frac));
  out.claimed_constant = std::max(std::pow(bracket, bc.sigma), 1.0);
  out.step_claim_holds = true;
  for (int n = 0; n + 1 <= n_levels; ++n) {
    const double predicted = std::pow(2.0, 2.0 * n * bc.sigma) *
                             std::pow(out.M[static_cast<std::size_t>(n + 1)], 1.0 - a);
    const double c = predicted > 0.0
                         ? out.M[static_cast<std::size_t>(n)] / predicted
                         : 0.0;
    out.step_constant.push_back(c);
    out.recursion_constant = std::max(out.recursion_constant, c);
    if (c > out.claimed_constant * (1.0 + 1e-12)) out.step_claim_holds = false;
  }
  // invert the recursion: Y_0 <= (2 C / b^{1-1/a})^{1/a}
  const double b = std::pow(4.0, bc.sigma);
  out.final_bound = std::pow(
      2.0 * out.claimed_constant / std::pow(b, 1.0 - 1.0 / a), 1.0 / a);
  out.lipschitz_value = detail::sup_bound_formula(J, sigma_frac, eps_eff, bc, C1);
  if (out.claimed_constant > 1.0) {
    out.consistent = std::abs(out.final_bound - out.lipschitz_value) <=
                     1e-9 * std::max(out.final_bound, out.lipschitz_value);
  } else {
    // the cap was active; the closed form may only be larger
    out.consistent = out.lipschitz_value >= 1.0;
  }
  return out;
}

}  // namespace plreg
