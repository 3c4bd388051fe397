#pragma once

#include <cmath>
#include <vector>

#include "plreg/calculus/levelset.hpp"
#include "plreg/iterate/constants.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

// shrinking radii rho_n = sigma rho + (1-sigma) rho / 2^n
inline double shrinking_radius(double base, double sigma, int n) {
  return sigma * base + (1.0 - sigma) * base / std::pow(2.0, n);
}

struct DeGiorgiStep {
  int n = 0;
  double k_n = 0.0;
  double rho_n = 0.0;
  double theta_n = 0.0;
  double rho_mid = 0.0;   // (rho_n + rho_{n+1}) / 2
  double theta_mid = 0.0;
  double Y = 0.0;
  double step_constant = 0.0;  // smallest admissible constant for this step
};

struct DeGiorgiTrace {
  double k = 0.0;
  bool converged = false;
  bool symmetric_window = true;  // which time-window convention was used
  double empirical_constant = 0.0;
  double sup_v = 0.0;
  std::vector<DeGiorgiStep> steps;
};

inline constexpr double kDeGiorgiTol = 1e-14;
inline constexpr int kDeGiorgiMaxSteps = 40;

// Level-set iteration Y_n = integral over Q_n of (v - k_n)_+^e on the
// shrinking symmetric cylinders; certifies the one-step recursion constant
//   Y_{n+1} <= C growth^n k^{-level_power/(N+2)} (1-sigma)^{-2}
//             (sup v)^{sup_power} radius_weight Y_n^{1 + 2/(N+2)}.
inline DeGiorgiTrace degiorgi_first(const GridFunction& v, const Point& z0,
                                    double sigma, const BoundConstants& bc,
                                    double k) {
  if (!(k >= 1.0))
    throw std::invalid_argument("degiorgi_first: need k >= 1");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("degiorgi_first: need sigma in (0,1)");
  for (std::int64_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      throw std::invalid_argument("degiorgi_first: field must be nonnegative");
  const auto& g = v.grid();
  const double e = bc.integrand_power;

  DeGiorgiTrace tr;
  tr.k = k;
  const auto base =
      ParabolicCylinder::standard(z0, bc.rho, bc.theta, /*backward=*/false);
  tr.sup_v = sup_nodes(v, cylinder_nodes(g, base));

  auto y_at = [&](int n) {
    const double rho_n = shrinking_radius(bc.rho, sigma, n);
    const double theta_n = shrinking_radius(bc.theta, sigma, n);
    const auto cyl = ParabolicCylinder::standard(z0, rho_n, theta_n, false);
    const double k_n = level_at(k, n);
    return integrate_nodes(g, cylinder_nodes(g, cyl), [&](std::int64_t i) {
      return std::pow(std::max(v[i] - k_n, 0.0), e);
    });
  };

  double y_prev = y_at(0);
  for (int n = 0; n <= kDeGiorgiMaxSteps; ++n) {
    DeGiorgiStep st;
    st.n = n;
    st.k_n = level_at(k, n);
    st.rho_n = shrinking_radius(bc.rho, sigma, n);
    st.theta_n = shrinking_radius(bc.theta, sigma, n);
    st.rho_mid = 0.5 * (st.rho_n + shrinking_radius(bc.rho, sigma, n + 1));
    st.theta_mid = 0.5 * (st.theta_n + shrinking_radius(bc.theta, sigma, n + 1));
    st.Y = y_prev;
    if (y_prev < kDeGiorgiTol) {
      tr.converged = true;
      tr.steps.push_back(st);
      break;
    }
    if (n == kDeGiorgiMaxSteps) {
      tr.steps.push_back(st);
      break;
    }
    const double y_next = y_at(n + 1);
    if (y_next > 0.0 && y_prev > 0.0) {
      const double predicted =
          std::pow(bc.growth, n) *
          std::pow(k, -bc.level_power / (bc.N + 2.0)) *
          std::pow(1.0 - sigma, -2.0) * std::pow(tr.sup_v, bc.sup_power) *
          bc.radius_weight * std::pow(y_prev, 1.0 + 2.0 / (bc.N + 2.0));
      if (predicted > 0.0)
        st.step_constant = y_next / predicted;
    }
    tr.empirical_constant = std::max(tr.empirical_constant, st.step_constant);
    tr.steps.push_back(st);
    y_prev = y_next;
  }
  return tr;
}

// Level choice that certifies convergence of the first iteration:
//   k = [growth^{(N+2)/2} J^{2/(N+2)} C1 radius_weight (1-sigma)^{-2}
//        (sup v)^{sup_power}]^{sigma_exp}  capped below by 1.
// The trailing cap is the max-with-1 convention used throughout.
inline double choose_k(const GridFunction& v, const Point& z0, double sigma,
                       const BoundConstants& bc, double C1) {
  const auto& g = v.grid();
  const auto base = ParabolicCylinder::standard(z0, bc.rho, bc.theta, false);
  const auto nodes = cylinder_nodes(g, base);
  const double J = integrate_nodes(g, nodes, [&](std::int64_t i) {
    return std::pow(std::max(v[i], 0.0), bc.integrand_power);
  });
  const double M = sup_nodes(v, nodes);
  if (J <= 0.0 || M <= 0.0) return 1.0;
  const double bracket = std::pow(bc.growth, (bc.N + 2.0) / 2.0) *
                         std::pow(J, 2.0 / (bc.N + 2.0)) * C1 *
                         bc.radius_weight / ((1.0 - sigma) * (1.0 - sigma)) *
                         std::pow(M, bc.sup_power);
  return std::max(std::pow(bracket, bc.sigma), 1.0);
}

struct RoughRecursion {
  double E = 0.0;           // ((p-2+gamma) N + 2 (alpha+beta+2)) / (N+2)
  double D = 0.0;           // 2^{2 + 2(alpha+beta+2-gamma)/(N+2)}
  double B1_empirical = 0.0;
  double threshold = 0.0;   // largest Y_0 with certified decay at this B1
  bool threshold_met = false;
  bool converged = false;
  std::vector<double> Y;
};

// Coarse boundedness recursion: Y_{n+1} <= B1 k^{-E} Y_n^{1+1/(N+2)} D^n on
// the same shrinking cylinders, certified with the measured B1.
inline RoughRecursion rough_lipschitz_recursion(const GridFunction& v,
                                                const Point& z0, double rho,
                                                double theta, double sigma,
                                                const ExponentSet& exps, int N,
                                                double p, double k) {
  RoughRecursion out;
  const double e = exps.alpha + exps.beta + 2.0 - exps.gamma;
  out.E = ((p - 2.0 + exps.gamma) * N + 2.0 * (exps.alpha + exps.beta + 2.0)) /
          (N + 2.0);
  out.D = std::pow(2.0, 2.0 + 2.0 * e / (N + 2.0));
  const auto& g = v.grid();
  auto y_at = [&](int n) {
    const auto cyl = ParabolicCylinder::standard(
        z0, shrinking_radius(rho, sigma, n), shrinking_radius(theta, sigma, n),
        false);
    const double k_n = level_at(k, n);
    return integrate_nodes(g, cylinder_nodes(g, cyl), [&](std::int64_t i) {
      return std::pow(std::max(v[i] - k_n, 0.0), e);
    });
  };
  double y = y_at(0);
  out.Y.push_back(y);
  for (int n = 0; n < kDeGiorgiMaxSteps; ++n) {
    if (y < kDeGiorgiTol) {
      out.converged = true;
      break;
    }
    const double y_next = y_at(n + 1);
    if (y > 0.0 && y_next > 0.0) {
      const double predicted = std::pow(k, -out.E) *
                               std::pow(y, 1.0 + 1.0 / (N + 2.0)) *
                               std::pow(out.D, n);
      out.B1_empirical = std::max(out.B1_empirical, y_next / predicted);
    }
    out.Y.push_back(y_next);
    y = y_next;
  }
  if (y < kDeGiorgiTol) out.converged = true;
  if (out.B1_empirical > 0.0) {
    out.threshold = std::pow(out.B1_empirical * std::pow(k, -out.E),
                             -(N + 2.0)) *
                    std::pow(out.D, -std::pow(N + 2.0, 2.0));
    out.threshold_met = out.Y.front() <= out.threshold;
  }
  return out;
}

}  // namespace plreg
