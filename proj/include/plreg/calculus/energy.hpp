#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "plreg/calculus/cutoff.hpp"
#include "plreg/calculus/levelset.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"
#include "plreg/solver/flux.hpp"

namespace plreg {

// Nonnegative bounded Lipschitz weight f(v) together with f' and the
// primitive G(v) = int_0^v s f(s) ds.
struct WeightFunction {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::function<double(double)> primitive;

  static WeightFunction one() {
    WeightFunction w;
    w.f = [](double) { return 1.0; };
    w.fprime = [](double) { return 0.0; };
    w.primitive = [](double v) { return 0.5 * v * v; };
    return w;
  }

  // f(v) = v^alpha (v - k)_+^beta, admissible for alpha >= 0, beta >= 1.
  // The primitive is integrated numerically (Simpson on [k, v]).
  static WeightFunction power_truncated(double alpha, double beta, double k) {
    if (beta < 1.0)
      throw std::invalid_argument("WeightFunction: beta must be >= 1");
    if (alpha < 0.0)
      throw std::invalid_argument("WeightFunction: alpha must be >= 0");
    WeightFunction w;
    w.f = [=](double v) {
      if (v <= k) return 0.0;
      return std::pow(v, alpha) * std::pow(v - k, beta);
    };
    w.fprime = [=](double v) {
      if (v <= k) return 0.0;
      const double a = alpha > 0.0
                           ? alpha * std::pow(v, alpha - 1.0) * std::pow(v - k, beta)
                           : 0.0;
      const double b = beta * std::pow(v, alpha) * std::pow(v - k, beta - 1.0);
      return a + b;
    };
    w.primitive = [=](double v) {
      if (v <= k) return 0.0;
      auto integrand = [=](double s) {
        return std::pow(s, 1.0 + alpha) * std::pow(s - k, beta);
      };
      // composite Simpson over [k, v]
      const int n = 64;
      const double hh = (v - k) / n;
      double acc = integrand(k) + integrand(v);
      for (int i = 1; i < n; ++i)
        acc += integrand(k + i * hh) * (i % 2 == 1 ? 4.0 : 2.0);
      return acc * hh / 3.0;
    };
    return w;
  }
};

struct EnergyBalance {
  double lhs_sup = 0.0;    // worst slice increment of int G(v) zeta^2 dx
  double lhs_hess = 0.0;   // v^{p-2} |D^2 u|^2 f(v) zeta^2
  double lhs_gradv = 0.0;  // v^{p-1} |grad v|^2 f'(v) zeta^2
  double lhs_cross = 0.0;  // (p-2) v^{p-3} <grad v, grad u>^2 f'(v) zeta^2
  double rhs_grad = 0.0;   // v^p f(v) |grad zeta|^2
  double rhs_time = 0.0;   // G(v) zeta |zeta_t|
  double empirical_C = 0.0;
  bool vacuous = false;
};

// Evaluates every term of the weighted energy balance for the gradient
// magnitude of a solution field on a backward cylinder and reports the
// smallest constant making LHS <= C * RHS.
inline EnergyBalance energy_balance(const GridFunction& u,
                                    const WeightFunction& w,
                                    const ParabolicCylinder& cyl,
                                    const CutoffFunction& cutoff,
                                    const FluxParams& fp) {
  const auto& g = u.grid();
  const double p = fp.p;
  const auto nodes = cylinder_nodes(g, cyl);
  if (nodes.empty()) return EnergyBalance{.vacuous = true};

  const auto grad_u = discrete_gradient(u);
  const auto v = gradient_magnitude(grad_u);
  const auto grad_v = discrete_gradient(v);
  const auto hess_sq = hessian_norm_sq(u);
  const auto& zeta = cutoff.value();
  const auto& zgrad = cutoff.grad_mag();
  const auto& zdt = cutoff.dt_mag();

  EnergyBalance out;
  // slice increments of int G(v) zeta^2 dx relative to the initial slice
  {
    const std::int64_t sn = g.spatial_nodes();
    double first = 0.0;
    bool have_first = false;
    double worst = 0.0;
    std::size_t b = 0;
    while (b < nodes.size()) {
      const auto level = nodes[b] / sn;
      double acc = 0.0;
      std::size_t e = b;
      while (e < nodes.size() && nodes[e] / sn == level) {
        const auto i = nodes[e];
        acc += w.primitive(v[i]) * zeta[i] * zeta[i];
        ++e;
      }
      acc *= g.spatial_cell();
      if (!have_first) {
        first = acc;
        have_first = true;
      }
      worst = std::max(worst, acc - first);
      b = e;
    }
    out.lhs_sup = worst;
  }

  auto pow_guard = [](double base, double e) {
    if (base == 0.0) return e > 0.0 ? 0.0 : 0.0;  // weighted terms vanish first
    return std::pow(base, e);
  };

  out.lhs_hess = integrate_nodes(g, nodes, [&](std::int64_t i) {
    const double fw = w.f(v[i]);
    if (fw == 0.0) return 0.0;
    return pow_guard(v[i], p - 2.0) * hess_sq[i] * fw * zeta[i] * zeta[i];
  });
  out.lhs_gradv = integrate_nodes(g, nodes, [&](std::int64_t i) {
    const double fw = w.fprime(v[i]);
    if (fw == 0.0) return 0.0;
    double gv = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const double c = grad_v.comp[static_cast<std::size_t>(d)][i];
      gv += c * c;
    }
    return pow_guard(v[i], p - 1.0) * gv * fw * zeta[i] * zeta[i];
  });
  out.lhs_cross = integrate_nodes(g, nodes, [&](std::int64_t i) {
    const double fw = w.fprime(v[i]);
    if (fw == 0.0) return 0.0;
    double dot = 0.0;
    for (int d = 0; d < g.dim(); ++d)
      dot += grad_v.comp[static_cast<std::size_t>(d)][i] *
             grad_u.comp[static_cast<std::size_t>(d)][i];
    return (p - 2.0) * pow_guard(v[i], p - 3.0) * dot * dot * fw * zeta[i] *
           zeta[i];
  });
  out.rhs_grad = integrate_nodes(g, nodes, [&](std::int64_t i) {
    const double fw = w.f(v[i]);
    if (fw == 0.0) return 0.0;
    return pow_guard(v[i], p) * fw * zgrad[i] * zgrad[i];
  });
  out.rhs_time = integrate_nodes(g, nodes, [&](std::int64_t i) {
    return w.primitive(v[i]) * zeta[i] * zdt[i];
  });

  const double lhs = out.lhs_sup + out.lhs_hess + out.lhs_gradv + out.lhs_cross;
  const double rhs = out.rhs_grad + out.rhs_time;
  if (rhs == 0.0) {
    out.vacuous = true;
    out.empirical_C = 0.0;
  } else {
    out.empirical_C = std::max(lhs, 0.0) / rhs;
  }
  return out;
}

struct TruncatedEnergy {
  double lhs_sup = 0.0;   // (e)(k/2)^gamma sup_t int ((v-k')^{e/2} zeta)^2 dx
  double lhs_grad = 0.0;  // (k/2)^{p-2+gamma} int |grad((v-k')^{e/2} zeta)|^2
  double rhs_grad = 0.0;  // (a+b+2)^2 int v^{p+a+b} 1_{v>=k'} |grad zeta|^2
  double rhs_time = 0.0;  // (a+b+2)   int v^{2+a+b} 1_{v>=k'} |zeta_t|
  double empirical_C = 0.0;
  bool vacuous = false;
};

// Truncated energy estimate for the gradient magnitude at level k_next with
// exponent triple (alpha, beta, gamma); e = alpha + beta + 2 - gamma.
inline TruncatedEnergy truncated_energy(const GridFunction& v,
                                        const ParabolicCylinder& outer,
                                        const CutoffFunction& cutoff, double k,
                                        double k_next, double alpha,
                                        double beta, double gamma, double p) {
  if (!(alpha >= gamma) || !(beta >= 1.0))
    throw std::invalid_argument(
        "truncated_energy: exponents must satisfy alpha >= gamma, beta >= 1");
  const auto& g = v.grid();
  const double e = alpha + beta + 2.0 - gamma;
  const auto nodes = cylinder_nodes(g, outer);
  TruncatedEnergy out;
  if (nodes.empty()) return TruncatedEnergy{.vacuous = true};

  GridFunction w(v.grid_ptr());
  const auto& zeta = cutoff.value();
  for (std::int64_t i = 0; i < w.size(); ++i)
    w[i] = std::pow(std::max(v[i] - k_next, 0.0), e / 2.0) * zeta[i];
  const auto grad_w = discrete_gradient(w);

  {
    const std::int64_t sn = g.spatial_nodes();
    double worst = 0.0;
    std::size_t b = 0;
    while (b < nodes.size()) {
      const auto level = nodes[b] / sn;
      double acc = 0.0;
      std::size_t e2 = b;
      while (e2 < nodes.size() && nodes[e2] / sn == level) {
        acc += w[nodes[e2]] * w[nodes[e2]];
        ++e2;
      }
      worst = std::max(worst, acc * g.spatial_cell());
      b = e2;
    }
    out.lhs_sup = e * std::pow(k / 2.0, gamma) * worst;
  }
  out.lhs_grad = std::pow(k / 2.0, p - 2.0 + gamma) *
                 integrate_nodes(g, nodes, [&](std::int64_t i) {
                   double s = 0.0;
                   for (int d = 0; d < g.dim(); ++d) {
                     const double c = grad_w.comp[static_cast<std::size_t>(d)][i];
                     s += c * c;
                   }
                   return s;
                 });
  const auto& zgrad = cutoff.grad_mag();
  const auto& zdt = cutoff.dt_mag();
  const double ab2 = alpha + beta + 2.0;
  out.rhs_grad = ab2 * ab2 *
                 integrate_nodes(g, nodes, [&](std::int64_t i) {
                   if (v[i] < k_next) return 0.0;
                   return std::pow(v[i], p + alpha + beta) * zgrad[i] * zgrad[i];
                 });
  out.rhs_time = ab2 * integrate_nodes(g, nodes, [&](std::int64_t i) {
                   if (v[i] < k_next) return 0.0;
                   return std::pow(v[i], 2.0 + alpha + beta) * zdt[i];
                 });
  const double lhs = out.lhs_sup + out.lhs_grad;
  const double rhs = out.rhs_grad + out.rhs_time;
  if (rhs == 0.0) {
    out.vacuous = true;
    out.empirical_C = 0.0;
  } else {
    out.empirical_C = lhs / rhs;
  }
  return out;
}

}  // namespace plreg
