#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "plreg/covering/chain.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

namespace detail {

// componentwise mean of the gradient over a node set
inline std::array<double, 2> mean_gradient(const VectorField& grad,
                                           const std::vector<std::int64_t>& nodes) {
  std::array<double, 2> avg{0.0, 0.0};
  if (nodes.empty()) return avg;
  for (int d = 0; d < grad.dim(); ++d) {
    double s = 0.0;
    for (auto i : nodes) s += grad.comp[static_cast<std::size_t>(d)][i];
    avg[static_cast<std::size_t>(d)] = s / static_cast<double>(nodes.size());
  }
  return avg;
}

inline double mean_sq_deviation(const VectorField& grad,
                                const std::vector<std::int64_t>& nodes,
                                const std::array<double, 2>& avg) {
  if (nodes.empty()) return 0.0;
  double s = 0.0;
  for (auto i : nodes) {
    double d2 = 0.0;
    for (int d = 0; d < grad.dim(); ++d) {
      const double c =
          grad.comp[static_cast<std::size_t>(d)][i] - avg[static_cast<std::size_t>(d)];
      d2 += c * c;
    }
    s += d2;
  }
  return s / static_cast<double>(nodes.size());
}

// a cylinder is usable once it carries at least two spatial nodes per axis
// and two time levels
inline bool resolvable(const SpaceTimeGrid& g, const ParabolicCylinder& c) {
  return c.spatial_radius() > g.h() && c.time_halfwidth() > g.dt();
}

}  // namespace detail

struct OscillationDecay {
  std::vector<double> osc;   // mean-square oscillation per level
  std::vector<std::array<double, 2>> avg;
  std::vector<bool> step_holds;   // integral form with the volume factor
  std::vector<bool> level_holds;  // osc_i <= kappa^i mu^2
  int usable_levels = 0;
  double measured_kappa = 0.0;  // worst osc_{i+1} / osc_i
};

// Mean-oscillation decay of the gradient across the shrinking intrinsic
// cylinders Q_{delta^i R}^{mu}; checks both the stepwise contraction and the
// accumulated geometric bound.
inline OscillationDecay oscillation_decay(const VectorField& grad,
                                          const Point& z0, double R, double mu,
                                          double p, double delta, double kappa,
                                          int i_max) {
  const auto& g = grad.grid();
  OscillationDecay out;
  std::vector<std::vector<std::int64_t>> node_sets;
  for (int i = 0; i <= i_max; ++i) {
    const auto cyl = intrinsic_box(z0, std::pow(delta, i) * R, mu, p);
    if (!detail::resolvable(g, cyl)) break;
    auto nodes = cylinder_nodes(g, cyl);
    if (nodes.size() < 4) break;
    const auto avg = detail::mean_gradient(grad, nodes);
    out.avg.push_back(avg);
    out.osc.push_back(detail::mean_sq_deviation(grad, nodes, avg));
    node_sets.push_back(std::move(nodes));
  }
  out.usable_levels = static_cast<int>(out.osc.size());
  const double mu2 = mu * mu;
  for (int i = 0; i < out.usable_levels; ++i) {
    out.level_holds.push_back(out.osc[static_cast<std::size_t>(i)] <=
                              std::pow(kappa, i) * mu2 * (1.0 + 1e-12));
    if (i + 1 < out.usable_levels) {
      const double vol_i = static_cast<double>(node_sets[static_cast<std::size_t>(i)].size());
      const double vol_n = static_cast<double>(node_sets[static_cast<std::size_t>(i + 1)].size());
      // integral form: vol_{i+1} osc_{i+1} <= kappa delta^{N+2} vol_i osc_i,
      // with the discrete volumes standing in for the measure ratio
      const double lhs = vol_n * out.osc[static_cast<std::size_t>(i + 1)];
      const double rhs = kappa * std::pow(delta, g.dim() + 2) * vol_i *
                         out.osc[static_cast<std::size_t>(i)];
      out.step_holds.push_back(lhs <= rhs * (1.0 + 1e-12));
      if (out.osc[static_cast<std::size_t>(i)] > 0.0)
        out.measured_kappa =
            std::max(out.measured_kappa, out.osc[static_cast<std::size_t>(i + 1)] /
                                             out.osc[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

struct CauchyConsequences {
  // smallest constants for the five decay statements
  double c_increment = 0.0;   // |avg_{i+1} - avg_i|^2 vs 2 kappa^i mu^2 (kappa + delta^{-(N+2)})
  double c_nodal = 0.0;       // |grad u(z0) - avg_i|^2 vs kappa^i mu^2
  double c_bracketed = 0.0;   // same with radius rho bracketed by delta powers
  double c_scale = 0.0;       // |grad u(z0) - avg_rho| vs mu0 (rho/S)^{alpha3}
  double c_mean_osc = 0.0;    // mean-square oscillation vs mu0^2 (rho/S)^{2 alpha3}
  int usable_levels = 0;
  int sampled_radii = 0;
};

// Consequences of the oscillation decay at the switching scale: averages form
// a Cauchy sequence converging to the nodal gradient, with scale-graded decay
// over every radius up to the base scale S.
inline CauchyConsequences cauchy_consequences(const VectorField& grad,
                                              const Point& z0, double R_n0,
                                              double mu_n0, double S,
                                              double mu0, double p,
                                              double delta, double kappa,
                                              double alpha3, int i_max = 12,
                                              int n_radii = 24) {
  const auto& g = grad.grid();
  CauchyConsequences out;

  std::vector<std::array<double, 2>> avgs;
  for (int i = 0; i <= i_max; ++i) {
    const auto cyl = intrinsic_box(z0, std::pow(delta, i) * R_n0, mu_n0, p);
    if (!detail::resolvable(g, cyl)) break;
    const auto nodes = cylinder_nodes(g, cyl);
    if (nodes.size() < 4) break;
    avgs.push_back(detail::mean_gradient(grad, nodes));
  }
  out.usable_levels = static_cast<int>(avgs.size());
  if (out.usable_levels == 0) return out;

  // nodal gradient at the nearest node to z0
  std::array<double, 2> g0{0.0, 0.0};
  {
    const int it = static_cast<int>(std::round((z0.t - g.t_lo()) / g.dt()));
    const int ix = static_cast<int>(std::round((z0.x[0] - g.x_lo(0)) / g.h()));
    const int iy = g.dim() == 2
                       ? static_cast<int>(std::round((z0.x[1] - g.x_lo(1)) / g.h()))
                       : 0;
    for (int d = 0; d < g.dim(); ++d)
      g0[static_cast<std::size_t>(d)] =
          grad.comp[static_cast<std::size_t>(d)][g.index(it, ix, iy)];
  }
  auto dist_sq = [&](const std::array<double, 2>& a,
                     const std::array<double, 2>& b) {
    double s = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const double c = a[static_cast<std::size_t>(d)] - b[static_cast<std::size_t>(d)];
      s += c * c;
    }
    return s;
  };

  const double mu2 = mu_n0 * mu_n0;
  const double dpow = std::pow(delta, -(g.dim() + 2.0));
  for (int i = 0; i + 1 < out.usable_levels; ++i) {
    const double lhs = dist_sq(avgs[static_cast<std::size_t>(i + 1)],
                               avgs[static_cast<std::size_t>(i)]);
    const double rhs = 2.0 * std::pow(kappa, i) * mu2 * (kappa + dpow);
    if (rhs > 0.0) out.c_increment = std::max(out.c_increment, lhs / rhs);
  }
  for (int i = 0; i < out.usable_levels; ++i) {
    const double lhs = dist_sq(g0, avgs[static_cast<std::size_t>(i)]);
    const double rhs = std::pow(kappa, i) * mu2;
    if (rhs > 0.0) out.c_nodal = std::max(out.c_nodal, lhs / rhs);
  }

  // radii spanning both branches: below R_n0 via the delta bracketing, and
  // between R_n0 and S
  for (int r = 0; r < n_radii; ++r) {
    const double f = static_cast<double>(r + 1) / n_radii;
    const double rho = std::exp(std::log(S) * f +
                                std::log(std::pow(delta, out.usable_levels - 1) *
                                         R_n0) * (1.0 - f));
    const auto cyl = intrinsic_box(z0, rho, mu_n0, p);
    if (!detail::resolvable(g, cyl)) continue;
    const auto nodes = cylinder_nodes(g, cyl);
    if (nodes.size() < 4) continue;
    const auto avg_rho = detail::mean_gradient(grad, nodes);
    ++out.sampled_radii;
    if (rho < R_n0) {
      const int i = static_cast<int>(
          std::ceil(std::log(rho / R_n0) / std::log(delta) - 1e-12));
      const double rhs = std::pow(kappa, std::max(i, 0)) * mu2;
      if (rhs > 0.0)
        out.c_bracketed = std::max(out.c_bracketed, dist_sq(g0, avg_rho) / rhs);
    }
    const double scale_rhs = mu0 * std::pow(rho / S, alpha3);
    if (scale_rhs > 0.0)
      out.c_scale = std::max(out.c_scale, std::sqrt(dist_sq(g0, avg_rho)) / scale_rhs);
    const double mo = detail::mean_sq_deviation(grad, nodes, avg_rho);
    const double mo_rhs = mu0 * mu0 * std::pow(rho / S, 2.0 * alpha3);
    if (mo_rhs > 0.0) out.c_mean_osc = std::max(out.c_mean_osc, mo / mo_rhs);
  }
  return out;
}

}  // namespace plreg
