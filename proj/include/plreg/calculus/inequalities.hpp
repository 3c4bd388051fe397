#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "plreg/core/reduce.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // 0 when vacuous
  bool vacuous = false;
};

namespace detail {

inline void require_lateral_zero(const GridFunction& v) {
  const auto& g = v.grid();
  for (int it = 0; it < g.nt(); ++it)
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
      for (int ix = 0; ix < g.nx(0); ++ix) {
        const bool bnd = ix == 0 || ix == g.nx(0) - 1 ||
                         (g.dim() == 2 && (iy == 0 || iy == g.nx(1) - 1));
        if (bnd && v.at(it, ix, iy) != 0.0)
          throw std::invalid_argument("nonzero trace on the lateral boundary");
      }
}

}  // namespace detail

// lhs = integral |v|^{q~} with q~ = p~ (N+2)/N over the whole grid;
// rhs = (sup_t int v^2 dx)^{p~/N} * integral |grad v|^{p~}.
// Both sides scale like c^{q~} under v -> c v.
inline RatioReport sobolev_embedding_ratio(const GridFunction& v,
                                           double p_tilde) {
  const auto& g = v.grid();
  const int N = g.dim();
  for (std::int64_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      throw std::invalid_argument("sobolev_embedding_ratio: field must be >= 0");
  detail::require_lateral_zero(v);
  const double q_tilde = p_tilde * (N + 2.0) / N;
  const double cell = g.cell_volume();
  const double sp_cell = g.spatial_cell();
  const std::int64_t sn = g.spatial_nodes();

  RatioReport rep;
  rep.lhs = cell * reduce::sum(static_cast<std::size_t>(v.size()),
                               [&](std::size_t i) {
                                 return std::pow(std::abs(v[static_cast<std::int64_t>(i)]), q_tilde);
                               });
  double sup_slice = 0.0;
  for (int it = 0; it < g.nt(); ++it) {
    const double s = sp_cell *
        reduce::sum(static_cast<std::size_t>(sn), [&](std::size_t i) {
          const double x = v[g.index(it, 0) + static_cast<std::int64_t>(i)];
          return x * x;
        });
    sup_slice = std::max(sup_slice, s);
  }
  const auto grad = discrete_gradient(v);
  const double grad_int = cell *
      reduce::sum(static_cast<std::size_t>(v.size()), [&](std::size_t i) {
        return std::pow(grad.norm_at(static_cast<std::int64_t>(i)), p_tilde);
      });
  rep.rhs = std::pow(sup_slice, p_tilde / N) * grad_int;
  rep.vacuous = rep.lhs == 0.0 && rep.rhs == 0.0;
  rep.ratio = rep.vacuous || rep.rhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

// lhs = ||v||_{L^s(Q)}^s; rhs = |{|v| > 0} cap Q|^{s/(N+s)} ||v||_{V^s(Q)}^s
// with ||f||_{V^s} = sup_t ||f||_{L^s(B)} + || grad f ||_{L^s(Q)}.
inline RatioReport sobolev_poincare_ratio(const GridFunction& v,
                                          const ParabolicCylinder& cyl,
                                          double s_exp) {
  if (!(s_exp > 1.0))
    throw std::invalid_argument("sobolev_poincare_ratio: need s > 1");
  const auto& g = v.grid();
  const int N = g.dim();
  const auto nodes = cylinder_nodes(g, cyl);
  RatioReport rep;
  if (nodes.empty()) {
    rep.vacuous = true;
    return rep;
  }
  rep.lhs = integrate_nodes(g, nodes, [&](std::int64_t i) {
    return std::pow(std::abs(v[i]), s_exp);
  });
  double support_count = 0.0;
  for (auto i : nodes) support_count += (v[i] != 0.0) ? 1.0 : 0.0;
  const double support = support_count * g.cell_volume();

  // group the node set by time level for the slice norms
  double sup_slice = 0.0;
  {
    std::size_t b = 0;
    const std::int64_t sn = g.spatial_nodes();
    while (b < nodes.size()) {
      const int level = static_cast<int>(nodes[b] / sn);
      std::size_t e = b;
      double acc = 0.0;
      while (e < nodes.size() && nodes[e] / sn == level) {
        acc += std::pow(std::abs(v[nodes[e]]), s_exp);
        ++e;
      }
      sup_slice = std::max(sup_slice, acc * g.spatial_cell());
      b = e;
    }
  }
  const auto grad = discrete_gradient(v);
  const double grad_int = integrate_nodes(g, nodes, [&](std::int64_t i) {
    return std::pow(grad.norm_at(i), s_exp);
  });
  const double vnorm = std::pow(sup_slice, 1.0 / s_exp) +
                       std::pow(grad_int, 1.0 / s_exp);
  rep.rhs = std::pow(support, s_exp / (N + s_exp)) * std::pow(vnorm, s_exp);
  rep.vacuous = rep.lhs == 0.0 && rep.rhs == 0.0;
  rep.ratio = rep.vacuous || rep.rhs == 0.0 ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

struct LevelSetPoincare {
  double lhs = 0.0;  // (l - k) |B cap {v > l}|
  double rhs = 0.0;  // rho^{N+1} / |B cap {v <= k}| * int_{B cap {k<v<l}} |grad v|
  bool vacuous = false;  // |{v <= k}| = 0
};

// Single-time-slice level-set inequality on the ball |x - x0| < rho.
inline LevelSetPoincare levelset_poincare(const GridFunction& v, int time_index,
                                          const Point& x0, double rho, double k,
                                          double l) {
  if (!(k < l)) throw std::invalid_argument("levelset_poincare: need k < l");
  const auto& g = v.grid();
  const int N = g.dim();
  LevelSetPoincare out;
  const auto grad = discrete_gradient(v);
  double above = 0.0, below = 0.0, band_grad = 0.0;
  for (int iy = 0; iy < (N == 2 ? g.nx(1) : 1); ++iy)
    for (int ix = 0; ix < g.nx(0); ++ix) {
      Point z;
      z.dim = N;
      z.x[0] = g.x(0, ix);
      if (N == 2) z.x[1] = g.x(1, iy);
      z.t = x0.t;
      if (spatial_distance(z, x0) >= rho) continue;
      const double val = v.at(time_index, ix, iy);
      if (val > l) above += 1.0;
      if (val <= k) below += 1.0;
      if (val > k && val < l)
        band_grad += grad.norm_at(g.index(time_index, ix, iy));
    }
  const double cell = g.spatial_cell();
  out.lhs = (l - k) * above * cell;
  if (below == 0.0) {
    out.vacuous = true;
    return out;
  }
  out.rhs = std::pow(rho, N + 1) / (below * cell) * (band_grad * cell);
  return out;
}

}  // namespace plreg
