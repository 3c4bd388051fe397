#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plreg/core/reduce.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"
#include "plreg/solver/flux.hpp"

namespace plreg {

// Forward-in-time running mean over a window of length h_lag (trapezoid in
// time); zero on the trailing window where the mean is undefined.
inline GridFunction steklov_average(const GridFunction& u, double h_lag) {
  const auto& g = u.grid();
  const double cells = h_lag / g.dt();
  const int m = static_cast<int>(std::round(cells));
  if (m < 1 || std::abs(cells - m) > 1e-9 * (1.0 + cells))
    throw std::invalid_argument(
        "steklov_average: lag must be a positive multiple of dt");
  if (m >= g.nt())
    throw std::invalid_argument("steklov_average: lag exceeds the time extent");
  GridFunction out(u.grid_ptr(), 0.0);
  const std::int64_t sn = g.spatial_nodes();
  for (int it = 0; it + m < g.nt(); ++it) {
    for (std::int64_t s = 0; s < sn; ++s) {
      double acc = 0.5 * (u[g.index(it, 0) + s] + u[g.index(it + m, 0) + s]);
      for (int j = 1; j < m; ++j) acc += u[g.index(it + j, 0) + s];
      out[g.index(it, 0) + s] = acc / m;
    }
  }
  return out;
}

// Weak-form residual of the evolution against a spatial test function:
// for each admissible time level evaluates
//   int { d[u]_h/dt * phi + <[A(grad u)]_h, grad phi> } dx
// and returns the largest absolute value.  The Steklov time derivative is the
// exact difference quotient (u(t+h) - u(t))/h.
inline double residual_weak(const GridFunction& u, const FluxParams& fp,
                            const GridFunction& test_fn, double h_lag) {
  const auto& g = u.grid();
  const double cells = h_lag / g.dt();
  const int m = static_cast<int>(std::round(cells));
  if (m < 1 || std::abs(cells - m) > 1e-9 * (1.0 + cells))
    throw std::invalid_argument(
        "residual_weak: lag must be a positive multiple of dt");
  if (m >= g.nt())
    throw std::invalid_argument("residual_weak: lag exceeds the time extent");

  // the test function is spatial: take its first time level
  const std::int64_t sn = g.spatial_nodes();
  std::vector<double> phi(static_cast<std::size_t>(sn));
  for (std::int64_t s = 0; s < sn; ++s)
    phi[static_cast<std::size_t>(s)] = test_fn[s];
  // support must stay away from the spatial boundary (two outermost layers)
  for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
    for (int ix = 0; ix < g.nx(0); ++ix) {
      const bool near_bnd =
          ix <= 1 || ix >= g.nx(0) - 2 ||
          (g.dim() == 2 && (iy <= 1 || iy >= g.nx(1) - 2));
      if (near_bnd && phi[static_cast<std::size_t>(g.spatial_index(ix, iy))] != 0.0)
        throw std::invalid_argument(
            "residual_weak: test function support touches the boundary");
    }

  const VectorField grad_phi = discrete_gradient(test_fn);
  const VectorField grad_u = discrete_gradient(u);
  // flux field, then its Steklov average per component
  std::vector<GridFunction> flux_h;
  for (int d = 0; d < g.dim(); ++d) {
    GridFunction fd(u.grid_ptr());
    for (std::int64_t i = 0; i < fd.size(); ++i) {
      Vec z;
      z.dim = g.dim();
      for (int c = 0; c < g.dim(); ++c)
        z.v[static_cast<std::size_t>(c)] = grad_u.comp[static_cast<std::size_t>(c)][i];
      fd[i] = flux(z, fp).v[static_cast<std::size_t>(d)];
    }
    flux_h.push_back(steklov_average(fd, h_lag));
  }

  const double cell = g.spatial_cell();
  double worst = 0.0;
  for (int it = 0; it + m < g.nt(); ++it) {
    const double r = reduce::sum(static_cast<std::size_t>(sn), [&](std::size_t s) {
      const auto i0 = g.index(it, 0) + static_cast<std::int64_t>(s);
      const auto i1 = g.index(it + m, 0) + static_cast<std::int64_t>(s);
      const double dudt = (u[i1] - u[i0]) / h_lag;
      double adv = 0.0;
      for (int d = 0; d < g.dim(); ++d)
        adv += flux_h[static_cast<std::size_t>(d)][i0] *
               grad_phi.comp[static_cast<std::size_t>(d)][i0];
      return (dudt * phi[s] + adv) * cell;
    });
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace plreg
