#pragma once

#include <cmath>
#include <vector>

#include "plreg/mesh/grid.hpp"

namespace plreg {

// Per-node spatial vector field stored as one GridFunction per component.
struct VectorField {
  std::vector<GridFunction> comp;

  int dim() const { return static_cast<int>(comp.size()); }
  const SpaceTimeGrid& grid() const { return comp.front().grid(); }
  GridPtr grid_ptr() const { return comp.front().grid_ptr(); }

  double norm_at(std::int64_t i) const {
    double s = 0.0;
    for (const auto& c : comp) s += c[i] * c[i];
    return std::sqrt(s);
  }
};

namespace detail {

// one axis of the spatial gradient: central differences inside, one-sided
// second order at the ends
template <class At>
double axis_derivative(const At& u, int i, int n, double h) {
  if (i > 0 && i < n - 1) return (u(i + 1) - u(i - 1)) / (2.0 * h);
  if (i == 0) return (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * h);
  return (3.0 * u(n - 1) - 4.0 * u(n - 2) + u(n - 3)) / (2.0 * h);
}

template <class At>
double axis_second(const At& u, int i, int n, double h) {
  const double h2 = h * h;
  if (i > 0 && i < n - 1) return (u(i + 1) - 2.0 * u(i) + u(i - 1)) / h2;
  if (i == 0) return (2.0 * u(0) - 5.0 * u(1) + 4.0 * u(2) - u(3)) / h2;
  return (2.0 * u(n - 1) - 5.0 * u(n - 2) + 4.0 * u(n - 3) - u(n - 4)) / h2;
}

}  // namespace detail

inline VectorField discrete_gradient(const GridFunction& u) {
  const auto& g = u.grid();
  VectorField out;
  for (int d = 0; d < g.dim(); ++d) out.comp.emplace_back(u.grid_ptr());
  const double h = g.h();
  for (int it = 0; it < g.nt(); ++it) {
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy) {
      for (int ix = 0; ix < g.nx(0); ++ix) {
        const auto idx = g.index(it, ix, iy);
        out.comp[0][idx] = detail::axis_derivative(
            [&](int i) { return u.at(it, i, iy); }, ix, g.nx(0), h);
        if (g.dim() == 2)
          out.comp[1][idx] = detail::axis_derivative(
              [&](int j) { return u.at(it, ix, j); }, iy, g.nx(1), h);
      }
    }
  }
  return out;
}

inline GridFunction gradient_magnitude(const VectorField& f) {
  GridFunction out(f.grid_ptr());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = f.norm_at(i);
  return out;
}

// |D^2 u|^2 with mixed partials symmetric-averaged:
// u_xx^2 (1D);  u_xx^2 + 2 u_xy^2 + u_yy^2 (2D)
inline GridFunction hessian_norm_sq(const GridFunction& u) {
  const auto& g = u.grid();
  GridFunction out(u.grid_ptr());
  const double h = g.h();
  for (int it = 0; it < g.nt(); ++it) {
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy) {
      for (int ix = 0; ix < g.nx(0); ++ix) {
        const double uxx = detail::axis_second(
            [&](int i) { return u.at(it, i, iy); }, ix, g.nx(0), h);
        double s = uxx * uxx;
        if (g.dim() == 2) {
          const double uyy = detail::axis_second(
              [&](int j) { return u.at(it, ix, j); }, iy, g.nx(1), h);
          // mixed partial from the 4-point symmetric stencil, clamped at edges
          const int il = ix > 0 ? ix - 1 : ix;
          const int ir = ix < g.nx(0) - 1 ? ix + 1 : ix;
          const int jl = iy > 0 ? iy - 1 : iy;
          const int jr = iy < g.nx(1) - 1 ? iy + 1 : iy;
          const double denom = (g.x(0, ir) - g.x(0, il)) * (g.x(1, jr) - g.x(1, jl));
          const double uxy =
              (u.at(it, ir, jr) - u.at(it, ir, jl) - u.at(it, il, jr) +
               u.at(it, il, jl)) /
              denom;
          s += 2.0 * uxy * uxy + uyy * uyy;
        }
        out[g.index(it, ix, iy)] = s;
      }
    }
  }
  return out;
}

// nodewise a + c*b
inline GridFunction axpy(const GridFunction& a, double c,
                         const GridFunction& b) {
  GridFunction out(a.grid_ptr());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = a[i] + c * b[i];
  return out;
}

inline GridFunction multiply(const GridFunction& a, const GridFunction& b) {
  GridFunction out(a.grid_ptr());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace plreg
