#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "plreg/core/reduce.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

// Space-time cylinder around a center z0.  Standard kind is B_a(x0) x
// (t0-b, t0+b); intrinsic kind is B_{rho/lambda}(x0) x (t0 - lambda^-p rho^2,
// t0 + lambda^-p rho^2).  The backward flag replaces the time window by
// (t0 - w, t0].  Spatial membership is the open ball (strict inequality).
class ParabolicCylinder {
 public:
  enum class Kind { standard, intrinsic };

  static ParabolicCylinder standard(Point center, double a, double b,
                                    bool backward = false) {
    if (a <= 0.0 || b <= 0.0)
      throw std::invalid_argument("ParabolicCylinder: radii must be positive");
    ParabolicCylinder c;
    c.center_ = center;
    c.kind_ = Kind::standard;
    c.a_ = a;
    c.b_ = b;
    c.backward_ = backward;
    return c;
  }

  static ParabolicCylinder intrinsic(Point center, double rho, double lambda,
                                     double p, bool backward = false) {
    if (rho <= 0.0)
      throw std::invalid_argument("ParabolicCylinder: rho must be positive");
    if (lambda < 1.0)
      throw std::invalid_argument("ParabolicCylinder: lambda must be >= 1");
    ParabolicCylinder c;
    c.center_ = center;
    c.kind_ = Kind::intrinsic;
    c.rho_ = rho;
    c.lambda_ = lambda;
    c.p_ = p;
    c.backward_ = backward;
    return c;
  }

  const Point& center() const { return center_; }
  Kind kind() const { return kind_; }
  bool backward() const { return backward_; }

  double spatial_radius() const {
    return kind_ == Kind::standard ? a_ : rho_ / lambda_;
  }
  double time_halfwidth() const {
    return kind_ == Kind::standard ? b_
                                   : std::pow(lambda_, -p_) * rho_ * rho_;
  }
  double t_min() const { return center_.t - time_halfwidth(); }
  double t_max() const { return backward_ ? center_.t : center_.t + time_halfwidth(); }

  bool contains(const Point& z) const {
    if (spatial_distance(z, center_) >= spatial_radius()) return false;
    if (backward_) return z.t > t_min() && z.t <= center_.t;
    return z.t > t_min() && z.t < t_max();
  }

 private:
  Point center_;
  Kind kind_ = Kind::standard;
  double a_ = 0, b_ = 0;
  double rho_ = 0, lambda_ = 1, p_ = 2;
  bool backward_ = false;
};

// All grid nodes inside the cylinder, ascending flattened index (lexicographic
// in (it, iy, ix)).  Throws if the center lies outside the grid extents; a
// genuinely empty intersection with an on-grid center is returned as an empty
// set.
inline std::vector<std::int64_t> cylinder_nodes(const SpaceTimeGrid& g,
                                                const ParabolicCylinder& c) {
  if (c.center().dim != g.dim())
    throw std::invalid_argument("cylinder_nodes: dimension mismatch");
  if (!g.contains(c.center()))
    throw std::invalid_argument("cylinder_nodes: cylinder center off-grid");
  std::vector<std::int64_t> out;
  for (int it = 0; it < g.nt(); ++it) {
    Point z;
    z.dim = g.dim();
    z.t = g.t(it);
    if (c.backward()) {
      if (!(z.t > c.t_min() && z.t <= c.t_max())) continue;
    } else {
      if (!(z.t > c.t_min() && z.t < c.t_max())) continue;
    }
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy) {
      if (g.dim() == 2) z.x[1] = g.x(1, iy);
      for (int ix = 0; ix < g.nx(0); ++ix) {
        z.x[0] = g.x(0, ix);
        if (spatial_distance(z, c.center()) < c.spatial_radius())
          out.push_back(g.index(it, ix, iy));
      }
    }
  }
  return out;
}

// Cell-counting space-time measure: (node count) * h^dim * dt.
inline double measure(const SpaceTimeGrid& g,
                      const std::vector<std::int64_t>& nodes) {
  return static_cast<double>(nodes.size()) * g.cell_volume();
}

// Sum of f over a node set times the cell volume, deterministic reduction.
template <class F>
double integrate_nodes(const SpaceTimeGrid& g,
                       const std::vector<std::int64_t>& nodes, const F& f) {
  const double s = reduce::sum(nodes.size(), [&](std::size_t i) {
    return f(nodes[i]);
  });
  return s * g.cell_volume();
}

inline double integrate(const GridFunction& f, const ParabolicCylinder& c) {
  const auto nodes = cylinder_nodes(f.grid(), c);
  return integrate_nodes(f.grid(), nodes,
                         [&](std::int64_t i) { return f[i]; });
}

inline double integrate(const GridFunction& f,
                        const std::vector<std::int64_t>& nodes) {
  return integrate_nodes(f.grid(), nodes,
                         [&](std::int64_t i) { return f[i]; });
}

// max over a node set (discrete stand-in for the essential supremum)
inline double sup_nodes(const GridFunction& f,
                        const std::vector<std::int64_t>& nodes) {
  double m = -std::numeric_limits<double>::infinity();
  for (auto i : nodes) m = std::max(m, f[i]);
  return m;
}

}  // namespace plreg
