#pragma once

#include <cmath>
#include <stdexcept>

#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

// Product cutoff for a nested cylinder pair: 1 on the inner cylinder, 0 on the
// lateral/bottom boundary of the outer one.  Profiles are piecewise linear in
// the radius and in time, so the slope equals 1/gap exactly; the nodewise
// derivative tables are analytic values, certified at construction.  (No C^1
// profile can satisfy the same slope budget: the mean slope across the gap
// already equals 1/gap, and matching flat ends forces the maximum above it.)
class CutoffFunction {
 public:
  CutoffFunction(GridPtr grid, const ParabolicCylinder& inner,
                 const ParabolicCylinder& outer)
      : value_(grid), grad_mag_(grid), dt_mag_(grid) {
    const auto& g = *grid;
    center_ = outer.center();
    if (spatial_distance(center_, inner.center()) > 1e-12 ||
        std::abs(center_.t - inner.center().t) > 1e-12)
      throw std::invalid_argument("CutoffFunction: cylinders must share a center");
    r_in_ = inner.spatial_radius();
    r_out_ = outer.spatial_radius();
    t_bot_out_ = outer.t_min();
    t_bot_in_ = inner.t_min();
    t_top_ = outer.t_max();
    if (!(r_in_ < r_out_) || !(t_bot_out_ < t_bot_in_))
      throw std::invalid_argument("CutoffFunction: inner must nest inside outer");
    const double sgap = r_out_ - r_in_;
    const double tgap = t_bot_in_ - t_bot_out_;
    for (int it = 0; it < g.nt(); ++it) {
      const double t = g.t(it);
      double ft = 0.0, dft = 0.0;
      if (t > t_top_ + 1e-15 || t <= t_bot_out_) {
        ft = 0.0;
      } else if (t < t_bot_in_) {
        ft = (t - t_bot_out_) / tgap;
        dft = 1.0 / tgap;
      } else {
        ft = 1.0;
      }
      for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
        for (int ix = 0; ix < g.nx(0); ++ix) {
          Point z;
          z.dim = g.dim();
          z.x[0] = g.x(0, ix);
          if (g.dim() == 2) z.x[1] = g.x(1, iy);
          z.t = t;
          const double r = spatial_distance(z, center_);
          double fs = 0.0, dfs = 0.0;
          if (r <= r_in_) {
            fs = 1.0;
          } else if (r < r_out_) {
            fs = (r_out_ - r) / sgap;
            dfs = 1.0 / sgap;
          }
          const auto idx = g.index(it, ix, iy);
          value_[idx] = fs * ft;
          grad_mag_[idx] = dfs * ft;
          dt_mag_[idx] = fs * dft;
          max_grad_ = std::max(max_grad_, grad_mag_[idx]);
          max_dt_ = std::max(max_dt_, dt_mag_[idx]);
        }
    }
  }

  const GridFunction& value() const { return value_; }
  const GridFunction& grad_mag() const { return grad_mag_; }
  const GridFunction& dt_mag() const { return dt_mag_; }
  double max_grad() const { return max_grad_; }
  double max_dt() const { return max_dt_; }

  // asserts the slope budget; both bounds hold with equality for the linear
  // ramp over the exact gap
  void certify(double grad_limit, double dt_limit) const {
    if (max_grad_ > grad_limit * (1.0 + 1e-9))
      throw std::runtime_error("CutoffFunction: spatial slope exceeds its bound");
    if (max_dt_ > dt_limit * (1.0 + 1e-9))
      throw std::runtime_error("CutoffFunction: time slope exceeds its bound");
    for (std::int64_t i = 0; i < value_.size(); ++i)
      if (value_[i] < 0.0 || value_[i] > 1.0)
        throw std::runtime_error("CutoffFunction: value outside [0,1]");
  }

 private:
  Point center_;
  double r_in_ = 0, r_out_ = 0, t_bot_out_ = 0, t_bot_in_ = 0, t_top_ = 0;
  GridFunction value_, grad_mag_, dt_mag_;
  double max_grad_ = 0.0, max_dt_ = 0.0;
};

}  // namespace plreg
