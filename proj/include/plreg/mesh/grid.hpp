#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace plreg {

// Point in space-time, z = (x, t).  Only dims 1 and 2 are supported.
struct Point {
  int dim = 1;
  std::array<double, 2> x{0.0, 0.0};
  double t = 0.0;
};

inline Point point1(double x, double t) { return Point{1, {x, 0.0}, t}; }
inline Point point2(double x, double y, double t) { return Point{2, {x, y}, t}; }

inline double spatial_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int d = 0; d < a.dim; ++d) s += (a.x[d] - b.x[d]) * (a.x[d] - b.x[d]);
  return std::sqrt(s);
}

// max{|x1-x2|, |t1-t2|^(1/2)}
inline double parabolic_distance(const Point& a, const Point& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("parabolic_distance: dimension mismatch");
  return std::max(spatial_distance(a, b), std::sqrt(std::abs(a.t - b.t)));
}

// Uniform tensor grid on a space-time box.  Node coordinates are
// lo + i*h (resp. t_lo + k*dt); extents must be whole multiples of the
// spacing and every axis carries at least 3 nodes.
class SpaceTimeGrid {
 public:
  static SpaceTimeGrid make_1d(double h, double dt, double x_lo, double x_hi,
                               double t_lo, double t_hi) {
    SpaceTimeGrid g;
    g.dim_ = 1;
    g.h_ = h;
    g.dt_ = dt;
    g.x_lo_ = {x_lo, 0.0};
    g.x_hi_ = {x_hi, 0.0};
    g.t_lo_ = t_lo;
    g.t_hi_ = t_hi;
    g.init();
    return g;
  }

  static SpaceTimeGrid make_2d(double h, double dt, double x_lo, double x_hi,
                               double y_lo, double y_hi, double t_lo,
                               double t_hi) {
    SpaceTimeGrid g;
    g.dim_ = 2;
    g.h_ = h;
    g.dt_ = dt;
    g.x_lo_ = {x_lo, y_lo};
    g.x_hi_ = {x_hi, y_hi};
    g.t_lo_ = t_lo;
    g.t_hi_ = t_hi;
    g.init();
    return g;
  }

  int dim() const { return dim_; }
  double h() const { return h_; }
  double dt() const { return dt_; }
  double x_lo(int axis) const { return x_lo_[static_cast<std::size_t>(axis)]; }
  double x_hi(int axis) const { return x_hi_[static_cast<std::size_t>(axis)]; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  int nx(int axis) const { return nx_[static_cast<std::size_t>(axis)]; }
  int nt() const { return nt_; }

  double x(int axis, int i) const {
    return x_lo_[static_cast<std::size_t>(axis)] + i * h_;
  }
  double t(int k) const { return t_lo_ + k * dt_; }

  std::int64_t spatial_nodes() const {
    std::int64_t n = nx_[0];
    if (dim_ == 2) n *= nx_[1];
    return n;
  }
  std::int64_t total_nodes() const { return spatial_nodes() * nt_; }
  double cell_volume() const {
    return (dim_ == 1 ? h_ : h_ * h_) * dt_;
  }
  double spatial_cell() const { return dim_ == 1 ? h_ : h_ * h_; }

  // flattened index, time-major then y then x
  std::int64_t index(int it, int ix, int iy = 0) const {
    std::int64_t s = ix;
    if (dim_ == 2) s += static_cast<std::int64_t>(iy) * nx_[0];
    return static_cast<std::int64_t>(it) * spatial_nodes() + s;
  }
  std::int64_t spatial_index(int ix, int iy = 0) const {
    std::int64_t s = ix;
    if (dim_ == 2) s += static_cast<std::int64_t>(iy) * nx_[0];
    return s;
  }
  void unflatten(std::int64_t idx, int& it, int& ix, int& iy) const {
    const std::int64_t sn = spatial_nodes();
    it = static_cast<int>(idx / sn);
    std::int64_t s = idx % sn;
    if (dim_ == 2) {
      iy = static_cast<int>(s / nx_[0]);
      ix = static_cast<int>(s % nx_[0]);
    } else {
      iy = 0;
      ix = static_cast<int>(s);
    }
  }

  Point node_point(std::int64_t idx) const {
    int it, ix, iy;
    unflatten(idx, it, ix, iy);
    Point p;
    p.dim = dim_;
    p.x[0] = x(0, ix);
    if (dim_ == 2) p.x[1] = x(1, iy);
    p.t = t(it);
    return p;
  }

  bool contains(const Point& p) const {
    if (p.dim != dim_) return false;
    for (int d = 0; d < dim_; ++d)
      if (p.x[static_cast<std::size_t>(d)] <
              x_lo_[static_cast<std::size_t>(d)] - 1e-12 ||
          p.x[static_cast<std::size_t>(d)] >
              x_hi_[static_cast<std::size_t>(d)] + 1e-12)
        return false;
    return p.t >= t_lo_ - 1e-12 && p.t <= t_hi_ + 1e-12;
  }

 private:
  void init() {
    if (h_ <= 0.0 || dt_ <= 0.0)
      throw std::invalid_argument("SpaceTimeGrid: spacings must be positive");
    for (int d = 0; d < dim_; ++d) {
      const auto sd = static_cast<std::size_t>(d);
      nx_[sd] = count_nodes(x_hi_[sd] - x_lo_[sd], h_, "spatial extent");
    }
    nt_ = count_nodes(t_hi_ - t_lo_, dt_, "time extent");
  }

  static int count_nodes(double extent, double spacing, const char* what) {
    if (extent <= 0.0)
      throw std::invalid_argument(std::string("SpaceTimeGrid: nonpositive ") +
                                  what);
    const double cells = extent / spacing;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * (1.0 + cells))
      throw std::invalid_argument(
          std::string("SpaceTimeGrid: ") + what +
          " is not a whole multiple of the spacing");
    const int n = static_cast<int>(rounded) + 1;
    if (n < 3)
      throw std::invalid_argument(
          std::string("SpaceTimeGrid: ") + what + " has fewer than 3 nodes");
    return n;
  }

  int dim_ = 1;
  double h_ = 0, dt_ = 0;
  std::array<double, 2> x_lo_{}, x_hi_{};
  double t_lo_ = 0, t_hi_ = 0;
  std::array<int, 2> nx_{0, 0};
  int nt_ = 0;
};

using GridPtr = std::shared_ptr<const SpaceTimeGrid>;

inline GridPtr share(SpaceTimeGrid g) {
  return std::make_shared<const SpaceTimeGrid>(std::move(g));
}

// One finite scalar per space-time node.
class GridFunction {
 public:
  explicit GridFunction(GridPtr grid, double init = 0.0)
      : grid_(std::move(grid)),
        values_(static_cast<std::size_t>(grid_->total_nodes()), init) {}

  GridFunction(GridPtr grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != grid_->total_nodes())
      throw std::invalid_argument("GridFunction: value count != node count");
    check_finite();
  }

  template <class F>
  static GridFunction sample(GridPtr grid, const F& f) {
    GridFunction g(grid);
    const auto& gr = *grid;
    for (int it = 0; it < gr.nt(); ++it)
      for (int iy = 0; iy < (gr.dim() == 2 ? gr.nx(1) : 1); ++iy)
        for (int ix = 0; ix < gr.nx(0); ++ix)
          g[gr.index(it, ix, iy)] = f(gr.node_point(gr.index(it, ix, iy)));
    g.check_finite();
    return g;
  }

  const SpaceTimeGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }

  double operator[](std::int64_t i) const {
    return values_[static_cast<std::size_t>(i)];
  }
  double& operator[](std::int64_t i) {
    return values_[static_cast<std::size_t>(i)];
  }
  double at(int it, int ix, int iy = 0) const {
    return values_[static_cast<std::size_t>(grid_->index(it, ix, iy))];
  }
  double& at(int it, int ix, int iy = 0) {
    return values_[static_cast<std::size_t>(grid_->index(it, ix, iy))];
  }

  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::max(m, v);
    return m;
  }
  double min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::min(m, v);
    return m;
  }

  template <class F>
  GridFunction map(const F& f) const {
    GridFunction out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i)
      out.values_[i] = f(values_[i]);
    return out;
  }

  void check_finite() const {
    for (double v : values_)
      if (!std::isfinite(v))
        throw std::runtime_error("GridFunction: non-finite value");
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

}  // namespace plreg
