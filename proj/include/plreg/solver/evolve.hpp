#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "plreg/mesh/grid.hpp"
#include "plreg/solver/flux.hpp"

namespace plreg {

enum class Scheme { explicit_euler, semi_implicit };
enum class BoundaryKind { periodic, dirichlet_oracle };

struct CflError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PicardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveConfig {
  Scheme scheme = Scheme::explicit_euler;
  double cfl_safety = 0.5;  // fraction of the stability limit, in (0,1)
  BoundaryKind boundary = BoundaryKind::periodic;
  std::function<double(const Point&)> boundary_values;  // Dirichlet data
  int max_steps = std::numeric_limits<int>::max();
  int picard_budget = 50;
  double picard_tol = 1e-10;

  void validate() const {
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
      throw std::invalid_argument("SolveConfig: cfl_safety must lie in (0,1)");
    if (boundary == BoundaryKind::dirichlet_oracle && !boundary_values)
      throw std::invalid_argument("SolveConfig: Dirichlet data missing");
  }
};

using Slice = std::vector<double>;

namespace detail {

// periodic identification: node nx-1 is the same point as node 0
inline int wleft(int i, int n) { return i > 0 ? i - 1 : n - 2; }
inline int wright(int i, int n) { return i < n - 1 ? i + 1 : 1; }

struct EdgeCoeffs {
  std::vector<double> ax;  // (nx-1) x ny
  std::vector<double> ay;  // nx x (ny-1), 2D only
  double lambda_max = 0.0; // max edge diffusivity times max(1, p-1)
};

// edge-centered diffusivities from the full edge gradient
inline EdgeCoeffs edge_coeffs(const Slice& u, const SpaceTimeGrid& g,
                              const FluxParams& fp, BoundaryKind bc) {
  EdgeCoeffs ec;
  const double h = g.h();
  const int nx = g.nx(0);
  const double stiff = std::max(1.0, fp.p - 1.0);
  if (g.dim() == 1) {
    ec.ax.resize(static_cast<std::size_t>(nx - 1));
    for (int i = 0; i + 1 < nx; ++i) {
      const double gx = (u[static_cast<std::size_t>(i + 1)] -
                         u[static_cast<std::size_t>(i)]) / h;
      const double a = fp.diffusivity(gx * gx);
      ec.ax[static_cast<std::size_t>(i)] = a;
      ec.lambda_max = std::max(ec.lambda_max, a * stiff);
    }
    return ec;
  }
  const int ny = g.nx(1);
  auto at = [&](int i, int j) {
    return u[static_cast<std::size_t>(j * nx + i)];
  };
  auto dy_at = [&](int i, int j) {  // central y-derivative, wrap or clamp
    int jl = j - 1, jr = j + 1;
    if (bc == BoundaryKind::periodic) {
      jl = wleft(j, ny);
      jr = wright(j, ny);
      return (at(i, jr) - at(i, jl)) / (2.0 * h);
    }
    jl = std::max(jl, 0);
    jr = std::min(jr, ny - 1);
    return (at(i, jr) - at(i, jl)) / ((jr - jl) * h);
  };
  auto dx_at = [&](int i, int j) {
    int il = i - 1, ir = i + 1;
    if (bc == BoundaryKind::periodic) {
      il = wleft(i, nx);
      ir = wright(i, nx);
      return (at(ir, j) - at(il, j)) / (2.0 * h);
    }
    il = std::max(il, 0);
    ir = std::min(ir, nx - 1);
    return (at(ir, j) - at(il, j)) / ((ir - il) * h);
  };
  ec.ax.resize(static_cast<std::size_t>((nx - 1) * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const double gx = (at(i + 1, j) - at(i, j)) / h;
      const double gy = 0.5 * (dy_at(i, j) + dy_at(i + 1, j));
      const double a = fp.diffusivity(gx * gx + gy * gy);
      ec.ax[static_cast<std::size_t>(j * (nx - 1) + i)] = a;
      ec.lambda_max = std::max(ec.lambda_max, a * stiff);
    }
  ec.ay.resize(static_cast<std::size_t>(nx * (ny - 1)));
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double gy = (at(i, j + 1) - at(i, j)) / h;
      const double gx = 0.5 * (dx_at(i, j) + dx_at(i, j + 1));
      const double a = fp.diffusivity(gx * gx + gy * gy);
      ec.ay[static_cast<std::size_t>(j * nx + i)] = a;
      ec.lambda_max = std::max(ec.lambda_max, a * stiff);
    }
  return ec;
}

// div(a grad x) at every node; boundary nodes get the periodic wrap value or,
// for Dirichlet, are left at zero (their rows are prescribed anyway)
inline Slice divergence(const Slice& x, const EdgeCoeffs& ec,
                        const SpaceTimeGrid& g, BoundaryKind bc) {
  const double h2 = g.h() * g.h();
  const int nx = g.nx(0);
  Slice out(x.size(), 0.0);
  if (g.dim() == 1) {
    auto fx = [&](int e) {  // a * (u_right - u_left) on edge e
      return ec.ax[static_cast<std::size_t>(e)] *
             (x[static_cast<std::size_t>(e + 1)] - x[static_cast<std::size_t>(e)]);
    };
    for (int i = 1; i + 1 < nx; ++i)
      out[static_cast<std::size_t>(i)] = (fx(i) - fx(i - 1)) / h2;
    if (bc == BoundaryKind::periodic) {
      out[0] = (fx(0) - fx(nx - 2)) / h2;
      out[static_cast<std::size_t>(nx - 1)] = out[0];
    }
    return out;
  }
  const int ny = g.nx(1);
  auto fx = [&](int e, int j) {
    return ec.ax[static_cast<std::size_t>(j * (nx - 1) + e)] *
           (x[static_cast<std::size_t>(j * nx + e + 1)] -
            x[static_cast<std::size_t>(j * nx + e)]);
  };
  auto fy = [&](int i, int e) {
    return ec.ay[static_cast<std::size_t>(e * nx + i)] *
           (x[static_cast<std::size_t>((e + 1) * nx + i)] -
            x[static_cast<std::size_t>(e * nx + i)]);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const bool interior = i > 0 && i + 1 < nx && j > 0 && j + 1 < ny;
      if (!interior && bc != BoundaryKind::periodic) continue;
      const int il = (i > 0) ? i - 1 : nx - 2;
      const int jl = (j > 0) ? j - 1 : ny - 2;
      const int ie = (i + 1 < nx) ? i : 0;
      const int je = (j + 1 < ny) ? j : 0;
      out[static_cast<std::size_t>(j * nx + i)] =
          (fx(ie, j) - fx(il, j) + fy(i, je) - fy(i, jl)) / h2;
    }
  if (bc == BoundaryKind::periodic) {
    for (int j = 0; j < ny; ++j)
      out[static_cast<std::size_t>(j * nx + nx - 1)] =
          out[static_cast<std::size_t>(j * nx)];
    for (int i = 0; i < nx; ++i)
      out[static_cast<std::size_t>((ny - 1) * nx + i)] =
          out[static_cast<std::size_t>(i)];
  }
  return out;
}

inline void set_boundary(Slice& u, const SpaceTimeGrid& g, double t,
                         const std::function<double(const Point&)>& bv) {
  const int nx = g.nx(0);
  if (g.dim() == 1) {
    u[0] = bv(point1(g.x(0, 0), t));
    u[static_cast<std::size_t>(nx - 1)] = bv(point1(g.x(0, nx - 1), t));
    return;
  }
  const int ny = g.nx(1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (i == 0 || i == nx - 1 || j == 0 || j == ny - 1)
        u[static_cast<std::size_t>(j * nx + i)] =
            bv(point2(g.x(0, i), g.x(1, j), t));
}

inline bool is_spatial_boundary(const SpaceTimeGrid& g, int i, int j) {
  if (g.dim() == 1) return i == 0 || i == g.nx(0) - 1;
  return i == 0 || i == g.nx(0) - 1 || j == 0 || j == g.nx(1) - 1;
}

// CG for the shifted diffusion system (I - dt div(a grad)) x = b.
// For Dirichlet runs the boundary entries of x are held fixed.
template <class Apply>
int conjugate_gradient(const Apply& apply, Slice& x, const Slice& b,
                       double tol, int max_iter) {
  const std::size_t n = x.size();
  Slice r(n), p(n), ap(n);
  ap = apply(x);
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - ap[i];
    p[i] = r[i];
    rr += r[i] * r[i];
    bb += b[i] * b[i];
  }
  const double stop = tol * tol * std::max(bb, 1e-300);
  int it = 0;
  while (rr > stop && it < max_iter) {
    ap = apply(p);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;
    const double alpha = rr / pap;
    double rr_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rr_new += r[i] * r[i];
    }
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
    ++it;
  }
  return it;
}

}  // namespace detail

struct StepStats {
  double cfl_margin = 0.0;   // (allowed dt) / dt, explicit scheme
  int picard_iterations = 0; // semi-implicit scheme
};

// One time level of the conservative flux-form update
//   u_next = u + dt * div_h( A(grad_edge u) ),
// with edge-centered gradients and the boundary handling from the config.
inline Slice step(const Slice& u, const SpaceTimeGrid& g, const FluxParams& fp,
                  const SolveConfig& cfg, double t_next,
                  StepStats* stats = nullptr) {
  cfg.validate();
  fp.validate_for_stepping(g.dim());
  const double dt = g.dt();
  const double h = g.h();

  if (cfg.scheme == Scheme::explicit_euler) {
    const auto ec = detail::edge_coeffs(u, g, fp, cfg.boundary);
    const double allowed = ec.lambda_max > 0.0
                               ? cfg.cfl_safety * h * h /
                                     (2.0 * g.dim() * ec.lambda_max)
                               : std::numeric_limits<double>::infinity();
    if (dt > allowed)
      throw CflError("step: explicit time step exceeds the stability limit, dt=" +
                     std::to_string(dt) + " allowed=" + std::to_string(allowed));
    if (stats) stats->cfl_margin = allowed / dt;
    const auto div = detail::divergence(u, ec, g, cfg.boundary);
    Slice out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + dt * div[i];
    if (cfg.boundary == BoundaryKind::dirichlet_oracle)
      detail::set_boundary(out, g, t_next, cfg.boundary_values);
    return out;
  }

  // semi-implicit: coefficients frozen at the previous iterate, backward Euler
  Slice frozen = u;
  Slice x = u;
  Slice b = u;
  if (cfg.boundary == BoundaryKind::dirichlet_oracle) {
    detail::set_boundary(b, g, t_next, cfg.boundary_values);
    detail::set_boundary(x, g, t_next, cfg.boundary_values);
  }
  int iter = 0;
  for (;;) {
    const auto ec = detail::edge_coeffs(frozen, g, fp, cfg.boundary);
    auto apply = [&](const Slice& v) {
      Slice w = v;
      if (cfg.boundary == BoundaryKind::periodic) {
        // keep the duplicated seam nodes synchronized
        const int nx = g.nx(0);
        if (g.dim() == 1) {
          w[static_cast<std::size_t>(nx - 1)] = w[0];
        } else {
          const int ny = g.nx(1);
          for (int j = 0; j < ny; ++j)
            w[static_cast<std::size_t>(j * nx + nx - 1)] =
                w[static_cast<std::size_t>(j * nx)];
          for (int i = 0; i < nx; ++i)
            w[static_cast<std::size_t>((ny - 1) * nx + i)] =
                w[static_cast<std::size_t>(i)];
        }
      }
      const auto div = detail::divergence(w, ec, g, cfg.boundary);
      Slice y(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) y[i] = w[i] - g.dt() * div[i];
      if (cfg.boundary == BoundaryKind::dirichlet_oracle) {
        // prescribed rows act as the identity
        const int nx = g.nx(0);
        for (int j = 0; j < (g.dim() == 2 ? g.nx(1) : 1); ++j)
          for (int i = 0; i < nx; ++i)
            if (detail::is_spatial_boundary(g, i, j))
              y[static_cast<std::size_t>(g.dim() == 2 ? j * nx + i : i)] =
                  w[static_cast<std::size_t>(g.dim() == 2 ? j * nx + i : i)];
      }
      return y;
    };
    detail::conjugate_gradient(apply, x, b, 1e-12,
                               static_cast<int>(10 * x.size()) + 100);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      diff = std::max(diff, std::abs(x[i] - frozen[i]));
      scale = std::max(scale, std::abs(x[i]));
    }
    ++iter;
    if (diff <= cfg.picard_tol * std::max(scale, 1.0)) break;
    if (iter >= cfg.picard_budget)
      throw PicardError("step: frozen-coefficient iteration did not converge");
    frozen = x;
  }
  if (stats) stats->picard_iterations = iter;
  if (cfg.boundary == BoundaryKind::periodic) {
    const int nx = g.nx(0);
    if (g.dim() == 1) {
      x[static_cast<std::size_t>(nx - 1)] = x[0];
    } else {
      const int ny = g.nx(1);
      for (int j = 0; j < ny; ++j)
        x[static_cast<std::size_t>(j * nx + nx - 1)] =
            x[static_cast<std::size_t>(j * nx)];
      for (int i = 0; i < nx; ++i)
        x[static_cast<std::size_t>((ny - 1) * nx + i)] =
            x[static_cast<std::size_t>(i)];
    }
  }
  return x;
}

struct SolveResult {
  GridFunction u;
  double min_cfl_margin = std::numeric_limits<double>::infinity();
  int max_picard_iterations = 0;
  int steps = 0;

  SolveResult(GridPtr g) : u(std::move(g)) {}
};

// Marches the full space-time grid from the initial slice.
template <class Init>
SolveResult solve(GridPtr grid, const Init& u0, const FluxParams& fp,
                  const SolveConfig& cfg) {
  cfg.validate();
  fp.validate_for_stepping(grid->dim());
  SolveResult res(grid);
  const auto& g = *grid;
  const std::size_t sn = static_cast<std::size_t>(g.spatial_nodes());
  Slice cur(sn);
  for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
    for (int ix = 0; ix < g.nx(0); ++ix) {
      Point p;
      p.dim = g.dim();
      p.x[0] = g.x(0, ix);
      if (g.dim() == 2) p.x[1] = g.x(1, iy);
      p.t = g.t_lo();
      cur[static_cast<std::size_t>(g.spatial_index(ix, iy))] = u0(p);
    }
  auto store = [&](int it, const Slice& s) {
    for (std::size_t i = 0; i < sn; ++i)
      res.u[g.index(it, 0, 0) + static_cast<std::int64_t>(i)] = s[i];
  };
  store(0, cur);
  const int steps = std::min(g.nt() - 1, cfg.max_steps);
  for (int it = 0; it < steps; ++it) {
    StepStats st;
    cur = step(cur, g, fp, cfg, g.t(it + 1), &st);
    res.min_cfl_margin = std::min(res.min_cfl_margin, st.cfl_margin);
    res.max_picard_iterations =
        std::max(res.max_picard_iterations, st.picard_iterations);
    store(it + 1, cur);
    ++res.steps;
  }
  res.u.check_finite();
  return res;
}

// Per-node symmetric coefficient matrices for the linearized equation
// v_t = div(B(x,t) grad v).
struct MatrixField {
  GridPtr grid;
  std::vector<Mat> m;  // one per spatial node (time-independent coefficient)

  const Mat& at(std::int64_t spatial_idx) const {
    return m[static_cast<std::size_t>(spatial_idx)];
  }
};

// Explicit step for the linear equation with a frozen matrix coefficient,
// periodic boundaries.
inline Slice step_linear(const Slice& u, const SpaceTimeGrid& g,
                         const MatrixField& B, double cfl_safety = 0.45) {
  const double h = g.h();
  const double dt = g.dt();
  const int nx = g.nx(0);
  double lam = 0.0;
  for (const auto& mat : B.m) lam = std::max(lam, spectral_norm_sym(mat));
  const double allowed = cfl_safety * h * h / (2.0 * g.dim() * lam);
  if (dt > allowed)
    throw CflError("step_linear: time step exceeds the stability limit");
  Slice out(u.size());
  if (g.dim() == 1) {
    auto flux_at = [&](int e) {  // edge between e and e+1
      const double gx = (u[static_cast<std::size_t>(e + 1)] -
                         u[static_cast<std::size_t>(e)]) / h;
      const double bavg = 0.5 * (B.m[static_cast<std::size_t>(e)].m[0][0] +
                                 B.m[static_cast<std::size_t>(e + 1)].m[0][0]);
      return bavg * gx;
    };
    for (int i = 0; i < nx; ++i) {
      const int il = detail::wleft(i, nx);
      const int ie = (i + 1 < nx) ? i : 0;
      out[static_cast<std::size_t>(i)] =
          u[static_cast<std::size_t>(i)] + dt * (flux_at(ie) - flux_at(il)) / h;
    }
    out[static_cast<std::size_t>(nx - 1)] = out[0];
    return out;
  }
  const int ny = g.nx(1);
  auto at = [&](int i, int j) { return u[static_cast<std::size_t>(j * nx + i)]; };
  auto bat = [&](int i, int j) -> const Mat& {
    return B.m[static_cast<std::size_t>(j * nx + i)];
  };
  auto fx = [&](int e, int j) {
    const double gx = (at(e + 1, j) - at(e, j)) / h;
    const int jl = detail::wleft(j, ny), jr = detail::wright(j, ny);
    const double gy = (at(e, jr) - at(e, jl) + at(e + 1, jr) - at(e + 1, jl)) /
                      (4.0 * h);
    const Mat& bl = bat(e, j);
    const Mat& br = bat(e + 1, j);
    const double b00 = 0.5 * (bl.m[0][0] + br.m[0][0]);
    const double b01 = 0.5 * (bl.m[0][1] + br.m[0][1]);
    return b00 * gx + b01 * gy;
  };
  auto fy = [&](int i, int e) {
    const double gy = (at(i, e + 1) - at(i, e)) / h;
    const int il = detail::wleft(i, nx), ir = detail::wright(i, nx);
    const double gx = (at(ir, e) - at(il, e) + at(ir, e + 1) - at(il, e + 1)) /
                      (4.0 * h);
    const Mat& bl = bat(i, e);
    const Mat& br = bat(i, e + 1);
    const double b10 = 0.5 * (bl.m[1][0] + br.m[1][0]);
    const double b11 = 0.5 * (bl.m[1][1] + br.m[1][1]);
    return b10 * gx + b11 * gy;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int il = detail::wleft(i, nx);
      const int jl = detail::wleft(j, ny);
      const int ie = (i + 1 < nx) ? i : 0;
      const int je = (j + 1 < ny) ? j : 0;
      out[static_cast<std::size_t>(j * nx + i)] =
          at(i, j) +
          dt * (fx(ie, j) - fx(il, j) + fy(i, je) - fy(i, jl)) / h;
    }
  for (int j = 0; j < ny; ++j)
    out[static_cast<std::size_t>(j * nx + nx - 1)] =
        out[static_cast<std::size_t>(j * nx)];
  for (int i = 0; i < nx; ++i)
    out[static_cast<std::size_t>((ny - 1) * nx + i)] =
        out[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace plreg
