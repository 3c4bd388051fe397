#pragma once

#include <cmath>
#include <stdexcept>

#include "plreg/calculus/cutoff.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

// Logarithmic weight Psi(z) = log+( nu / (nu - (z - (1-nu))_+ + eta0) ),
// with the positive part capped at nu so the argument stays positive for
// every input (fields are normalized to z <= 1).
inline double log_weight(double z, double nu, double eta0) {
  if (!(eta0 > 0.0 && eta0 < nu))
    throw std::invalid_argument("log_weight: need 0 < eta0 < nu");
  const double excess = std::min(std::max(z - (1.0 - nu), 0.0), nu);
  const double arg = nu / (nu - excess + eta0);
  return arg > 1.0 ? std::log(arg) : 0.0;
}

struct LogEstimate {
  double lhs = 0.0;        // int_{B_s x {t2}} Psi^2((w - k)_+) dx
  double rhs_initial = 0.0;  // int_{B_1 x {t1}} Psi^2((w - k)_+) dx
  double rhs_bulk = 0.0;     // (1-s)^{-2} int int Psi((w - k)_+) dz
  double empirical_C = 0.0;  // smallest C with lhs <= rhs_initial + C rhs_bulk
  bool vacuous = false;
};

// Two-slice logarithmic estimate on the unit cylinder fields: the grid is
// expected to span B_1 x (-1, 1).
inline LogEstimate log_estimate_check(const GridFunction& w, double k,
                                      double A, double nu, double eta0,
                                      double t1, double t2, double s_radius) {
  if (!(t1 < t2)) throw std::invalid_argument("log_estimate_check: need t1 < t2");
  if (k < 1.0 / (4.0 * A) - 1e-12)
    throw std::invalid_argument("log_estimate_check: need k >= 1/(4A)");
  if (!(s_radius > 0.0 && s_radius < 1.0))
    throw std::invalid_argument("log_estimate_check: need s in (0,1)");
  const auto& g = w.grid();
  auto slice_of = [&](double t) {
    const int it = static_cast<int>(std::round((t - g.t_lo()) / g.dt()));
    return std::min(std::max(it, 0), g.nt() - 1);
  };
  const int it1 = slice_of(t1);
  const int it2 = slice_of(t2);
  Point origin;
  origin.dim = g.dim();

  auto psi_at = [&](std::int64_t i) {
    return log_weight(std::max(w[i] - k, 0.0), nu, eta0);
  };
  auto ball_slice_sum = [&](int it, double radius, bool squared) {
    double acc = 0.0;
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
      for (int ix = 0; ix < g.nx(0); ++ix) {
        Point z;
        z.dim = g.dim();
        z.x[0] = g.x(0, ix);
        if (g.dim() == 2) z.x[1] = g.x(1, iy);
        if (spatial_distance(z, origin) >= radius) continue;
        const double v = psi_at(g.index(it, ix, iy));
        acc += squared ? v * v : v;
      }
    return acc * g.spatial_cell();
  };

  LogEstimate out;
  out.lhs = ball_slice_sum(it2, s_radius, true);
  out.rhs_initial = ball_slice_sum(it1, 1.0, true);
  double bulk = 0.0;
  for (int it = it1; it <= it2; ++it) bulk += ball_slice_sum(it, 1.0, false);
  bulk *= g.dt();
  out.rhs_bulk = bulk / ((1.0 - s_radius) * (1.0 - s_radius));
  if (out.rhs_bulk == 0.0) {
    out.vacuous = out.lhs <= out.rhs_initial;
    out.empirical_C = 0.0;
  } else {
    out.empirical_C = std::max(0.0, out.lhs - out.rhs_initial) / out.rhs_bulk;
  }
  return out;
}

struct DerivativeEnergy {
  double lhs_sup = 0.0;      // sup_{t0<t<=t1} int (w-k)_+^2 zeta^2 dx
  double lhs_grad = 0.0;     // int int |grad (w-k)_+|^2 zeta^2
  double rhs_initial = 0.0;  // int_{t=t0} (w-k)_+^2 zeta^2 dx
  double rhs_grad = 0.0;     // int int (w-k)_+^2 |grad zeta|^2
  double rhs_time = 0.0;     // int int (w-k)_+^2 |zeta| |zeta_t|
  double empirical_C = 0.0;
  bool vacuous = false;
};

// Upper-truncation energy estimate for one derivative component between two
// time slices of the unit cylinder.
inline DerivativeEnergy derivative_energy_check(const GridFunction& w, double k,
                                                double A,
                                                const CutoffFunction& cutoff,
                                                double t0, double t1) {
  if (!(t0 < t1))
    throw std::invalid_argument("derivative_energy_check: need t0 < t1");
  if (k < 1.0 / (4.0 * A) - 1e-12)
    throw std::invalid_argument("derivative_energy_check: need k >= 1/(4A)");
  const auto& g = w.grid();
  const int it0 = static_cast<int>(std::round((t0 - g.t_lo()) / g.dt()));
  const int it1 = static_cast<int>(std::round((t1 - g.t_lo()) / g.dt()));
  const auto trunc = truncate(w, k, TruncSign::plus);
  const auto grad_trunc = discrete_gradient(trunc);
  const auto& zeta = cutoff.value();
  const auto& zgrad = cutoff.grad_mag();
  const auto& zdt = cutoff.dt_mag();

  DerivativeEnergy out;
  auto slice_sum = [&](int it, auto&& f) {
    double acc = 0.0;
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
      for (int ix = 0; ix < g.nx(0); ++ix) acc += f(g.index(it, ix, iy));
    return acc * g.spatial_cell();
  };
  auto tz_sq = [&](std::int64_t i) {
    return trunc[i] * trunc[i] * zeta[i] * zeta[i];
  };
  out.rhs_initial = slice_sum(it0, tz_sq);
  for (int it = it0 + 1; it <= it1; ++it)
    out.lhs_sup = std::max(out.lhs_sup, slice_sum(it, tz_sq));
  double grad_acc = 0.0, rg_acc = 0.0, rt_acc = 0.0;
  for (int it = it0; it <= it1; ++it) {
    grad_acc += slice_sum(it, [&](std::int64_t i) {
      double s = 0.0;
      for (int d = 0; d < g.dim(); ++d) {
        const double c = grad_trunc.comp[static_cast<std::size_t>(d)][i];
        s += c * c;
      }
      return s * zeta[i] * zeta[i];
    });
    rg_acc += slice_sum(it, [&](std::int64_t i) {
      return trunc[i] * trunc[i] * zgrad[i] * zgrad[i];
    });
    rt_acc += slice_sum(it, [&](std::int64_t i) {
      return trunc[i] * trunc[i] * zeta[i] * zdt[i];
    });
  }
  out.lhs_grad = grad_acc * g.dt();
  out.rhs_grad = rg_acc * g.dt();
  out.rhs_time = rt_acc * g.dt();
  const double extra = out.rhs_grad + out.rhs_time;
  if (extra == 0.0) {
    out.vacuous = out.lhs_sup + out.lhs_grad <= out.rhs_initial + 1e-300;
    out.empirical_C = 0.0;
  } else {
    out.empirical_C =
        std::max(0.0, out.lhs_sup + out.lhs_grad - out.rhs_initial) / extra;
  }
  return out;
}

}  // namespace plreg
