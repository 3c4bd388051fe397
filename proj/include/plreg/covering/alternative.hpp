#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plreg/calculus/inequalities.hpp"
#include "plreg/calculus/levelset.hpp"
#include "plreg/calculus/logweight.hpp"
#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"
#include "plreg/solver/evolve.hpp"

namespace plreg {

// multilinear interpolation of a space-time field
inline double sample_interp(const GridFunction& u, const Point& z) {
  const auto& g = u.grid();
  if (!g.contains(z))
    throw std::out_of_range("sample_interp: point outside the source grid");
  auto clampi = [](int i, int n) { return std::min(std::max(i, 0), n - 1); };
  const double ft = (z.t - g.t_lo()) / g.dt();
  const int it = clampi(static_cast<int>(std::floor(ft)), g.nt() - 1);
  const double wt = std::min(std::max(ft - it, 0.0), 1.0);
  const double fx = (z.x[0] - g.x_lo(0)) / g.h();
  const int ix = clampi(static_cast<int>(std::floor(fx)), g.nx(0) - 1);
  const double wx = std::min(std::max(fx - ix, 0.0), 1.0);
  auto lerp = [](double a, double b, double w) { return a + (b - a) * w; };
  auto at_t = [&](int tt) {
    const int ix1 = clampi(ix + 1, g.nx(0));
    if (g.dim() == 1) return lerp(u.at(tt, ix), u.at(tt, ix1), wx);
    const double fy = (z.x[1] - g.x_lo(1)) / g.h();
    const int iy = clampi(static_cast<int>(std::floor(fy)), g.nx(1) - 1);
    const double wy = std::min(std::max(fy - iy, 0.0), 1.0);
    const int iy1 = clampi(iy + 1, g.nx(1));
    return lerp(lerp(u.at(tt, ix, iy), u.at(tt, ix1, iy), wx),
                lerp(u.at(tt, ix, iy1), u.at(tt, ix1, iy1), wx), wy);
  };
  const int it1 = clampi(it + 1, g.nt());
  return lerp(at_t(it), at_t(it1), wt);
}

// Rescales u on the intrinsic cylinder of radius r and scale mu at z0 to the
// unit cylinder B_1 x (-1, 1).  The default normalization divides by
// mu^{-1} r, which preserves gradients; the alternative divides by r*A.
inline GridFunction rescale_to_unit(const GridFunction& u, const Point& z0,
                                    double r, double mu, double p, int nx_out,
                                    int nt_out, bool a_normalization = false,
                                    double A = 1.0) {
  if (!(r > 0.0 && mu > 0.0))
    throw std::invalid_argument("rescale_to_unit: need r, mu > 0");
  const int dim = u.grid().dim();
  const double hx = 2.0 / (nx_out - 1);
  const double ht = 2.0 / (nt_out - 1);
  auto grid = share(dim == 1 ? SpaceTimeGrid::make_1d(hx, ht, -1, 1, -1, 1)
                             : SpaceTimeGrid::make_2d(hx, ht, -1, 1, -1, 1, -1, 1));
  const double space_scale = r / mu;           // mu^{-1} r
  const double time_scale = std::pow(mu, -p) * r * r;
  const double denom = a_normalization ? r * A : space_scale;
  return GridFunction::sample(grid, [&](const Point& zeta) {
    Point z;
    z.dim = dim;
    for (int d = 0; d < dim; ++d)
      z.x[static_cast<std::size_t>(d)] =
          z0.x[static_cast<std::size_t>(d)] +
          space_scale * zeta.x[static_cast<std::size_t>(d)];
    z.t = z0.t + time_scale * zeta.t;
    return sample_interp(u, z) / denom;
  });
}

namespace detail {

// nodes of B_rho x (-rho^2, rho^2) on the unit-cylinder grid
inline std::vector<std::int64_t> unit_cylinder_nodes(const SpaceTimeGrid& g,
                                                     double rho) {
  Point origin;
  origin.dim = g.dim();
  return cylinder_nodes(
      g, ParabolicCylinder::standard(origin, rho, rho * rho, false));
}

inline std::vector<int> ball_spatial_indices(const SpaceTimeGrid& g,
                                             double radius) {
  std::vector<int> out;
  Point origin;
  origin.dim = g.dim();
  for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
    for (int ix = 0; ix < g.nx(0); ++ix) {
      Point z;
      z.dim = g.dim();
      z.x[0] = g.x(0, ix);
      if (g.dim() == 2) z.x[1] = g.x(1, iy);
      if (spatial_distance(z, origin) < radius)
        out.push_back(static_cast<int>(g.spatial_index(ix, iy)));
    }
  return out;
}

}  // namespace detail

struct DerivativeDeGiorgi {
  bool hypothesis_met = false;  // |{Q_1 : w < mu/2}| <= nu |Q_1|
  double hypothesis_fraction = 0.0;
  bool early_exit = false;  // 4H < mu, conclusion immediate
  bool converged = false;   // level-set measures hit zero
  bool conclusion_holds = false;  // w >= mu/4 nodewise on Q_{1/2}
  double H = 0.0;
  double recursion_constant = 0.0;  // |A_{m+1}| <= C 16^m |A_m|^{1+2/(N+2)}
  std::vector<double> A_measure;
  std::vector<double> k_level;
};

// Lower-bound propagation for one derivative component on the unit cylinder:
// if the sublevel set {w < mu/2} occupies a nu-fraction or less, the component
// stays above mu/4 on the half cylinder.
inline DerivativeDeGiorgi derivative_degiorgi(const GridFunction& w, double mu,
                                              double A, double nu) {
  if (!(mu > 0.0) || !(A >= 1.0))
    throw std::invalid_argument("derivative_degiorgi: need mu > 0 and A >= 1");
  const auto& g = w.grid();
  const int N = g.dim();
  if (std::max(w.max_value(), -w.min_value()) > A * mu * (1.0 + 1e-9))
    throw std::invalid_argument(
        "derivative_degiorgi: field violates the gradient bound A mu");
  DerivativeDeGiorgi out;
  const double k0 = mu / 2.0;

  const auto q1_nodes = detail::unit_cylinder_nodes(g, 1.0);
  double below = 0.0;
  double H = 0.0;
  for (auto i : q1_nodes) {
    below += (w[i] < k0) ? 1.0 : 0.0;
    H = std::max(H, k0 - w[i]);
  }
  out.H = H;
  out.hypothesis_fraction = below / static_cast<double>(q1_nodes.size());
  out.hypothesis_met = out.hypothesis_fraction <= nu + 1e-15;
  if (!out.hypothesis_met) return out;

  auto check_conclusion = [&] {
    for (auto i : detail::unit_cylinder_nodes(g, 0.5))
      if (w[i] < mu / 4.0 - 1e-15) return false;
    return true;
  };

  if (4.0 * H < mu) {
    out.early_exit = true;
    out.converged = true;
    out.conclusion_holds = check_conclusion();
    return out;
  }

  const double cell = g.cell_volume();
  auto measure_at = [&](int m) {
    const double rho = 0.5 + std::pow(2.0, -(m + 1));
    const double km = k0 - H / (8.0 * (1.0 + A)) * (1.0 - std::pow(2.0, -m));
    out.k_level.push_back(km);
    double cnt = 0.0;
    for (auto i : detail::unit_cylinder_nodes(g, rho))
      cnt += (w[i] < km) ? 1.0 : 0.0;
    return cnt * cell;
  };
  double a_prev = measure_at(0);
  out.A_measure.push_back(a_prev);
  for (int m = 0; m < 40; ++m) {
    if (a_prev == 0.0) {
      out.converged = true;
      break;
    }
    const double a_next = measure_at(m + 1);
    out.A_measure.push_back(a_next);
    if (a_prev > 0.0 && a_next > 0.0) {
      const double predicted =
          std::pow(16.0, m) * std::pow(a_prev, 1.0 + 2.0 / (N + 2.0));
      out.recursion_constant =
          std::max(out.recursion_constant, a_next / predicted);
    }
    a_prev = a_next;
  }
  if (a_prev == 0.0) out.converged = true;
  out.conclusion_holds = out.converged && check_conclusion();
  return out;
}

// mirror statement for the upper bound: apply the primal routine to -w
inline DerivativeDeGiorgi dual_derivative_degiorgi(const GridFunction& w,
                                                   double mu, double A,
                                                   double nu) {
  return derivative_degiorgi(w.map([](double x) { return -x; }), mu, A, nu);
}

struct LinearDecay {
  double harnack_ratio = 0.0;  // sup_{Q_{1/2}} |v| / (mean |v|^q over Q_1)^{1/q}
  double decay_ratio = 0.0;    // oscillation ratio between Q_delta and Q_1
  bool vacuous = false;
};

// Empirical check of the imported linear theory on a solution of the frozen
// linear equation; the coefficient field must be uniformly elliptic.
inline LinearDecay linear_decay_check(const MatrixField& B,
                                      const GridFunction& v, double delta,
                                      double q, double ellipticity) {
  for (const auto& m : B.m) {
    if (min_eig_sym(m) < 1.0 / ellipticity - 1e-12 ||
        spectral_norm_sym(m) > ellipticity + 1e-12)
      throw std::invalid_argument("linear_decay_check: ellipticity violated");
  }
  const auto& g = v.grid();
  LinearDecay out;
  const auto q1 = detail::unit_cylinder_nodes(g, 1.0);
  const auto qh = detail::unit_cylinder_nodes(g, 0.5);
  const auto qd = detail::unit_cylinder_nodes(g, delta);
  if (q1.empty() || qh.empty() || qd.empty())
    throw std::invalid_argument("linear_decay_check: grid too coarse");
  double sup_half = 0.0;
  for (auto i : qh) sup_half = std::max(sup_half, std::abs(v[i]));
  double mean_q = 0.0;
  for (auto i : q1) mean_q += std::pow(std::abs(v[i]), q);
  mean_q /= static_cast<double>(q1.size());
  if (mean_q == 0.0) {
    out.vacuous = true;
    return out;
  }
  out.harnack_ratio = sup_half / std::pow(mean_q, 1.0 / q);

  auto osc_q = [&](const std::vector<std::int64_t>& nodes) {
    double avg = 0.0;
    for (auto i : nodes) avg += v[i];
    avg /= static_cast<double>(nodes.size());
    double s = 0.0;
    for (auto i : nodes) s += std::pow(std::abs(v[i] - avg), q);
    return std::pow(s / static_cast<double>(nodes.size()), 1.0 / q);
  };
  const double o1 = osc_q(q1);
  if (o1 == 0.0) {
    out.vacuous = true;
    return out;
  }
  out.decay_ratio = osc_q(qd) / o1;
  return out;
}

struct GoodTimeSlice {
  bool found = false;
  double t_star = 0.0;
  int slice = -1;
  double fraction = 0.0;  // measured |{B_1 : w >= 1/(2A)}| / |B_1|
};

// first slice t in (-1, -nu/2) where the upper level set occupies at most the
// (1-nu)/(1-nu/2) fraction of the unit ball
inline GoodTimeSlice good_time_slice(const GridFunction& w, double nu,
                                     double A) {
  const auto& g = w.grid();
  const auto ball = detail::ball_spatial_indices(g, 1.0);
  const double threshold = (1.0 - nu) / (1.0 - nu / 2.0);
  GoodTimeSlice out;
  for (int it = 0; it < g.nt(); ++it) {
    const double t = g.t(it);
    if (!(t > -1.0 && t < -nu / 2.0)) continue;
    double cnt = 0.0;
    for (int sidx : ball)
      cnt += (w[g.index(it, 0) + sidx] >= 1.0 / (2.0 * A)) ? 1.0 : 0.0;
    const double frac = cnt / static_cast<double>(ball.size());
    if (frac <= threshold + 1e-15) {
      out.found = true;
      out.t_star = t;
      out.slice = it;
      out.fraction = frac;
      return out;
    }
  }
  return out;
}

struct ExpansionOfPositivity {
  bool found = false;
  double eta0 = 0.0;
  double worst_fraction = 0.0;  // worst slice fraction of {w > 1 - eta0}
  int dyadic_steps = 0;         // eta0 = nu / 2^k
  LogEstimate evidence;         // two-slice logarithmic balance at eta0
};

// Largest eta0 from the dyadic grid nu/2^k such that the level set
// {w > 1 - eta0} stays below the (1 - nu^2/4) fraction of the ball on every
// slice after t_star.
inline ExpansionOfPositivity expansion_of_positivity(const GridFunction& w,
                                                     double nu, double A,
                                                     double t_star) {
  const auto& g = w.grid();
  const auto ball = detail::ball_spatial_indices(g, 1.0);
  const double cap = 1.0 - nu * nu / 4.0;
  ExpansionOfPositivity out;
  for (int k = 1; k <= 48; ++k) {
    const double eta0 = nu / std::pow(2.0, k);
    double worst = 0.0;
    for (int it = 0; it < g.nt(); ++it) {
      const double t = g.t(it);
      if (!(t > t_star && t < 1.0)) continue;
      double cnt = 0.0;
      for (int sidx : ball)
        cnt += (w[g.index(it, 0) + sidx] > 1.0 - eta0) ? 1.0 : 0.0;
      worst = std::max(worst, cnt / static_cast<double>(ball.size()));
    }
    if (worst <= cap + 1e-15) {
      out.found = true;
      out.eta0 = eta0;
      out.worst_fraction = worst;
      out.dyadic_steps = k;
      const double t2 = std::min(1.0 - g.dt(), t_star + 0.75 * (1.0 - t_star));
      out.evidence = log_estimate_check(w, 1.0 / (4.0 * A), A, nu, eta0, t_star,
                                        t2, 0.75);
      return out;
    }
  }
  return out;
}

struct LevelsetShrink {
  bool found = false;
  int j_delta = 0;
  int j0 = 0;
  std::vector<double> A_js;       // time-integrated level-set measures at j_delta
  double slice_margin = 0.0;      // min over slices of |B_1 \ A_j(t)| / |B_1|
  bool margin_ok = false;         // slice_margin stays above (nu/2)^2
  double poincare_constant = 0.0; // worst slicewise level-set inequality ratio
  double energy_constant = 0.0;   // measured constant of the gradient bound
};

// First dyadic level j >= j0 whose time-integrated superlevel measure drops
// below delta_target uniformly over the sampled window endpoints.
inline LevelsetShrink levelset_shrink(const GridFunction& w, double t_star,
                                      double eta0, double nu,
                                      double delta_target,
                                      int endpoint_samples = 5) {
  const auto& g = w.grid();
  if (!(eta0 > 0.0 && eta0 < 1.0))
    throw std::invalid_argument("levelset_shrink: need eta0 in (0,1)");
  LevelsetShrink out;
  out.j0 = static_cast<int>(std::floor(-std::log2(eta0)));
  const auto ball = detail::ball_spatial_indices(g, 1.0);
  const double ball_measure = static_cast<double>(ball.size()) * g.spatial_cell();

  // admissible window endpoints s with s - t_star >= 1/8
  std::vector<int> s_slices;
  {
    std::vector<int> all;
    for (int it = 0; it < g.nt(); ++it)
      if (g.t(it) - t_star >= 0.125 && g.t(it) <= 1.0 + 1e-12) all.push_back(it);
    if (all.empty())
      throw std::invalid_argument("levelset_shrink: window shorter than 1/8");
    for (int i = 0; i < endpoint_samples; ++i) {
      const std::size_t pick = all.size() == 1
                                   ? 0
                                   : static_cast<std::size_t>(
                                         std::llround(static_cast<double>(i) *
                                                      (all.size() - 1) /
                                                      (endpoint_samples - 1)));
      s_slices.push_back(all[pick]);
    }
  }

  auto slice_measure = [&](int it, double level) {
    double cnt = 0.0;
    for (int sidx : ball)
      cnt += (w[g.index(it, 0) + sidx] > level) ? 1.0 : 0.0;
    return cnt * g.spatial_cell();
  };

  for (int j = out.j0; j <= 60; ++j) {
    const double level = 1.0 - std::pow(2.0, -j);
    bool ok = true;
    std::vector<double> a_js;
    for (int s_it : s_slices) {
      double acc = 0.0;
      for (int it = 0; it <= s_it; ++it) {
        if (!(g.t(it) > t_star)) continue;
        acc += slice_measure(it, level) * g.dt();
      }
      a_js.push_back(acc);
      const double window = g.t(s_it) - t_star;
      if (acc > delta_target * ball_measure * window + 1e-15) ok = false;
    }
    if (ok) {
      out.found = true;
      out.j_delta = j;
      out.A_js = a_js;
      // evidence: slice density margin, the slicewise level-set inequality,
      // and the gradient-energy bound at this level
      Point origin;
      origin.dim = g.dim();
      double margin = 1.0;
      double poin = 0.0;
      for (int it = 0; it < g.nt(); ++it) {
        if (!(g.t(it) > t_star && g.t(it) <= 1.0)) continue;
        margin = std::min(margin,
                          1.0 - slice_measure(it, level) / ball_measure);
        Point x0 = origin;
        x0.t = g.t(it);
        const auto lp = levelset_poincare(w, it, x0, 1.0, level,
                                          1.0 - std::pow(2.0, -(j + 1)));
        if (!lp.vacuous && lp.rhs > 0.0)
          poin = std::max(poin, lp.lhs / lp.rhs);
      }
      out.slice_margin = margin;
      out.margin_ok = margin >= nu * nu / 4.0 - 1e-15;
      out.poincare_constant = poin;
      // gradient bound: integral of |grad (w - level)_+|^2 over the window
      const auto trunc = truncate(w, level, TruncSign::plus);
      const auto grad = discrete_gradient(trunc);
      double grad_int = 0.0;
      const int s_last = s_slices.back();
      for (int it = 0; it <= s_last; ++it) {
        if (!(g.t(it) > t_star)) continue;
        for (int sidx : ball) {
          const auto idx = g.index(it, 0) + sidx;
          double s2 = 0.0;
          for (int d = 0; d < g.dim(); ++d) {
            const double c = grad.comp[static_cast<std::size_t>(d)][idx];
            s2 += c * c;
          }
          grad_int += s2;
        }
      }
      grad_int *= g.cell_volume();
      const double ref = std::pow(4.0, -j) * ball_measure *
                         (g.t(s_last) - t_star);
      out.energy_constant = ref > 0.0 ? grad_int / ref : 0.0;
      return out;
    }
  }
  return out;
}

struct FinalDeGiorgi {
  bool converged = false;
  bool zero_measure_verified = false;
  double eta = 0.0;
  double recursion_constant = 0.0;
  std::vector<double> Y;
  int violating_step = -1;
};

// threshold for the terminal recursion Y_{n+1} <= C 4^n Y_n^{1+2/(N+2)}
inline double final_degiorgi_threshold(double C, int N) {
  return std::pow(C, -(N + 2.0) / 2.0) *
         std::pow(4.0, -std::pow((N + 2.0) / 2.0, 2.0));
}

// Terminal level-set iteration at dyadic levels below 1: drives the measure
// of {w > k_n} on shrinking cylinders to zero and verifies the conclusion
// |{Q_{1/2} : w > 1 - eta}| = 0 with eta = 2^{-(j*+2)}.
inline FinalDeGiorgi final_degiorgi(const GridFunction& w, int j_star) {
  const auto& g = w.grid();
  const int N = g.dim();
  FinalDeGiorgi out;
  out.eta = std::pow(2.0, -(j_star + 2));
  const double cell = g.cell_volume();
  auto measure_at = [&](int n) {
    const double rho = 0.5 + std::pow(2.0, -(n + 2));
    const double kn = 1.0 - std::pow(2.0, -(j_star + 2)) -
                      std::pow(2.0, -(j_star + 2 + n));
    double cnt = 0.0;
    for (auto i : detail::unit_cylinder_nodes(g, rho))
      cnt += (w[i] > kn) ? 1.0 : 0.0;
    return cnt * cell;
  };
  double y = measure_at(0);
  out.Y.push_back(y);
  for (int n = 0; n < 40; ++n) {
    if (y == 0.0) {
      out.converged = true;
      break;
    }
    const double y_next = measure_at(n + 1);
    out.Y.push_back(y_next);
    if (y > 0.0 && y_next > 0.0) {
      const double predicted =
          std::pow(4.0, n) * std::pow(y, 1.0 + 2.0 / (N + 2.0));
      const double c = y_next / predicted;
      if (c > out.recursion_constant) {
        out.recursion_constant = c;
        out.violating_step = n;
      }
    }
    y = y_next;
  }
  if (y == 0.0) out.converged = true;
  if (out.converged) {
    double cnt = 0.0;
    for (auto i : detail::unit_cylinder_nodes(g, 0.5))
      cnt += (w[i] > 1.0 - out.eta) ? 1.0 : 0.0;
    out.zero_measure_verified = cnt == 0.0;
    out.violating_step = -1;
  }
  return out;
}

}  // namespace plreg
