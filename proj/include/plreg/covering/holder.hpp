#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "plreg/core/rng.hpp"
#include "plreg/covering/chain.hpp"
#include "plreg/mesh/fields.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

enum class PairClass { time_pair, space_pair, far_pair };

// sub-case of the two-point analysis: 0 = both intrinsic scales dominate the
// separation, 1 = separation dominates both, 2 = mixed (bracketing scale)
struct PairRecord {
  Point z0, z1;
  double d = 0.0;
  PairClass cls = PairClass::time_pair;
  int subcase = 0;
  double diff = 0.0;  // |grad u(z0) - grad u(z1)|
  bool excluded = false;
};

struct CaseTable {
  int count = 0;
  int excluded = 0;
  double worst_quotient = 0.0;  // diff / mu0^a at the smallest admissible alpha
};

struct HolderCertificate {
  double alpha_fit = 0.0;
  double worst_C = 0.0;
  double a_exp = 1.0;
  bool far_bound_holds = true;
  double far_worst_ratio = 0.0;  // measured against the coarse two-point bound
  int excluded_pairs = 0;
  int dropped_bins = 0;
  std::vector<double> bin_log_d;
  std::vector<double> bin_log_q;
  std::map<int, CaseTable> cases;  // key: 3*class + subcase
  std::vector<PairRecord> pairs;
};

namespace holder_detail {

inline std::int64_t nearest_node(const SpaceTimeGrid& g, const Point& z) {
  const int it = std::min(
      std::max(static_cast<int>(std::round((z.t - g.t_lo()) / g.dt())), 0),
      g.nt() - 1);
  const int ix = std::min(
      std::max(static_cast<int>(std::round((z.x[0] - g.x_lo(0)) / g.h())), 0),
      g.nx(0) - 1);
  const int iy =
      g.dim() == 2
          ? std::min(std::max(static_cast<int>(std::round(
                                  (z.x[1] - g.x_lo(1)) / g.h())),
                              0),
                     g.nx(1) - 1)
          : 0;
  return g.index(it, ix, iy);
}

inline double grad_diff(const VectorField& grad, std::int64_t a, std::int64_t b) {
  double s = 0.0;
  for (int d = 0; d < grad.dim(); ++d) {
    const double c = grad.comp[static_cast<std::size_t>(d)][a] -
                     grad.comp[static_cast<std::size_t>(d)][b];
    s += c * c;
  }
  return std::sqrt(s);
}

}  // namespace holder_detail

// Two-point gradient continuity certificate over the base cylinder
// B_{R0} x (-R0^2, R0^2) around `center`.  Pairs are sampled deterministically,
// stratified by dyadic separation and by class (same space column, same time
// slice, or farther apart than the covering scale allows).  Each point's
// switching level classifies the pair into the three-case analysis.  The
// returned exponent is fitted from the worst quotient per separation bin; the
// constant is the worst quotient at that exponent.
inline HolderCertificate holder_certificate(const VectorField& grad,
                                            const GridFunction& grad_mag,
                                            const Point& center, double R0,
                                            double S, double mu0,
                                            const CoveringParams& cp,
                                            int pairs_per_bin = 24,
                                            std::uint64_t seed = 2024) {
  cp.validate();
  const auto& g = grad.grid();
  HolderCertificate cert;
  const double p = cp.p;
  cert.a_exp = 1.0 + std::abs(p / 2.0 - 1.0) +
               cp.alpha3() * std::max(0.0, std::max(p / 2.0 - 1.0, 1.0 - p / 2.0));
  const double mu0a = std::pow(mu0, cert.a_exp);

  // node list of the base cylinder for sampling
  const auto base_nodes = cylinder_nodes(
      g, ParabolicCylinder::standard(center, R0, R0 * R0, false));
  if (base_nodes.size() < 8)
    throw std::invalid_argument("holder_certificate: base cylinder too coarse");

  // per-point switching data, cached by node index
  std::map<std::int64_t, ChainLevel> switch_cache;
  auto switching_at = [&](std::int64_t node) -> const ChainLevel& {
    auto it = switch_cache.find(node);
    if (it != switch_cache.end()) return it->second;
    const auto z = g.node_point(node);
    const auto ch = chain(z, S, mu0, cp, 24);
    const auto rec = switching_radius(grad_mag, ch, cp.nu, cp.s);
    ChainLevel lv;
    lv.n = rec.n0;
    lv.R = rec.R_n0;
    lv.mu = rec.mu_n0;
    return switch_cache.emplace(node, lv).first->second;
  };

  CounterRng rng(seed, 41);
  const double d_floor = 2.0 * std::max(g.h(), std::sqrt(g.dt()));
  const double far_bound_rate = 2.0 * mu0 / R0 *
                                std::max(mu0, std::pow(mu0, p / 2.0)) /
                                std::min(mu0, std::pow(mu0, p / 2.0));
  // a pair is far exactly when the second point escapes the covering cylinder
  // of the first: spatial reach S/mu0, temporal reach mu0^{-p} S^2
  auto is_far = [&](const Point& a, const Point& b) {
    double dx = 0.0;
    for (int d2 = 0; d2 < g.dim(); ++d2) {
      const double c = a.x[static_cast<std::size_t>(d2)] -
                       b.x[static_cast<std::size_t>(d2)];
      dx += c * c;
    }
    return std::sqrt(dx) >= S / mu0 ||
           std::abs(a.t - b.t) >= std::pow(mu0, -p) * S * S;
  };

  std::map<int, double> bin_worst;  // dyadic bin -> worst quotient
  auto push_pair = [&](PairRecord rec) {
    const auto n0 = holder_detail::nearest_node(g, rec.z0);
    const auto n1 = holder_detail::nearest_node(g, rec.z1);
    const auto a = g.node_point(n0);
    const auto b = g.node_point(n1);
    rec.d = parabolic_distance(a, b);
    if (rec.d < d_floor || n0 == n1) return;
    rec.diff = holder_detail::grad_diff(grad, n0, n1);

    // classify through the switching scales of the two endpoints
    const auto& s0 = switching_at(n0);
    const auto& s1 = switching_at(n1);
    const double e0 = rec.cls == PairClass::time_pair
                          ? std::pow(s0.mu, -p / 2.0) * s0.R
                          : s0.R / s0.mu;
    const double e1 = rec.cls == PairClass::time_pair
                          ? std::pow(s1.mu, -p / 2.0) * s1.R
                          : s1.R / s1.mu;
    if (rec.cls == PairClass::far_pair)
      rec.subcase = 0;
    else if (2.0 * rec.d <= std::min(e0, e1))
      rec.subcase = 0;
    else if (2.0 * rec.d >= std::max(e0, e1))
      rec.subcase = 1;
    else
      rec.subcase = 2;

    // exclude pairs whose classification cylinders would leave the grid
    auto inside = [&](const Point& z, double scale_r, double scale_mu) {
      const double sr = scale_r / scale_mu;
      const double st = std::pow(scale_mu, -p) * scale_r * scale_r;
      for (int d2 = 0; d2 < g.dim(); ++d2) {
        if (z.x[static_cast<std::size_t>(d2)] - sr < g.x_lo(d2) - 1e-12 ||
            z.x[static_cast<std::size_t>(d2)] + sr > g.x_hi(d2) + 1e-12)
          return false;
      }
      return z.t - st >= g.t_lo() - 1e-12 && z.t + st <= g.t_hi() + 1e-12;
    };
    rec.excluded = !inside(a, std::min(s0.R, S), std::max(s0.mu, 1.0)) ||
                   !inside(b, std::min(s1.R, S), std::max(s1.mu, 1.0));

    const int key = 3 * static_cast<int>(rec.cls) + rec.subcase;
    auto& tab = cert.cases[key];
    ++tab.count;
    if (rec.excluded) {
      ++tab.excluded;
      ++cert.excluded_pairs;
    } else {
      const double quotient = rec.diff / mu0a;
      tab.worst_quotient = std::max(tab.worst_quotient, quotient);
      const int bin = static_cast<int>(
          std::floor(std::log2(std::max(rec.d / R0, 1e-12))));
      auto [itb, fresh] = bin_worst.try_emplace(bin, quotient);
      if (!fresh) itb->second = std::max(itb->second, quotient);
      if (rec.cls == PairClass::far_pair) {
        const double ratio = rec.diff / rec.d / far_bound_rate;
        cert.far_worst_ratio = std::max(cert.far_worst_ratio, ratio);
        if (ratio > 1.0 + 1e-12) cert.far_bound_holds = false;
      }
    }
    cert.pairs.push_back(rec);
  };

  const int n_bins = std::max(
      1, static_cast<int>(std::floor(std::log2(2.0 * R0 / d_floor))));
  for (int b = 0; b < n_bins; ++b) {
    const double d_target = 2.0 * R0 * std::pow(2.0, -(b + 1));
    if (d_target < d_floor) {
      ++cert.dropped_bins;
      continue;
    }
    for (int k = 0; k < pairs_per_bin; ++k) {
      const auto z0 =
          g.node_point(base_nodes[rng.index(base_nodes.size())]);
      // same space column, separated in time
      PairRecord tr;
      tr.z0 = z0;
      tr.z1 = z0;
      tr.z1.t = z0.t + d_target * d_target * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      if (tr.z1.t >= g.t_lo() && tr.z1.t <= g.t_hi()) {
        tr.cls = PairClass::time_pair;
        push_pair(tr);
      }
      // same time slice, separated in space
      PairRecord sr;
      sr.z0 = z0;
      sr.z1 = z0;
      const int axis = g.dim() == 2 && rng.uniform() < 0.5 ? 1 : 0;
      sr.z1.x[static_cast<std::size_t>(axis)] +=
          d_target * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      if (sr.z1.x[static_cast<std::size_t>(axis)] >= g.x_lo(axis) &&
          sr.z1.x[static_cast<std::size_t>(axis)] <= g.x_hi(axis)) {
        sr.cls = PairClass::space_pair;
        push_pair(sr);
      }
    }
  }
  // far pairs: the second point escapes the covering cylinder of the first
  for (int k = 0; k < 8 * pairs_per_bin; ++k) {
    PairRecord fr;
    fr.z0 = g.node_point(base_nodes[rng.index(base_nodes.size())]);
    fr.z1 = g.node_point(base_nodes[rng.index(base_nodes.size())]);
    fr.cls = PairClass::far_pair;
    if (!is_far(fr.z0, fr.z1)) continue;
    push_pair(fr);
  }

  // fit the exponent on the worst quotient per dyadic bin
  std::vector<std::pair<double, double>> pts;
  for (const auto& [bin, q] : bin_worst)
    if (q > 0.0)
      pts.emplace_back(bin * std::log(2.0), std::log(q));
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    cert.alpha_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    for (auto& [x, y] : pts) {
      cert.bin_log_d.push_back(x);
      cert.bin_log_q.push_back(y);
    }
  }
  for (const auto& rec : cert.pairs) {
    if (rec.excluded || rec.d <= 0.0) continue;
    const double denom = mu0a * std::pow(rec.d / R0, cert.alpha_fit);
    if (denom > 0.0) cert.worst_C = std::max(cert.worst_C, rec.diff / denom);
  }
  return cert;
}

}  // namespace plreg
