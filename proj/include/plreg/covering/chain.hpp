#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

// Parameters of the intrinsic covering iteration.  c0, alpha1, alpha2, alpha3
// are derived quantities.  alpha2 defaults to log(kappa)/log(delta), the value
// the decay chain actually closes with; the literal variant
// log(delta)/log(eta) sits behind the flag.
struct CoveringParams {
  double nu = 0.1;     // measure threshold, in (0, 1/2)
  double kappa = 0.5;  // oscillation decay factor, in (0,1)
  double delta = 0.5;  // radius shrink factor, in (0,1)
  double sigma = 0.5;  // cylinder shrink in the alternative, in (0,1)
  double eta = 0.75;   // supremum decay factor, in (0,1)
  double A = 1.0;      // gradient bound multiplier, >= 1
  double s = 0.0;      // flux regularization, in [0,1]
  double p = 2.0;
  int N = 1;
  bool literal_alpha2 = false;

  double c0() const {
    return 0.5 * sigma * std::min(eta, std::pow(eta, p / 2.0));
  }
  double alpha1() const { return std::log(eta) / std::log(c0()); }
  double alpha2() const {
    return literal_alpha2 ? std::log(delta) / std::log(eta)
                          : std::log(kappa) / std::log(delta);
  }
  double alpha3() const { return std::min(alpha1(), alpha2() / 2.0); }

  void validate() const {
    if (!(nu > 0.0 && nu < 0.5))
      throw std::invalid_argument("CoveringParams: need nu in (0, 1/2)");
    for (double x : {kappa, delta, sigma, eta})
      if (!(x > 0.0 && x < 1.0))
        throw std::invalid_argument("CoveringParams: factors must lie in (0,1)");
    if (!(A >= 1.0)) throw std::invalid_argument("CoveringParams: need A >= 1");
    if (s < 0.0 || s > 1.0)
      throw std::invalid_argument("CoveringParams: need s in [0,1]");
    const double c = c0();
    if (!(c > 0.0 && c < 1.0))
      throw std::logic_error("CoveringParams: derived c0 outside (0,1)");
  }
};

// Q_{c0 R}^{eta mu} nests inside Q_{sigma R}^{mu} exactly when c0 <= eta sigma
// and c0^2 <= eta^p sigma^2.
inline bool check_inclusion(double eta, double sigma, double p, double c0) {
  return c0 <= eta * sigma && c0 * c0 <= std::pow(eta, p) * sigma * sigma;
}

inline bool check_inclusion(const CoveringParams& cp) {
  return check_inclusion(cp.eta, cp.sigma, cp.p, cp.c0());
}

// intrinsic-shape cylinder with the scaling factor applied explicitly, valid
// for any mu > 0 (the intrinsic kind itself is reserved for lambda >= 1)
inline ParabolicCylinder intrinsic_box(const Point& z, double R, double mu,
                                       double p, bool backward = false) {
  return ParabolicCylinder::standard(z, R / mu, std::pow(mu, -p) * R * R,
                                     backward);
}

// node-set cross-check of the same inclusion on a concrete grid
inline bool check_inclusion_nodes(const SpaceTimeGrid& g, const Point& z0,
                                  double R, double mu, const CoveringParams& cp) {
  const auto inner = intrinsic_box(z0, cp.c0() * R, cp.eta * mu, cp.p);
  const auto outer = intrinsic_box(z0, cp.sigma * R, mu, cp.p);
  const auto a = cylinder_nodes(g, inner);
  const auto b = cylinder_nodes(g, outer);
  std::size_t j = 0;
  for (auto i : a) {
    while (j < b.size() && b[j] < i) ++j;
    if (j == b.size() || b[j] != i) return false;
  }
  return true;
}

// base scale for the covering argument: the largest admissible starting
// radius 3 min{mu0, mu0^{p/2}} R0 (it stays inside the 4x cylinder and
// reaches outside the 2x one)
inline double fix_scale(double mu0, double p, double R0) {
  if (!(mu0 >= 1.0)) throw std::invalid_argument("fix_scale: need mu0 >= 1");
  return 3.0 * std::min(mu0, std::pow(mu0, p / 2.0)) * R0;
}

struct ChainLevel {
  int n = 0;
  double R = 0.0;   // c0^n S
  double mu = 0.0;  // eta^n mu0
};

struct CylinderChain {
  Point z;
  double S = 0.0;
  double mu0 = 1.0;
  double p = 2.0;
  std::vector<ChainLevel> levels;
  double identity_residual = 0.0;  // max |eta^n - (R_n/S)^{alpha1}|
};

// materializes (R_n, mu_n) = (c0^n S, eta^n mu0) and verifies the exponent
// identity eta^n = (R_n / S)^{alpha1}
inline CylinderChain chain(const Point& z, double S, double mu0,
                           const CoveringParams& cp, int n_max) {
  cp.validate();
  if (!(S > 0.0)) throw std::invalid_argument("chain: need S > 0");
  if (!(mu0 >= 1.0)) throw std::invalid_argument("chain: need mu0 >= 1");
  CylinderChain ch;
  ch.z = z;
  ch.S = S;
  ch.mu0 = mu0;
  ch.p = cp.p;
  const double c0 = cp.c0();
  const double a1 = cp.alpha1();
  for (int n = 0; n <= n_max; ++n) {
    ChainLevel lv;
    lv.n = n;
    lv.R = std::pow(c0, n) * S;
    lv.mu = std::pow(cp.eta, n) * mu0;
    ch.levels.push_back(lv);
    const double lhs = std::pow(cp.eta, n);
    const double rhs = std::pow(lv.R / S, a1);
    ch.identity_residual = std::max(ch.identity_residual, std::abs(lhs - rhs));
  }
  return ch;
}

// cylinder at one chain level (mu_n may fall below 1, so the scaling is
// applied explicitly)
inline ParabolicCylinder chain_cylinder(const CylinderChain& ch, int n) {
  const auto& lv = ch.levels.at(static_cast<std::size_t>(n));
  return intrinsic_box(ch.z, lv.R, lv.mu, ch.p);
}

struct MeasureAlternative {
  bool measure_small = false;  // |{ |grad u| < mu/2 }| < nu |Q|
  bool s_ok = false;           // s <= mu
  double fraction = 0.0;       // measured |{ |grad u| < mu/2 }| / |Q|
};

inline MeasureAlternative measure_alternative(const GridFunction& grad_mag,
                                              const ParabolicCylinder& cyl,
                                              double mu, double nu, double s) {
  const auto nodes = cylinder_nodes(grad_mag.grid(), cyl);
  if (nodes.empty())
    throw std::invalid_argument("measure_alternative: cylinder misses the grid");
  double below = 0.0;
  for (auto i : nodes) below += grad_mag[i] < mu / 2.0 ? 1.0 : 0.0;
  MeasureAlternative out;
  out.fraction = below / static_cast<double>(nodes.size());
  out.measure_small = out.fraction < nu;
  out.s_ok = s <= mu;
  return out;
}

enum class SwitchReason { measure_fails, s_exceeds, both, exhausted };

struct SwitchingRecord {
  int n0 = 0;
  SwitchReason reason = SwitchReason::exhausted;
  double R_n0 = 0.0;
  double mu_n0 = 0.0;
  double failing_fraction = 0.0;
};

// First chain level at which the decay step can no longer be applied: either
// the small-gradient set loses density or the regularization overtakes mu_n.
// Exhausting the chain without a switch returns the sentinel reason.
inline SwitchingRecord switching_radius(const GridFunction& grad_mag,
                                        const CylinderChain& ch, double nu,
                                        double s) {
  SwitchingRecord rec;
  for (std::size_t n = 1; n < ch.levels.size(); ++n) {
    const auto& lv = ch.levels[n];
    const auto cyl = chain_cylinder(ch, static_cast<int>(n));
    if (cylinder_nodes(grad_mag.grid(), cyl).empty()) {
      // the chain has dropped below the grid resolution
      rec.n0 = static_cast<int>(n) - 1;
      rec.reason = SwitchReason::exhausted;
      rec.R_n0 = ch.levels[n - 1].R;
      rec.mu_n0 = ch.levels[n - 1].mu;
      return rec;
    }
    const auto alt = measure_alternative(grad_mag, cyl, lv.mu, nu, s);
    const bool s_fail = !alt.s_ok;
    if (alt.measure_small || s_fail) {
      rec.n0 = static_cast<int>(n);
      rec.reason = alt.measure_small && s_fail ? SwitchReason::both
                   : alt.measure_small         ? SwitchReason::measure_fails
                                               : SwitchReason::s_exceeds;
      rec.R_n0 = lv.R;
      rec.mu_n0 = lv.mu;
      rec.failing_fraction = alt.fraction;
      return rec;
    }
  }
  rec.n0 = static_cast<int>(ch.levels.size()) - 1;
  rec.reason = SwitchReason::exhausted;
  rec.R_n0 = ch.levels.back().R;
  rec.mu_n0 = ch.levels.back().mu;
  return rec;
}

}  // namespace plreg
