#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "plreg/calculus/energy.hpp"
#include "plreg/calculus/inequalities.hpp"
#include "plreg/calculus/levelset.hpp"
#include "plreg/config/config.hpp"
#include "plreg/core/reduce.hpp"
#include "plreg/core/rng.hpp"
#include "plreg/covering/alternative.hpp"
#include "plreg/covering/chain.hpp"
#include "plreg/covering/decay.hpp"
#include "plreg/covering/holder.hpp"
#include "plreg/iterate/bounds.hpp"
#include "plreg/iterate/degiorgi.hpp"
#include "plreg/iterate/lemmas.hpp"
#include "plreg/mesh/io.hpp"
#include "plreg/report/export.hpp"
#include "plreg/report/record.hpp"
#include "plreg/scenarios/corpus.hpp"
#include "plreg/solver/weakform.hpp"

namespace plreg {

struct ScenarioSettings {
  std::uint64_t seed = 42;
  int nx = 64;
  int nt = 64;
  double eps = 0.5;        // integrability offset for the main bound
  double sigma = 0.5;      // cylinder shrink fraction
  CoveringParams covering;
  std::vector<double> p_list;  // exponent sweep override; empty = defaults
};

inline ScenarioSettings settings_from_config(const ConfigFile& cfg) {
  ScenarioSettings s;
  s.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 42));
  s.nx = static_cast<int>(cfg.get_int("grid.nx", 64));
  s.nt = static_cast<int>(cfg.get_int("grid.nt", 64));
  s.eps = cfg.get_double("iterate.epsilon", 0.5);
  s.sigma = cfg.get_double("iterate.sigma", 0.5);
  s.covering.nu = cfg.get_double("covering.nu", 0.1);
  s.covering.kappa = cfg.get_double("covering.kappa", 0.5);
  s.covering.delta = cfg.get_double("covering.delta", 0.5);
  s.covering.sigma = cfg.get_double("covering.sigma", 0.5);
  s.covering.eta = cfg.get_double("covering.eta", 0.75);
  s.covering.A = cfg.get_double("covering.A", 1.0);
  if (cfg.has("flux.p")) s.p_list = {cfg.get_double("flux.p", 2.0)};
  return s;
}

// ---------------------------------------------------------------------------
// closed-form inversions used by the calibration

struct SupBoundCheck {
  double J = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double required_c1 = 0.0;
  bool pass = false;
};

namespace scenario_detail {

inline double integrand_exponent(ExponentMode mode, double p, double eps) {
  switch (mode) {
    case ExponentMode::unified: return p + eps;
    case ExponentMode::degenerate: return p - 2.0 + eps;
    case ExponentMode::singular: return eps;
  }
  return p + eps;
}

inline double eps_effective(ExponentMode mode, double p, double eps) {
  return mode == ExponentMode::singular ? eps + p - 2.0 : eps;
}

inline double mode_bound(ExponentMode mode, double J, double sf, double rho,
                         double theta, double eps, int N, double p, double C1) {
  switch (mode) {
    case ExponentMode::unified:
      return lipschitz_bound(J, sf, rho, theta, eps, N, p, C1);
    case ExponentMode::degenerate:
      return degenerate_bound(J, sf, rho, theta, eps, N, p, C1);
    case ExponentMode::singular:
      return singular_bound(J, sf, rho, theta, eps, N, p, C1);
  }
  return 1.0;
}

// smallest structural constant making the closed-form bound cover `measured`
inline double required_c1_for_bound(ExponentMode mode, double J, double sf,
                                    double rho, double theta, double eps, int N,
                                    double p, double measured) {
  if (measured <= 1.0 || J <= 0.0) return 0.0;
  const auto e = choose_exponents(mode, p, N);
  const auto bc = bound_constants(N, p, e, rho, theta);
  const double ee = eps_effective(mode, p, eps);
  const double X = bc.level_power;
  const double second = std::pow(std::pow(4.0, bc.sigma),
                                 X * (X - 2.0 * ee) / (4.0 * ee * ee));
  const double first_needed = measured / second;
  const double bracket_needed =
      std::pow(first_needed, 2.0 * ee / (X * bc.sigma));
  const double rest = std::pow(2.0, 1.0 / bc.sigma) *
                      std::pow(bc.growth, (bc.N + 2.0) / 2.0) *
                      std::pow(J, 2.0 / (bc.N + 2.0)) * bc.radius_weight /
                      ((1.0 - sf) * (1.0 - sf));
  return bracket_needed / rest;
}

// smallest structural constant making the first-iteration level cover the
// measured supremum on the shrunken cylinder
inline double required_c1_for_level(const GridFunction& v, const Point& z0,
                                    double sf, const BoundConstants& bc,
                                    double k_target) {
  if (k_target <= 1.0) return 0.0;
  const auto& g = v.grid();
  const auto base = ParabolicCylinder::standard(z0, bc.rho, bc.theta, false);
  const auto nodes = cylinder_nodes(g, base);
  const double J = integrate_nodes(g, nodes, [&](std::int64_t i) {
    return std::pow(std::max(v[i], 0.0), bc.integrand_power);
  });
  const double M = sup_nodes(v, nodes);
  if (J <= 0.0 || M <= 0.0) return 0.0;
  const double rest = std::pow(bc.growth, (bc.N + 2.0) / 2.0) *
                      std::pow(J, 2.0 / (bc.N + 2.0)) * bc.radius_weight /
                      ((1.0 - sf) * (1.0 - sf)) * std::pow(M, bc.sup_power);
  return std::pow(k_target, 1.0 / bc.sigma) / rest;
}

inline SupBoundCheck sup_bound_check(const CorpusField& f, ExponentMode mode,
                                     double eps, double sf, double C1) {
  const auto& g = f.u.grid();
  const int N = g.dim();
  const double p = f.params.p;
  const auto base =
      ParabolicCylinder::standard(f.center, f.rho, f.theta, false);
  const auto shrunk = ParabolicCylinder::standard(f.center, sf * f.rho,
                                                  sf * f.theta, false);
  SupBoundCheck out;
  const double q = integrand_exponent(mode, p, eps);
  out.J = integrate_nodes(g, cylinder_nodes(g, base), [&](std::int64_t i) {
    return std::pow(f.grad_mag[i], q);
  });
  out.measured = sup_nodes(f.grad_mag, cylinder_nodes(g, shrunk));
  out.bound = mode_bound(mode, out.J, sf, f.rho, f.theta, eps, N, p, C1);
  out.required_c1 = required_c1_for_bound(mode, out.J, sf, f.rho, f.theta, eps,
                                          N, p, out.measured);
  out.pass = out.measured <= out.bound * (1.0 + 1e-12);
  return out;
}

inline void validate_unique_names(const RunReport& rep) {
  std::set<std::string> seen;
  for (const auto& c : rep.checks)
    if (!seen.insert(c.name).second)
      throw std::logic_error("scenario produced a duplicate check name: " +
                             c.name);
}

inline GridPtr unit_grid(int n) {
  const double h = 2.0 / (n - 1);
  return share(SpaceTimeGrid::make_1d(h, h, -1, 1, -1, 1));
}

}  // namespace scenario_detail

// ---------------------------------------------------------------------------
// calibration: measures the structural constants on the corpus and freezes
// them; deterministic for a fixed seed

inline ConstantsLock run_calibrate(const ScenarioSettings& st) {
  ConstantsLock lock;
  const double pad = 1.0 + 1e-6;
  auto calibrate_mode = [&](ExponentMode mode, const std::vector<double>& ps,
                            double eps, const char* key) {
    double c1 = 1.0;
    for (double p : ps) {
      const auto f = corpus_field(p, st.nx, st.nt);
      const auto chk =
          scenario_detail::sup_bound_check(f, mode, eps, st.sigma, 1.0);
      c1 = std::max(c1, chk.required_c1);
      // the level choice must also certify the first iteration
      const auto e = choose_exponents(mode, p, f.u.grid().dim());
      const auto bc = bound_constants(f.u.grid().dim(), p, e, f.rho, f.theta);
      const auto shrunk = ParabolicCylinder::standard(
          f.center, st.sigma * f.rho, st.sigma * f.theta, false);
      const double k_target =
          sup_nodes(f.grad_mag, cylinder_nodes(f.u.grid(), shrunk));
      c1 = std::max(c1, scenario_detail::required_c1_for_level(
                            f.grad_mag, f.center, st.sigma, bc, k_target));
      // and dominate the measured second-pass recursion constant
      const auto si = second_iteration(f.grad_mag, f.center, st.sigma, eps, bc,
                                       1.0);
      if (si.recursion_constant > 1.0) {
        const double rest = si.claimed_constant;  // at C1 = 1
        if (rest > 0.0)
          c1 = std::max(c1, std::pow(si.recursion_constant, 1.0 / bc.sigma) /
                                std::pow(rest, 1.0 / bc.sigma));
      }
    }
    lock.values[key] = c1 * pad;
  };
  calibrate_mode(ExponentMode::unified, {1.6, 2.0, 2.5, 3.0}, st.eps,
                 "c1_unified");
  calibrate_mode(ExponentMode::degenerate, {3.0}, 1.0, "c1_degenerate");
  calibrate_mode(ExponentMode::singular, {1.6}, 1.0, "c1_singular");

  // covering parameters: validated defaults plus the measured constants of
  // the derivative iteration on the manufactured family
  lock.values["nu"] = st.covering.nu;
  lock.values["kappa"] = st.covering.kappa;
  lock.values["delta"] = st.covering.delta;
  lock.values["sigma"] = st.covering.sigma;
  lock.values["eta"] = st.covering.eta;
  {
    CounterRng rng(st.seed, 101);
    const auto g = scenario_detail::unit_grid(49);
    double worst = 0.0;
    double worst_fraction = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto mf = manufactured_ring_field(g, rng);
      const auto r = derivative_degiorgi(mf.w, mf.mu, mf.A, 0.49);
      worst = std::max(worst, r.recursion_constant);
      worst_fraction = std::max(worst_fraction, r.hypothesis_fraction);
    }
    lock.values["c_deriv_recursion"] = worst * pad;
    // measured threshold admitting the manufactured family, capped below 1/2;
    // the margin covers draw-to-draw variation of the worst fraction
    if (worst_fraction >= 0.5)
      throw PreconditionError(
          "calibrate: no admissible density threshold below 1/2 (worst "
          "hypothesis fraction " + std::to_string(worst_fraction) + ")");
    lock.values["nu_deriv"] = std::min(0.45, worst_fraction * 1.2);
  }
  {
    CounterRng rng(st.seed, 103);
    const auto g = scenario_detail::unit_grid(65);
    double worst = 1.0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto mf = manufactured_alt2_field(g, rng);
      const auto fd = final_degiorgi(mf.w, 5);
      worst = std::max(worst, fd.recursion_constant);
    }
    lock.values["c_final_recursion"] = worst * pad;
  }
  return lock;
}

// ---------------------------------------------------------------------------
// verification scenarios

inline RunReport scenario_verify_lemmas(const ScenarioSettings& st) {
  RunReport rep;
  rep.scenario = "verify-lemmas";
  rep.seed = st.seed;

  {
    const auto r = fast_geometric(2.0, 4.0, 1.0, 0.125, 40);
    rep.add("iteration.fast_geometric.threshold", r.threshold, 0.125,
            0.0, std::abs(r.threshold - 0.125) < 1e-15);
    rep.add("iteration.fast_geometric.converges", r.sequence.back(), 1e-12, 0.0,
            r.converged);
    const auto d = fast_geometric(2.0, 4.0, 1.0, 1.25, 40);
    rep.add("iteration.fast_geometric.diverges",
            d.overflowed ? 1e300 : d.sequence.back(), 1e6, 0.0,
            d.overflowed || d.sequence.back() > 1e6);
  }
  {
    const double bound = bounded_recursive(2.0, 4.0, 0.5);
    rep.add("iteration.bounded_recursive.value", bound, 256.0, 0.0,
            std::abs(bound - 256.0) < 1e-12);
    CounterRng rng(st.seed, 11);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      double y = rng.uniform(0.0, 1e6);
      for (int n = 59; n >= 0; --n)
        y = rng.uniform() * 2.0 * std::pow(4.0, n) * std::pow(y, 0.5);
      worst = std::max(worst, y);
      if (y > bound * (1 + 1e-12)) ok = false;
    }
    rep.add("iteration.bounded_recursive.random_sequences", worst, bound, 0.0,
            ok);
  }
  {
    // exact level-set inequalities on random 16^3 fields
    const auto g = share(SpaceTimeGrid::make_2d(2.0 / 15, 1.0 / 15, -1, 1, -1,
                                                1, 0, 1));
    const auto cyl =
        ParabolicCylinder::standard(point2(0, 0, 0.5), 0.95, 0.45, false);
    CounterRng rng(st.seed, 13);
    bool cheb_ok = true, remark_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
      GridFunction v(g);
      for (std::int64_t i = 0; i < v.size(); ++i)
        v[i] = rng.uniform(0.0, 4.0);
      const double k = rng.uniform(0.05, 1.0);
      const double k_next = 2.0 * k * rng.uniform(1.0, 1.4);
      if (!chebyshev_check(v, k, k_next, rng.uniform(0.5, 3.0), cyl).holds)
        cheb_ok = false;
      if (!dyadic_comparison(v, rng.uniform(0.5, 2.0),
                       1 + static_cast<int>(rng.index(9)),
                       rng.uniform(1.1, 3.0), cyl)
               .holds)
        remark_ok = false;
    }
    rep.add("levelset.chebyshev.exact", cheb_ok ? 1.0 : 0.0, 1.0, 0.0, cheb_ok);
    rep.add("levelset.dyadic_comparison.exact", remark_ok ? 1.0 : 0.0, 1.0, 0.0,
            remark_ok);
  }
  {
    // embedding ratio: scale invariance and corpus boundedness
    const auto g = share(SpaceTimeGrid::make_1d(1.0 / 32, 1.0 / 32, -1, 1, 0, 1));
    const auto tent = GridFunction::sample(g, [](const Point& z) {
      return std::max(0.0, 1.0 - std::abs(z.x[0])) * (1.0 + 0.3 * z.t);
    });
    const auto r1 = sobolev_embedding_ratio(tent, 2.0);
    const auto r2 =
        sobolev_embedding_ratio(tent.map([](double x) { return 5.0 * x; }), 2.0);
    rep.add("embedding.scale_invariance", r1.ratio, r2.ratio, 0.0,
            std::abs(r1.ratio - r2.ratio) <= 1e-10 * r1.ratio);
    CounterRng rng(st.seed, 17);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double a = rng.uniform(0.5, 2.0), wnum = rng.uniform(1.0, 6.0);
      const auto v = GridFunction::sample(g, [&](const Point& z) {
        return a * std::max(0.0, 1.0 - std::abs(z.x[0])) *
               std::abs(std::sin(wnum * z.x[0] + z.t));
      });
      worst = std::max(worst, sobolev_embedding_ratio(v, 2.0).ratio);
    }
    rep.add("embedding.corpus_bounded", worst, 10.0, worst, worst < 10.0);
  }
  {
    // one empirical constant for the slicewise level-set inequality
    const auto g = share(SpaceTimeGrid::make_1d(1.0 / 16, 0.25, 0, 1, 0, 1));
    CounterRng rng(st.seed, 19);
    double gamma_emp = 0.0;
    int live = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const double a = rng.uniform(0.5, 2.0);
      const auto v = GridFunction::sample(g, [&](const Point& z) {
        return a * z.x[0] + 0.1 * std::sin(3.0 * z.x[0]);
      });
      const double k = rng.uniform(0.1, 0.3) * a;
      const auto r = levelset_poincare(v, 1, point1(0.5, 0.25), 0.5, k,
                                       k + rng.uniform(0.2, 0.4) * a);
      if (!r.vacuous && r.rhs > 0.0) {
        gamma_emp = std::max(gamma_emp, r.lhs / r.rhs);
        ++live;
      }
    }
    rep.add("poincare.levelset.corpus", gamma_emp, 5.0, gamma_emp,
            live > 0 && gamma_emp < 5.0);
  }
  scenario_detail::validate_unique_names(rep);
  return rep;
}

inline RunReport scenario_verify_energy(const ScenarioSettings& st) {
  RunReport rep;
  rep.scenario = "verify-energy";
  rep.seed = st.seed;
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (double p : std::vector<double>{1.5, 2.0, 3.0}) {
    const auto f = corpus_field_matched(p, st.nx, st.nt);
    const auto& g = f.u.grid();
    const int N = g.dim();
    const auto e = choose_exponents(ExponentMode::unified, p, N);
    const auto base =
        ParabolicCylinder::standard(f.center, f.rho, f.theta, false);
    const double vmax = sup_nodes(f.grad_mag, cylinder_nodes(g, base));
    const double rn = shrinking_radius(f.rho, st.sigma, 1);
    const double tn = shrinking_radius(f.theta, st.sigma, 1);
    const auto outer = ParabolicCylinder::standard(f.center, rn, tn, false);
    const auto inner = ParabolicCylinder::standard(
        f.center, 0.5 * (rn + shrinking_radius(f.rho, st.sigma, 2)),
        0.5 * (tn + shrinking_radius(f.theta, st.sigma, 2)), false);
    CutoffFunction zeta(f.u.grid_ptr(), inner, outer);
    zeta.certify(std::pow(2.0, 3) / ((1 - st.sigma) * f.rho),
                 std::pow(2.0, 3) / ((1 - st.sigma) * f.theta));
    // suite statistic: worst constant over a sweep of truncation levels
    double c_p = 0.0;
    double lhs_p = 0.0, rhs_p = 0.0;
    for (double kq : {0.25, 0.35, 0.5}) {
      const double k = std::max(kq * vmax, 1e-3);
      const double k_next = level_at(k, 2);
      const auto te = truncated_energy(f.grad_mag, outer, zeta, k, k_next,
                                       e.alpha, e.beta, e.gamma, p);
      if (te.vacuous) continue;
      if (te.empirical_C > c_p) {
        c_p = te.empirical_C;
        lhs_p = te.lhs_sup + te.lhs_grad;
        rhs_p = te.rhs_grad + te.rhs_time;
      }
    }
    rep.add("energy.truncated.p" + std::to_string(p), lhs_p, rhs_p, c_p,
            std::isfinite(c_p) && c_p > 0);
    cmin = std::min(cmin, c_p);
    cmax = std::max(cmax, c_p);
  }
  rep.add("energy.unified_spread", cmax, 3.0 * cmin, cmax / cmin,
          cmax <= 3.0 * cmin);
  {
    // full weighted balance on the closed-form solution
    const auto f = corpus_field(2.0, st.nx, st.nt);
    const auto outer = ParabolicCylinder::standard(f.center, f.rho, f.theta,
                                                   /*backward=*/true);
    const auto inner = ParabolicCylinder::standard(
        f.center, 0.75 * f.rho, 0.75 * f.theta, /*backward=*/true);
    CutoffFunction zeta(f.u.grid_ptr(), inner, outer);
    const auto bal =
        energy_balance(f.u, WeightFunction::one(), outer, zeta, f.params);
    rep.add("energy.balance.heat_kernel",
            bal.lhs_sup + bal.lhs_hess + bal.lhs_gradv + bal.lhs_cross,
            bal.rhs_grad + bal.rhs_time, bal.empirical_C,
            !bal.vacuous && std::isfinite(bal.empirical_C));
  }
  scenario_detail::validate_unique_names(rep);
  return rep;
}

inline RunReport scenario_verify_lipschitz(const ScenarioSettings& st,
                                           const ConstantsLock& lock,
                                           const std::string& outdir = "") {
  RunReport rep;
  rep.scenario = "verify-lipschitz";
  rep.seed = st.seed;
  const double C1 = lock.get("c1_unified", 1.0);
  std::vector<double> ps = st.p_list.empty()
                               ? std::vector<double>{1.6, 2.0, 2.5, 3.0}
                               : st.p_list;
  for (double p : ps) {
    // the corpus is one-dimensional: the admissible window is p > max(1, 2N/(N+2))
    if (!(p > 1.0) || !(p > 2.0 / 3.0))
      throw PreconditionError("verify-lipschitz: p outside the admissible range");
    const auto f = corpus_field(p, st.nx, st.nt);
    const auto chk = scenario_detail::sup_bound_check(
        f, ExponentMode::unified, st.eps, st.sigma, C1);
    rep.add("lipschitz.bound.p" + std::to_string(p), chk.measured, chk.bound,
            chk.required_c1, chk.pass, f.label);
    // the first iteration converges at the calibrated level choice
    const auto e = choose_exponents(ExponentMode::unified, p, f.u.grid().dim());
    const auto bc =
        bound_constants(f.u.grid().dim(), p, e, f.rho, f.theta);
    const double k = choose_k(f.grad_mag, f.center, st.sigma, bc, C1);
    const auto tr = degiorgi_first(f.grad_mag, f.center, st.sigma, bc, k);
    rep.add("lipschitz.first_iteration.p" + std::to_string(p),
            tr.steps.back().Y, kDeGiorgiTol, tr.empirical_constant,
            tr.converged && chk.measured <= k * (1 + 1e-12));
    if (!outdir.empty())
      write_trace_csv(outdir + "/trace_p" + std::to_string(p) + ".csv", tr);
    // second pass reproduces the closed form
    const auto si =
        second_iteration(f.grad_mag, f.center, st.sigma, st.eps, bc, C1);
    rep.add("lipschitz.second_iteration.p" + std::to_string(p),
            si.recursion_constant, si.claimed_constant, si.recursion_constant,
            si.step_claim_holds && si.consistent);
  }
  {
    // coarse boundedness recursion: a head below the certified threshold must
    // ride the extremal recursion to zero
    const auto f = corpus_field(2.0, st.nx, st.nt);
    const auto e = choose_exponents(ExponentMode::unified, 2.0, 1);
    // k = 1 keeps the truncation active so the step constant is measured on
    // live levels; the threshold implication is checked either way
    const auto rr = rough_lipschitz_recursion(f.grad_mag, f.center, f.rho,
                                              f.theta, st.sigma, e, 1, 2.0,
                                              1.0);
    const bool implication = !rr.threshold_met || rr.converged;
    rep.add("lipschitz.rough_recursion.p2", rr.Y.front(), rr.threshold,
            rr.B1_empirical, implication && std::isfinite(rr.B1_empirical));
  }
  scenario_detail::validate_unique_names(rep);
  return rep;
}

inline RunReport scenario_verify_corollaries(const ScenarioSettings& st,
                                             const ConstantsLock& lock) {
  RunReport rep;
  rep.scenario = "verify-corollaries";
  rep.seed = st.seed;
  {
    const auto f = corpus_field(3.0, st.nx, st.nt);
    const auto chk = scenario_detail::sup_bound_check(
        f, ExponentMode::degenerate, 1.0, st.sigma,
        lock.get("c1_degenerate", 1.0));
    rep.add("corollary.degenerate.p3", chk.measured, chk.bound,
            chk.required_c1, chk.pass);
  }
  {
    const auto f = corpus_field(1.6, st.nx, st.nt);
    const auto chk = scenario_detail::sup_bound_check(
        f, ExponentMode::singular, 1.0, st.sigma, lock.get("c1_singular", 1.0));
    rep.add("corollary.singular.p1.6", chk.measured, chk.bound,
            chk.required_c1, chk.pass);
  }
  {
    // seam: at p = 2 both corollary formulas coincide
    CounterRng rng(st.seed, 23);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int N = rng.uniform() < 0.5 ? 1 : 2;
      const double eps = rng.uniform(0.1, 2.0);
      const double J = std::exp(rng.uniform(-3.0, 6.0));
      const double rho = rng.uniform(0.3, 2.0), th = rng.uniform(0.3, 2.0);
      const double sf = rng.uniform(0.2, 0.8);
      const double C1 = std::exp(rng.uniform(0.0, 4.0));
      const double d = degenerate_bound(J, sf, rho, th, eps, N, 2.0, C1);
      const double sgl = singular_bound(J, sf, rho, th, eps, N, 2.0, C1);
      worst = std::max(worst, std::abs(d - sgl) / std::max(d, sgl));
    }
    rep.add("corollary.seam.p2", worst, 1e-10, 0.0, worst <= 1e-10);
    double worst_identity = 0.0;
    for (int N : {1, 2})
      for (auto mode : {ExponentMode::unified, ExponentMode::degenerate,
                        ExponentMode::singular}) {
        const auto e = choose_exponents(mode, 2.0, N);
        const auto b = bound_constants(N, 2.0, e, 1.0, 1.0);
        worst_identity = std::max(
            worst_identity,
            std::abs(b.sigma * b.level_power - (N + 2.0)) / (N + 2.0));
      }
    rep.add("corollary.seam.exponent_identity", worst_identity, 1e-10, 0.0,
            worst_identity <= 1e-10);
  }
  scenario_detail::validate_unique_names(rep);
  return rep;
}

inline RunReport scenario_verify_covering(const ScenarioSettings& st,
                                          const ConstantsLock& lock,
                                          const std::string& outdir = "") {
  RunReport rep;
  rep.scenario = "verify-covering";
  rep.seed = st.seed;
  {
    bool ok = true;
    for (double eta = 0.1; eta < 0.95; eta += 0.1)
      for (double sg = 0.1; sg < 0.95; sg += 0.1)
        for (double p : {1.5, 2.0, 3.0}) {
          const double c0 = 0.5 * sg * std::min(eta, std::pow(eta, p / 2.0));
          if (!check_inclusion(eta, sg, p, c0)) ok = false;
        }
    rep.add("covering.inclusion.exhaustive", ok ? 0.0 : 1.0, 0.0, 0.0, ok);
  }
  {
    CounterRng rng(st.seed, 29);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      CoveringParams cp = st.covering;
      cp.eta = rng.uniform(0.2, 0.95);
      cp.sigma = rng.uniform(0.2, 0.95);
      cp.p = rng.uniform(1.3, 3.5);
      const auto ch = chain(point1(0, 0), rng.uniform(0.5, 3.0),
                            rng.uniform(1.0, 4.0), cp, 50);
      worst = std::max(worst, ch.identity_residual);
    }
    rep.add("covering.chain.identity", worst, 1e-12, 0.0, worst <= 1e-12);
  }
  {
    // oscillation decay on an exactly affine gradient
    const auto g =
        share(SpaceTimeGrid::make_1d(1.0 / 64, 1.0 / 256, -1, 1, 0, 0.5));
    const auto u = GridFunction::sample(g, [](const Point& z) {
      return z.x[0] * z.x[0];
    });
    const auto grad = discrete_gradient(u);
    const auto r = oscillation_decay(grad, point1(0, 0.25), 0.4, 1.0, 2.0,
                                     st.covering.delta, st.covering.kappa, 6);
    double worst = 1.0;
    for (int i = 0; i < r.usable_levels; ++i) {
      const auto cyl =
          intrinsic_box(point1(0, 0.25), std::pow(0.5, i) * 0.4, 1.0, 2.0);
      const auto nodes = cylinder_nodes(*g, cyl);
      double mean = 0.0;
      for (auto idx : nodes) mean += grad.comp[0][idx];
      mean /= static_cast<double>(nodes.size());
      double var = 0.0;
      for (auto idx : nodes) {
        const double c = grad.comp[0][idx] - mean;
        var += c * c;
      }
      var /= static_cast<double>(nodes.size());
      const double rel = std::abs(r.osc[static_cast<std::size_t>(i)] - var) /
                         std::max(var, 1e-300);
      worst = i == 0 ? rel : std::max(worst, rel);
    }
    rep.add("covering.oscillation.affine_exact", worst, 1e-10, 0.0,
            r.usable_levels >= 3 && worst <= 1e-10);
  }
  {
    // consequences stay stable across two refinements of the grid.  The probe
    // point is off-center so the measured constants carry genuine signal, and
    // the switching scale is frozen from the coarse run so the comparison
    // isolates the consequence machinery itself.
    const auto f_coarse = corpus_field(2.0, 96, 192);
    const Point z0 = point1(0.3, f_coarse.center.t);
    const double mu0 = std::max(1.0, f_coarse.grad_mag.max_value());
    const double S = fix_scale(mu0, 2.0, 0.15);
    const auto ch = chain(z0, S, mu0, st.covering, 12);
    const auto sw =
        switching_radius(f_coarse.grad_mag, ch, st.covering.nu, 0.0);
    auto consequences_on = [&](const CorpusField& f) {
      return cauchy_consequences(f.grad, z0, sw.R_n0, sw.mu_n0, ch.S, ch.mu0,
                                 2.0, st.covering.delta, st.covering.kappa,
                                 st.covering.alpha3());
    };
    if (!outdir.empty()) write_chain_csv(outdir + "/chain.csv", ch, sw);
    const auto c1 = consequences_on(f_coarse);
    const auto c2 = consequences_on(corpus_field(2.0, 192, 384));
    const auto c3 = consequences_on(corpus_field(2.0, 384, 768));
    auto stable = [](double a, double b) {
      if (a == 0.0 && b == 0.0) return true;
      const double lo = std::min(a, b), hi = std::max(a, b);
      return lo > 0.0 && hi <= 2.0 * lo;
    };
    const bool ok = stable(c1.c_scale, c2.c_scale) &&
                    stable(c2.c_scale, c3.c_scale) &&
                    stable(c1.c_mean_osc, c2.c_mean_osc) &&
                    stable(c2.c_mean_osc, c3.c_mean_osc) &&
                    std::isfinite(c1.c_nodal) && std::isfinite(c2.c_nodal) &&
                    std::isfinite(c3.c_nodal);
    rep.add("covering.consequences.stable", c1.c_scale, c3.c_scale,
            std::max({c1.c_scale, c2.c_scale, c3.c_scale}), ok);
  }
  {
    // manufactured lower-bound trials and the mirror symmetry
    CounterRng rng(st.seed, 31);
    const auto g = scenario_detail::unit_grid(49);
    const double nu_deriv = lock.get("nu_deriv", 0.2);
    bool all_ok = true, mirror_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
      const auto mf = manufactured_ring_field(g, rng);
      const auto r = derivative_degiorgi(mf.w, mf.mu, mf.A, nu_deriv);
      if (!(r.hypothesis_met && r.converged && r.conclusion_holds))
        all_ok = false;
      const auto a =
          derivative_degiorgi(mf.w.map([](double x) { return -x; }), mf.mu,
                              mf.A, nu_deriv);
      const auto b = dual_derivative_degiorgi(mf.w, mf.mu, mf.A, nu_deriv);
      if (a.converged != b.converged || a.A_measure != b.A_measure)
        mirror_ok = false;
    }
    rep.add("covering.derivative_iteration.trials", all_ok ? 1.0 : 0.0, 1.0,
            lock.get("c_deriv_recursion", 0.0), all_ok);
    rep.add("covering.derivative_iteration.mirror", mirror_ok ? 1.0 : 0.0, 1.0,
            0.0, mirror_ok);
  }
  {
    // frozen-coefficient linear runs feed the imported decay spot-check
    CounterRng rng(st.seed, 41);
    const double h = 2.0 / 64;
    const auto g =
        share(SpaceTimeGrid::make_1d(h, 2.0 / 32768, -1, 1, -1, 1));
    const double ellipticity = 2.0;
    double worst_harnack = 0.0, worst_decay = 0.0;
    bool all_ok = true;
    for (int trial = 0; trial < 3; ++trial) {
      MatrixField B;
      B.grid = g;
      for (int i = 0; i < g->nx(0); ++i) {
        Mat m;
        m.dim = 1;
        m.m[0][0] = rng.uniform(1.0 / ellipticity, ellipticity);
        B.m.push_back(m);
      }
      Slice s(static_cast<std::size_t>(g->spatial_nodes()));
      for (int i = 0; i + 1 < g->nx(0); ++i)
        s[static_cast<std::size_t>(i)] =
            std::sin((trial + 1) * M_PI * g->x(0, i)) +
            0.3 * rng.uniform(-1.0, 1.0);
      s[s.size() - 1] = s[0];
      GridFunction v(g);
      for (int i = 0; i < g->nx(0); ++i) v.at(0, i) = s[static_cast<std::size_t>(i)];
      for (int it = 1; it < g->nt(); ++it) {
        s = step_linear(s, *g, B);
        for (int i = 0; i < g->nx(0); ++i)
          v.at(it, i) = s[static_cast<std::size_t>(i)];
      }
      const auto ld = linear_decay_check(B, v, st.covering.delta, 2.0,
                                         ellipticity);
      if (ld.vacuous || ld.decay_ratio >= 1.0 || ld.harnack_ratio > 50.0)
        all_ok = false;
      worst_harnack = std::max(worst_harnack, ld.harnack_ratio);
      worst_decay = std::max(worst_decay, ld.decay_ratio);
    }
    rep.add("covering.linear_decay", worst_decay, 1.0, worst_harnack, all_ok);
  }
  {
    // second-alternative pipeline on the manufactured family; the family is
    // built to satisfy the two-sided density hypothesis at this threshold
    CounterRng rng(st.seed, 37);
    const auto g = scenario_detail::unit_grid(65);
    const double nu = 0.2;
    bool ok = true;
    for (int trial = 0; trial < 5; ++trial) {
      const auto mf = manufactured_alt2_field(g, rng);
      const auto ts = good_time_slice(mf.w, nu, mf.A);
      if (!ts.found || !(ts.t_star > -1.0 && ts.t_star < -nu / 2.0)) {
        ok = false;
        continue;
      }
      const auto eop = expansion_of_positivity(mf.w, nu, mf.A, ts.t_star);
      if (!eop.found || !(eop.eta0 < nu)) {
        ok = false;
        continue;
      }
      const double c_final = lock.get("c_final_recursion", 2.0);
      const double delta_target =
          final_degiorgi_threshold(std::max(c_final, 1.01), g->dim()) /
          (static_cast<double>(detail::unit_cylinder_nodes(*g, 1.0).size()) *
           g->cell_volume());
      const auto ls = levelset_shrink(mf.w, ts.t_star, eop.eta0, nu,
                                      std::max(delta_target, 1e-9));
      if (!ls.found) {
        ok = false;
        continue;
      }
      const auto fd = final_degiorgi(mf.w, ls.j_delta);
      if (!fd.converged || !fd.zero_measure_verified) ok = false;
    }
    rep.add("covering.alternative_pipeline", ok ? 1.0 : 0.0, 1.0, 0.0, ok);
  }
  scenario_detail::validate_unique_names(rep);
  return rep;
}

inline RunReport scenario_verify_holder(const ScenarioSettings& st,
                                        const ConstantsLock& lock,
                                        const std::string& outdir = "") {
  RunReport rep;
  rep.scenario = "verify-holder";
  rep.seed = st.seed;
  (void)lock;
  for (double p : std::vector<double>{1.6, 2.0, 3.0}) {
    const auto f = corpus_field(p, 2 * st.nx, 8 * st.nt);
    CoveringParams cp = st.covering;
    cp.p = p;
    cp.N = f.u.grid().dim();
    cp.s = f.params.s;
    const double mu0 = std::max(1.0, f.grad_mag.max_value());
    const double R0 = 0.35 * f.rho;
    const double S = fix_scale(mu0, p, R0);
    const auto cert = holder_certificate(f.grad, f.grad_mag, f.center, R0, S,
                                         mu0, cp, 16, st.seed);
    const bool ok = cert.alpha_fit >= 0.1 && std::isfinite(cert.worst_C) &&
                    cert.far_bound_holds;
    rep.add("holder.certificate.p" + std::to_string(p), cert.alpha_fit, 0.1,
            cert.worst_C, ok,
            "excluded=" + std::to_string(cert.excluded_pairs));
    if (!outdir.empty())
      write_certificate_json(
          outdir + "/certificate_p" + std::to_string(p) + ".json", cert);
  }
  scenario_detail::validate_unique_names(rep);
  return rep;
}

// solve: one deterministic solver run with artifacts on disk
inline RunReport scenario_solve(const ConfigFile& cfg, const ScenarioSettings& st,
                                const std::string& outdir) {
  RunReport rep;
  rep.scenario = "solve";
  rep.seed = st.seed;

  const int dim = static_cast<int>(cfg.get_int("grid.dim", 1));
  const double h = cfg.get_double("grid.h", 1.0 / 32);
  const double dt = cfg.get_double("grid.dt", 1e-4);
  const double x_lo = cfg.get_double("grid.x_lo", -1.0);
  const double x_hi = cfg.get_double("grid.x_hi", 1.0);
  const double y_lo = cfg.get_double("grid.y_lo", -1.0);
  const double y_hi = cfg.get_double("grid.y_hi", 1.0);
  const double t_lo = cfg.get_double("grid.t_lo", 0.0);
  const double t_hi = cfg.get_double("grid.t_hi", 0.01);
  auto grid = share(dim == 1
                        ? SpaceTimeGrid::make_1d(h, dt, x_lo, x_hi, t_lo, t_hi)
                        : SpaceTimeGrid::make_2d(h, dt, x_lo, x_hi, y_lo, y_hi,
                                                 t_lo, t_hi));
  FluxParams fp{cfg.get_double("flux.p", 2.0), cfg.get_double("flux.s", 0.0),
                cfg.get_double("flux.c0", 1.0), cfg.get_double("flux.c1", 2.0)};
  try {
    fp.validate_for_stepping(dim);
  } catch (const std::invalid_argument& e) {
    throw PreconditionError(e.what());
  }
  SolveConfig sc;
  const auto scheme = cfg.get_string("solve.scheme", "explicit");
  if (scheme == "semi-implicit") sc.scheme = Scheme::semi_implicit;
  else if (scheme != "explicit") throw ConfigError("solve: unknown scheme");
  sc.cfl_safety = cfg.get_double("solve.cfl_safety", 0.5);
  const auto bnd = cfg.get_string("solve.boundary", "periodic");
  const auto initial = cfg.get_string("solve.initial", "gauss");
  std::function<double(const Point&)> init;
  if (initial == "gauss")
    init = [](const Point& z) {
      double r2 = 0.0;
      for (int d = 0; d < z.dim; ++d) r2 += z.x[static_cast<std::size_t>(d)] * z.x[static_cast<std::size_t>(d)];
      return std::exp(-8.0 * r2);
    };
  else if (initial == "heat-kernel")
    init = [dim](const Point& z) { return heat_kernel(z, dim); };
  else if (initial == "barenblatt") {
    Barenblatt bb(fp.p, dim, cfg.get_double("solve.mass", 1.0));
    init = [bb](const Point& z) { return bb(z); };
  } else {
    throw ConfigError("solve: unknown initial profile");
  }
  if (bnd == "periodic") {
    sc.boundary = BoundaryKind::periodic;
  } else if (bnd == "oracle") {
    sc.boundary = BoundaryKind::dirichlet_oracle;
    sc.boundary_values = init;
  } else {
    throw ConfigError("solve: unknown boundary kind");
  }

  const auto t_start = std::chrono::steady_clock::now();
  const auto res = solve(grid, init, fp, sc);
  const auto t_end = std::chrono::steady_clock::now();

  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  write_field(outdir + "/u.field", res.u);
  write_field_csv(outdir + "/u.csv", res.u);
  nlohmann::json manifest;
  manifest["p"] = fp.p;
  manifest["s"] = fp.s;
  manifest["c0"] = fp.C0;
  manifest["c1"] = fp.C1;
  manifest["scheme"] = scheme;
  manifest["boundary"] = bnd;
  manifest["dim"] = dim;
  manifest["h"] = h;
  manifest["dt"] = dt;
  manifest["steps"] = res.steps;
  manifest["cfl_margin"] = res.min_cfl_margin;
  manifest["max_picard_iterations"] = res.max_picard_iterations;
  manifest["config_digest"] = cfg.digest();
  manifest["wall_ms"] =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();
  std::ofstream(outdir + "/manifest.json") << manifest.dump(2) << '\n';

  rep.add("solve.completed", static_cast<double>(res.steps),
          static_cast<double>(grid->nt() - 1), res.min_cfl_margin,
          res.steps == grid->nt() - 1);
  return rep;
}

}  // namespace plreg
