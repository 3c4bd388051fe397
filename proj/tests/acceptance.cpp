// Acceptance suite: runs every top-level criterion at its stated tolerance
// and prints one pass/fail line per criterion.  Exit status is zero only if
// all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "plreg/covering/holder.hpp"
#include "plreg/scenarios/scenarios.hpp"

using namespace plreg;

namespace {

struct Criterion {
  std::string id;
  std::string summary;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

std::vector<Criterion> g_results;

template <class Fn>
void run_criterion(const std::string& id, const std::string& summary,
                   const Fn& fn) {
  Criterion c;
  c.id = id;
  c.summary = summary;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.pass = fn(c.detail);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  c.seconds = std::chrono::duration<double>(t1 - t0).count();
  std::printf("[%s] %-3s %-38s (%6.2f s)  %s\n", c.pass ? "PASS" : "FAIL",
              c.id.c_str(), c.summary.c_str(), c.seconds, c.detail.c_str());
  std::fflush(stdout);
  g_results.push_back(std::move(c));
}

bool find_check(const RunReport& rep, const std::string& name,
                CheckRecord& out) {
  for (const auto& c : rep.checks)
    if (c.name == name) {
      out = c;
      return true;
    }
  return false;
}

// L-infinity error against a closed-form solution on the interior cylinder
// B_r x [t_mid, t_hi]
template <class Exact>
double interior_linf(const SolveResult& res, const Exact& exact, double r) {
  const auto& g = res.u.grid();
  double err = 0.0;
  for (int it = g.nt() / 2; it < g.nt(); ++it)
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
      for (int ix = 0; ix < g.nx(0); ++ix) {
        const auto z = g.node_point(g.index(it, ix, iy));
        Point axis;
        axis.dim = z.dim;
        axis.t = z.t;
        if (spatial_distance(z, axis) >= r) continue;
        err = std::max(err, std::abs(res.u[g.index(it, ix, iy)] - exact(z)));
      }
  return err;
}

double convergence_order(double p, int dim, const std::vector<double>& hs,
                         std::string& detail) {
  const bool heat = p == 2.0;
  std::vector<double> errs;
  for (double h : hs) {
    const double t0 = heat ? 0.25 : 0.5;
    const double T = dim == 1 ? 0.1 : 0.04;
    const double lam = heat ? 1.0 : 4.0;
    const double dt_t = 0.2 * h * h / (2.0 * dim * lam);
    const int ns = static_cast<int>(std::ceil(T / dt_t));
    const double dt = T / ns;
    const double xext = heat ? 1.0 : (dim == 1 ? 1.5 : 1.25);
    auto g = share(dim == 1
                       ? SpaceTimeGrid::make_1d(h, dt, -xext, xext, t0, t0 + T)
                       : SpaceTimeGrid::make_2d(h, dt, -xext, xext, -xext,
                                                xext, t0, t0 + T));
    FluxParams fp{p, 0.0, std::min(1.0, p - 1.0), 2.0 * std::max(1.0, p - 1.0)};
    SolveConfig cfg;
    cfg.boundary = BoundaryKind::dirichlet_oracle;
    Barenblatt bb(heat ? 3.0 : p, dim, 1.0);
    auto exact = [&](const Point& z) {
      return heat ? heat_kernel(z, dim) : bb(z);
    };
    cfg.boundary_values = exact;
    const auto res = solve(g, exact, fp, cfg);
    errs.push_back(interior_linf(res, exact, 0.8 * xext));
  }
  double worst_order = 1e9;
  std::ostringstream os;
  for (std::size_t i = 1; i < errs.size(); ++i)
    worst_order = std::min(worst_order, std::log2(errs[i - 1] / errs[i]));
  os << "p" << p << "/" << dim << "d order " << worst_order << "; ";
  detail += os.str();
  return worst_order;
}

}  // namespace

int main() {
  ScenarioSettings st;
  st.seed = 42;
  const auto lock = run_calibrate(st);

  run_criterion("C1", "fast geometric convergence lemma", [&](std::string& d) {
    const auto ok = fast_geometric(2.0, 4.0, 1.0, 0.125, 40);
    const auto bad = fast_geometric(2.0, 4.0, 1.0, 1.25, 40);
    d = "threshold " + std::to_string(ok.threshold) + ", X40 " +
        std::to_string(ok.sequence.back());
    return ok.threshold == 0.125 && ok.converged &&
           ok.sequence.back() < 1e-12 &&
           (bad.overflowed || bad.sequence.back() > 1e6);
  });

  run_criterion("C2", "bounded backward recursion lemma", [&](std::string& d) {
    const double bound = bounded_recursive(2.0, 4.0, 0.5);
    if (std::abs(bound - 256.0) > 1e-12) return false;
    CounterRng rng(st.seed, 11);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      double y = rng.uniform(0.0, 1e6);
      for (int n = 59; n >= 0; --n)
        y = rng.uniform() * 2.0 * std::pow(4.0, n) * std::pow(y, 0.5);
      worst = std::max(worst, y);
      if (y > bound * (1 + 1e-12)) return false;
    }
    d = "bound 256, worst generated head " + std::to_string(worst);
    return true;
  });

  run_criterion("C3", "exact truncation inequalities", [&](std::string& d) {
    const auto rep = scenario_verify_lemmas(st);
    CheckRecord cheb, remark;
    if (!find_check(rep, "levelset.chebyshev.exact", cheb) ||
        !find_check(rep, "levelset.dyadic_comparison.exact", remark))
      return false;
    d = "1000 random 16^3 fields each, zero tolerance";
    return cheb.pass && remark.pass;
  });

  run_criterion("C4", "solver convergence to closed forms", [&](std::string& d) {
    const double o1 = convergence_order(2.0, 1, {1.0 / 32, 1.0 / 64, 1.0 / 128}, d);
    const double o2 = convergence_order(3.0, 1, {1.0 / 32, 1.0 / 64, 1.0 / 128}, d);
    const double o3 = convergence_order(2.0, 2, {1.0 / 16, 1.0 / 32, 1.0 / 64}, d);
    const double o4 = convergence_order(3.0, 2, {1.0 / 16, 1.0 / 32, 1.0 / 64}, d);
    return o1 >= 1.0 && o2 >= 1.0 && o3 >= 0.8 && o4 >= 0.8;
  });

  run_criterion("C5", "structure conditions of the flux", [&](std::string& d) {
    double worst_lower = 1.0;
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      FluxParams fp{p, 0.1, std::min(1.0, p - 1.0),
                    2.0 * std::max(1.0, p - 1.0)};
      const auto repq = verify_structure(fp, 10000, 2, st.seed);
      worst_lower = std::min(worst_lower, repq.worst_lower_ratio);
      if (!repq.pass) return false;
    }
    d = "worst lower ratio " + std::to_string(worst_lower);
    return worst_lower >= 1.0 - 1e-12;
  });

  run_criterion("C6", "one energy constant across regimes", [&](std::string& d) {
    const auto rep = scenario_verify_energy(st);
    CheckRecord spread;
    if (!find_check(rep, "energy.unified_spread", spread)) return false;
    d = "max/min = " + std::to_string(spread.empirical_c);
    return spread.pass;
  });

  run_criterion("C7", "quantitative gradient bounds end to end",
                [&](std::string& d) {
    const auto lip = scenario_verify_lipschitz(st, lock);
    const auto cor = scenario_verify_corollaries(st, lock);
    CheckRecord seam;
    if (!find_check(cor, "corollary.seam.p2", seam)) return false;
    d = "seam residual " + std::to_string(seam.lhs);
    return lip.aggregate_pass() && cor.aggregate_pass();
  });

  run_criterion("C8", "covering geometry", [&](std::string& d) {
    const auto rep = scenario_verify_covering(st, lock);
    CheckRecord incl, ident;
    if (!find_check(rep, "covering.inclusion.exhaustive", incl) ||
        !find_check(rep, "covering.chain.identity", ident))
      return false;
    d = "identity residual " + std::to_string(ident.lhs);
    return incl.pass && ident.pass;
  });

  run_criterion("C9", "decay consequences at the switch", [&](std::string& d) {
    const auto rep = scenario_verify_covering(st, lock);
    CheckRecord osc, cons;
    if (!find_check(rep, "covering.oscillation.affine_exact", osc) ||
        !find_check(rep, "covering.consequences.stable", cons))
      return false;
    d = "affine residual " + std::to_string(osc.lhs) + ", constants " +
        std::to_string(cons.lhs) + " vs " + std::to_string(cons.rhs);
    return osc.pass && cons.pass;
  });

  run_criterion("C10", "two-point gradient certificate", [&](std::string& d) {
    const auto rep = scenario_verify_holder(st, lock);
    if (!rep.aggregate_pass()) return false;
    double min_alpha = 1e9;
    for (const auto& c : rep.checks) min_alpha = std::min(min_alpha, c.lhs);
    // additionally exercise the far branch on a steep degenerate-range field
    const auto g = share(SpaceTimeGrid::make_1d(1.0 / 64, 1.0 / 1024, -1, 1,
                                                0.25, 0.5));
    const auto u = GridFunction::sample(g, [](const Point& z) {
      return 6.0 * std::sin(2.0 * z.x[0]);
    });
    const auto grad = discrete_gradient(u);
    const auto gm = gradient_magnitude(grad);
    CoveringParams cp;
    cp.p = 3.0;
    const double mu0 = std::max(1.0, gm.max_value());
    const auto cert = holder_certificate(grad, gm, point1(0.0, 0.375), 0.1,
                                         fix_scale(mu0, 3.0, 0.1), mu0, cp, 16,
                                         st.seed);
    int far_count = 0;
    for (const auto& [key, tab] : cert.cases)
      if (key / 3 == static_cast<int>(PairClass::far_pair))
        far_count += tab.count;
    d = "min fitted exponent " + std::to_string(min_alpha) + ", far pairs " +
        std::to_string(far_count);
    return min_alpha >= 0.1 && far_count > 0 && cert.far_bound_holds;
  });

  run_criterion("C11", "derivative lower-bound iteration", [&](std::string& d) {
    const auto rep = scenario_verify_covering(st, lock);
    CheckRecord trials, mirror;
    if (!find_check(rep, "covering.derivative_iteration.trials", trials) ||
        !find_check(rep, "covering.derivative_iteration.mirror", mirror))
      return false;
    d = "100 trials at calibrated threshold " +
        std::to_string(lock.get("nu_deriv", 0.0));
    return trials.pass && mirror.pass;
  });

  run_criterion("C12", "second-alternative pipeline", [&](std::string& d) {
    CounterRng rng(st.seed, 37);
    const auto g = scenario_detail::unit_grid(65);
    const double nu = 0.2;
    for (int trial = 0; trial < 5; ++trial) {
      const auto mf = manufactured_alt2_field(g, rng);
      const auto ts = good_time_slice(mf.w, nu, mf.A);
      if (!ts.found || !(ts.t_star > -1.0 && ts.t_star < -nu / 2.0)) {
        d = "no good slice in trial " + std::to_string(trial);
        return false;
      }
      const auto eop = expansion_of_positivity(mf.w, nu, mf.A, ts.t_star);
      if (!eop.found || !(eop.eta0 < nu)) {
        d = "no admissible level margin in trial " + std::to_string(trial);
        return false;
      }
      const double q1 = static_cast<double>(
                            detail::unit_cylinder_nodes(*g, 1.0).size()) *
                        g->cell_volume();
      const double c_final = std::max(lock.get("c_final_recursion", 2.0), 1.01);
      const double delta_target = std::max(
          final_degiorgi_threshold(c_final, g->dim()) / q1, 1e-9);
      const auto ls = levelset_shrink(mf.w, ts.t_star, eop.eta0, nu,
                                      delta_target, 5);
      if (!ls.found) {
        d = "level-set shrinking exhausted in trial " + std::to_string(trial);
        return false;
      }
      // the chosen level must not depend on which window endpoints we sample
      const auto ls3 = levelset_shrink(mf.w, ts.t_star, eop.eta0, nu,
                                       delta_target, 3);
      const auto ls7 = levelset_shrink(mf.w, ts.t_star, eop.eta0, nu,
                                       delta_target, 7);
      if (ls3.j_delta != ls.j_delta || ls7.j_delta != ls.j_delta) {
        d = "level depends on the endpoint sample";
        return false;
      }
      const auto fd = final_degiorgi(mf.w, ls.j_delta);
      if (!fd.converged || !fd.zero_measure_verified) {
        d = "terminal iteration failed in trial " + std::to_string(trial);
        return false;
      }
      if (trial == 0)
        d = "t*=" + std::to_string(ts.t_star) + " level margin " +
            std::to_string(eop.eta0) + " j=" + std::to_string(ls.j_delta);
    }
    return true;
  });

  int failures = 0;
  for (const auto& c : g_results) failures += c.pass ? 0 : 1;
  std::printf("%zu/%zu criteria passed\n", g_results.size() - failures,
              g_results.size());
  return failures == 0 ? 0 : 1;
}
