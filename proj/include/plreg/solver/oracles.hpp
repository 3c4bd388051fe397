#pragma once

#include <cmath>
#include <stdexcept>

#include "plreg/mesh/grid.hpp"

namespace plreg {

// Gaussian fundamental solution of the heat equation.
inline double heat_kernel(const Point& z, int dim) {
  if (z.t <= 0.0) throw std::invalid_argument("heat_kernel: time must be positive");
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) r2 += z.x[static_cast<std::size_t>(d)] * z.x[static_cast<std::size_t>(d)];
  return std::pow(4.0 * M_PI * z.t, -dim / 2.0) * std::exp(-r2 / (4.0 * z.t));
}

// Compactly supported self-similar source solution of u_t = div(|grad u|^{p-2} grad u),
// p > 2.  The profile constant is fixed by the conserved mass; the closed form is
// validated in-repo against the weak-form residual under refinement.
class Barenblatt {
 public:
  Barenblatt(double p, int dim, double mass) : p_(p), dim_(dim) {
    if (p <= 2.0) throw std::invalid_argument("Barenblatt: requires p > 2");
    if (mass <= 0.0) throw std::invalid_argument("Barenblatt: mass must be positive");
    const double N = dim;
    alpha_ = N / (N * (p - 2.0) + p);
    kappa_ = (p - 2.0) / p * std::pow(alpha_ / N, 1.0 / (p - 1.0));
    q_ = p / (p - 1.0);
    m_ = (p - 1.0) / (p - 2.0);
    const double sigma_n = (dim == 1) ? 2.0 : 2.0 * M_PI;
    const double nq = N / q_;  // = N (p-1)/p
    const double shape =
        sigma_n * std::pow(kappa_, -nq) / q_ * std::beta(nq, m_ + 1.0);
    profile_c_ = std::pow(mass / shape, 1.0 / (m_ + nq));
  }

  double operator()(const Point& z) const {
    if (z.t <= 0.0)
      throw std::invalid_argument("Barenblatt: time must be positive");
    double r = 0.0;
    for (int d = 0; d < dim_; ++d)
      r += z.x[static_cast<std::size_t>(d)] * z.x[static_cast<std::size_t>(d)];
    r = std::sqrt(r);
    const double tb = std::pow(z.t, alpha_ / dim_);
    const double arg = profile_c_ - kappa_ * std::pow(r / tb, q_);
    if (arg <= 0.0) return 0.0;
    return std::pow(z.t, -alpha_) * std::pow(arg, m_);
  }

  // radius of the free boundary at time t
  double support_radius(double t) const {
    return std::pow(profile_c_ / kappa_, 1.0 / q_) * std::pow(t, alpha_ / dim_);
  }

  double profile_constant() const { return profile_c_; }

 private:
  double p_;
  int dim_;
  double alpha_, kappa_, q_, m_, profile_c_;
};

inline double barenblatt(const Point& z, double p, int dim, double mass) {
  return Barenblatt(p, dim, mass)(z);
}

}  // namespace plreg
