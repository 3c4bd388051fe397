#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "plreg/core/rng.hpp"

namespace plreg {

// Small dense spatial vector / symmetric matrix, dims 1 and 2.
struct Vec {
  int dim = 1;
  std::array<double, 2> v{0.0, 0.0};

  double norm_sq() const {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += v[static_cast<std::size_t>(d)] * v[static_cast<std::size_t>(d)];
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline Vec vec1(double x) { return Vec{1, {x, 0.0}}; }
inline Vec vec2(double x, double y) { return Vec{2, {x, y}}; }

struct Mat {
  int dim = 1;
  std::array<std::array<double, 2>, 2> m{{{0, 0}, {0, 0}}};

  Vec apply(const Vec& x) const {
    Vec y;
    y.dim = dim;
    for (int i = 0; i < dim; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim; ++j)
        s += m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
             x.v[static_cast<std::size_t>(j)];
      y.v[static_cast<std::size_t>(i)] = s;
    }
    return y;
  }
};

// spectral norm of a symmetric 1x1 / 2x2 matrix
inline double spectral_norm_sym(const Mat& a) {
  if (a.dim == 1) return std::abs(a.m[0][0]);
  const double tr = a.m[0][0] + a.m[1][1];
  const double det = a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0];
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return std::max(std::abs(tr / 2.0 + disc), std::abs(tr / 2.0 - disc));
}

inline double min_eig_sym(const Mat& a) {
  if (a.dim == 1) return a.m[0][0];
  const double tr = a.m[0][0] + a.m[1][1];
  const double det = a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0];
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 - disc;
}

// Regularized p-flux A(zeta) = (|zeta|^2 + s^2)^((p-2)/2) zeta with ellipticity
// window [C0, C1].
struct FluxParams {
  double p = 2.0;
  double s = 0.0;
  double C0 = 1.0;
  double C1 = 1.0;

  void validate() const {
    if (p <= 1.0) throw std::invalid_argument("FluxParams: p must exceed 1");
    if (s < 0.0 || s > 1.0)
      throw std::invalid_argument("FluxParams: s must lie in [0,1]");
    if (!(C0 > 0.0) || C0 > C1)
      throw std::invalid_argument("FluxParams: need 0 < C0 <= C1");
  }

  // admissible exponent window for time stepping in N spatial dimensions
  void validate_for_stepping(int N) const {
    validate();
    if (p <= 2.0 * N / (N + 2.0))
      throw std::invalid_argument("FluxParams: p must exceed 2N/(N+2)");
  }

  double diffusivity(double grad_sq) const {
    const double base = grad_sq + s * s;
    if (base == 0.0) return p >= 2.0 ? (p == 2.0 ? 1.0 : 0.0) : 0.0;
    return std::pow(base, (p - 2.0) / 2.0);
  }
};

inline Vec flux(const Vec& zeta, const FluxParams& fp) {
  if (fp.p <= 1.0) throw std::invalid_argument("flux: p must exceed 1");
  const double base = zeta.norm_sq() + fp.s * fp.s;
  Vec out;
  out.dim = zeta.dim;
  if (base == 0.0) return out;  // continuous limit at the singular origin
  const double m = std::pow(base, (fp.p - 2.0) / 2.0);
  for (int d = 0; d < zeta.dim; ++d)
    out.v[static_cast<std::size_t>(d)] = m * zeta.v[static_cast<std::size_t>(d)];
  return out;
}

// (|z|^2+s^2)^((p-2)/2) [ I + (p-2) z z^T / (|z|^2+s^2) ]
inline Mat flux_jacobian(const Vec& zeta, const FluxParams& fp) {
  const double base = zeta.norm_sq() + fp.s * fp.s;
  Mat out;
  out.dim = zeta.dim;
  if (base == 0.0) {
    if (fp.p < 2.0)
      throw std::domain_error("flux_jacobian: undefined at the singular point");
    for (int d = 0; d < zeta.dim; ++d)
      out.m[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)] =
          fp.p == 2.0 ? 1.0 : 0.0;
    return out;
  }
  const double m = std::pow(base, (fp.p - 2.0) / 2.0);
  for (int i = 0; i < zeta.dim; ++i)
    for (int j = i; j < zeta.dim; ++j) {
      double e = (i == j) ? 1.0 : 0.0;
      e += (fp.p - 2.0) * zeta.v[static_cast<std::size_t>(i)] *
           zeta.v[static_cast<std::size_t>(j)] / base;
      out.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m * e;
      out.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = m * e;
    }
  return out;
}

struct StructureReport {
  double worst_upper_ratio = 0.0;  // max of lhs/rhs of the growth bound
  double worst_lower_ratio = 0.0;  // min of lhs/rhs of the ellipticity bound
  int samples = 0;
  bool pass = false;
};

// Samples (zeta, eta) pairs and evaluates both structure conditions:
//   |A(z)| + |A'(z)| (|z|^2+s^2)^(1/2)  <=  C1 (|z|^2+s^2)^((p-1)/2)
//   <A'(z) eta, eta>                    >=  C0 (|z|^2+s^2)^((p-2)/2) |eta|^2
inline StructureReport verify_structure(const FluxParams& fp, int sample_count,
                                        int dim = 2,
                                        std::uint64_t seed = 0x5eed) {
  if (sample_count < 1)
    throw std::invalid_argument("verify_structure: need at least one sample");
  fp.validate();
  CounterRng rng(seed, 17);
  StructureReport rep;
  rep.worst_lower_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sample_count; ++k) {
    Vec zeta, eta;
    zeta.dim = eta.dim = dim;
    // log-uniform magnitudes cover several decades around 1
    const double mag = std::exp(rng.uniform(-8.0, 2.0));
    double zn = 0.0, en = 0.0;
    for (int d = 0; d < dim; ++d) {
      zeta.v[static_cast<std::size_t>(d)] = rng.uniform(-1.0, 1.0);
      eta.v[static_cast<std::size_t>(d)] = rng.uniform(-1.0, 1.0);
      zn += zeta.v[static_cast<std::size_t>(d)] * zeta.v[static_cast<std::size_t>(d)];
      en += eta.v[static_cast<std::size_t>(d)] * eta.v[static_cast<std::size_t>(d)];
    }
    if (zn == 0.0 || en == 0.0) continue;
    for (int d = 0; d < dim; ++d)
      zeta.v[static_cast<std::size_t>(d)] *= mag / std::sqrt(zn);
    const double base = zeta.norm_sq() + fp.s * fp.s;
    if (base == 0.0) continue;
    const Mat jac = flux_jacobian(zeta, fp);
    const double sq = std::sqrt(base);

    const double upper_lhs = flux(zeta, fp).norm() + spectral_norm_sym(jac) * sq;
    const double upper_rhs = fp.C1 * std::pow(base, (fp.p - 1.0) / 2.0);
    rep.worst_upper_ratio = std::max(rep.worst_upper_ratio, upper_lhs / upper_rhs);

    const Vec je = jac.apply(eta);
    double dot = 0.0;
    for (int d = 0; d < dim; ++d)
      dot += je.v[static_cast<std::size_t>(d)] * eta.v[static_cast<std::size_t>(d)];
    const double lower_rhs =
        fp.C0 * std::pow(base, (fp.p - 2.0) / 2.0) * en;
    rep.worst_lower_ratio = std::min(rep.worst_lower_ratio, dot / lower_rhs);
    ++rep.samples;
  }
  rep.pass = rep.worst_upper_ratio <= 1.0 + 1e-12 &&
             rep.worst_lower_ratio >= 1.0 - 1e-12;
  return rep;
}

}  // namespace plreg
