#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "plreg/mesh/cylinder.hpp"
#include "plreg/mesh/grid.hpp"

namespace plreg {

enum class TruncSign { plus, minus };

// nodewise (v - k)_+ or (v - k)_-
inline GridFunction truncate(const GridFunction& v, double k, TruncSign sign) {
  return v.map([k, sign](double x) {
    return sign == TruncSign::plus ? std::max(x - k, 0.0) : std::max(k - x, 0.0);
  });
}

// dyadic truncation levels k_n = k - k/2^n
inline double level_at(double k, int n) {
  return k - k / std::pow(2.0, n);
}

struct LevelSetStats {
  double level = 0.0;
  double measure_above = 0.0;            // |{v >= k}  cap Q|
  std::vector<double> exponents;
  std::vector<double> truncated_integrals;  // integral of (v-k)_+^q over Q
};

inline LevelSetStats levelset_stats(const GridFunction& v, double k,
                                    const ParabolicCylinder& cyl,
                                    const std::vector<double>& qs) {
  const auto nodes = cylinder_nodes(v.grid(), cyl);
  LevelSetStats st;
  st.level = k;
  st.exponents = qs;
  double count = 0.0;
  for (auto i : nodes) count += (v[i] >= k) ? 1.0 : 0.0;
  st.measure_above = count * v.grid().cell_volume();
  for (double q : qs)
    st.truncated_integrals.push_back(integrate_nodes(
        v.grid(), nodes,
        [&](std::int64_t i) { return std::pow(std::max(v[i] - k, 0.0), q); }));
  return st;
}

struct ChebyshevCheck {
  double lhs = 0.0;  // |{v >= k_next} cap Q|
  double rhs = 0.0;  // k^{-q} * integral of (v-k)_+^q
  bool holds = false;
};

// |{v >= k_next}| <= k^{-q} integral (v - k)_+^q.  Exact whenever the level
// spacing satisfies k_next - k >= k, since (v - k)_+ >= k on the superlevel
// set; callers pick levels inside that window.
inline ChebyshevCheck chebyshev_check(const GridFunction& v, double k,
                                      double k_next, double q,
                                      const ParabolicCylinder& cyl) {
  if (!(k > 0.0) || k > k_next)
    throw std::invalid_argument("chebyshev_check: need 0 < k <= k_next");
  if (!(q > 0.0)) throw std::invalid_argument("chebyshev_check: need q > 0");
  const auto nodes = cylinder_nodes(v.grid(), cyl);
  ChebyshevCheck out;
  double count = 0.0;
  for (auto i : nodes) count += (v[i] >= k_next) ? 1.0 : 0.0;
  out.lhs = count * v.grid().cell_volume();
  out.rhs = integrate_nodes(v.grid(), nodes, [&](std::int64_t i) {
              return std::pow(std::max(v[i] - k, 0.0), q);
            }) / std::pow(k, q);
  out.holds = out.lhs <= out.rhs;
  return out;
}

struct DyadicComparison {
  double lhs = 0.0;    // integral of (v - k_n)_+^delta
  double rhs = 0.0;    // (2^{n+1}-1)^{-delta} * integral of v^delta over {v >= k_{n+1}}
  double ratio = 0.0;  // lhs / rhs, 0 when vacuous
  bool holds = false;
};

// On {v >= k_{n+1}} one has v - k_n >= v / (2^{n+1} - 1), which is the factor
// 1 - (2^{n+1}-2)/(2^{n+1}-1); the resulting integral inequality is exact for
// every nonnegative field.
inline DyadicComparison dyadic_comparison(const GridFunction& v, double k, int n,
                                   double delta,
                                   const ParabolicCylinder& cyl) {
  if (!(delta > 1.0)) throw std::invalid_argument("dyadic_comparison: need delta > 1");
  if (n < 1) throw std::invalid_argument("dyadic_comparison: need n >= 1");
  if (!(k > 0.0)) throw std::invalid_argument("dyadic_comparison: need k > 0");
  const double k_n = level_at(k, n);
  const double k_next = level_at(k, n + 1);
  const auto nodes = cylinder_nodes(v.grid(), cyl);
  for (auto i : nodes)
    if (v[i] < 0.0)
      throw std::invalid_argument("dyadic_comparison: field must be nonnegative");
  DyadicComparison out;
  out.lhs = integrate_nodes(v.grid(), nodes, [&](std::int64_t i) {
    return std::pow(std::max(v[i] - k_n, 0.0), delta);
  });
  const double factor = std::pow(std::pow(2.0, n + 1) - 1.0, -delta);
  out.rhs = factor * integrate_nodes(v.grid(), nodes, [&](std::int64_t i) {
              return v[i] >= k_next ? std::pow(v[i], delta) : 0.0;
            });
  out.holds = out.lhs >= out.rhs;
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace plreg
