#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace plreg {

struct GeometricDecay {
  double threshold = 0.0;         // C^{-1/alpha} b^{-1/alpha^2}
  std::vector<double> sequence;   // extremal recursion X_{n+1} = C b^n X_n^{1+alpha}
  bool converged = false;         // X_{n_max} < 1e-12
  bool overflowed = false;
};

// Fast geometric convergence: if X_0 <= C^{-1/alpha} b^{-1/alpha^2} then the
// recursion X_{n+1} <= C b^n X_n^{1+alpha} hits zero.  The simulated sequence
// is extremal (equality at every step).
inline GeometricDecay fast_geometric(double C, double b, double alpha,
                                     double X0, int n_max) {
  if (!(C > 1.0 && b > 1.0))
    throw std::invalid_argument("fast_geometric: need C, b > 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("fast_geometric: need alpha > 0");
  GeometricDecay out;
  out.threshold = std::pow(C, -1.0 / alpha) * std::pow(b, -1.0 / (alpha * alpha));
  out.sequence.reserve(static_cast<std::size_t>(n_max) + 1);
  double x = X0;
  out.sequence.push_back(x);
  for (int n = 0; n < n_max; ++n) {
    x = C * std::pow(b, n) * std::pow(x, 1.0 + alpha);
    if (!std::isfinite(x) || x > 1e300) {
      out.overflowed = true;
      out.sequence.push_back(1e300);
      return out;
    }
    out.sequence.push_back(x);
  }
  out.converged = out.sequence.back() < 1e-12;
  return out;
}

// Equibounded backward recursion Y_n <= C b^n Y_{n+1}^{1-alpha}; the first
// element obeys Y_0 <= (2C / b^{1 - 1/alpha})^{1/alpha}.
inline double bounded_recursive(double C, double b, double alpha) {
  if (!(C > 1.0 && b > 1.0))
    throw std::invalid_argument("bounded_recursive: need C, b > 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("bounded_recursive: need alpha in (0,1)");
  return std::pow(2.0 * C / std::pow(b, 1.0 - 1.0 / alpha), 1.0 / alpha);
}

}  // namespace plreg
