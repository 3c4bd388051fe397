#pragma once

#include <cmath>
#include <stdexcept>

namespace plreg {

enum class ExponentMode { unified, degenerate, singular };

// Exponent triple driving the truncated energy estimate.  All three modes
// satisfy alpha = gamma and beta = p - 1 + gamma, so the integrand exponent
// alpha + beta + 2 - gamma equals p + 1 + gamma throughout.
struct ExponentSet {
  ExponentMode mode = ExponentMode::unified;
  double alpha = 0.0;
  double beta = 1.0;
  double gamma = 0.0;
};

inline ExponentSet choose_exponents(ExponentMode mode, double p, int N) {
  ExponentSet e;
  e.mode = mode;
  switch (mode) {
    case ExponentMode::unified: {
      if (!(p > 2.0 * N / (N + 2.0)))
        throw std::invalid_argument("choose_exponents: need p > 2N/(N+2)");
      e.gamma = 4.0 / (N + 2.0);
      e.alpha = e.gamma;
      e.beta = p - 1.0 + e.gamma;
      if (!(p - 2.0 + e.gamma > 0.0))
        throw std::logic_error("choose_exponents: p - 2 + gamma must be positive");
      break;
    }
    case ExponentMode::degenerate: {
      if (!(p >= 2.0))
        throw std::invalid_argument("choose_exponents: degenerate mode needs p >= 2");
      e.alpha = 0.0;
      e.gamma = 0.0;
      e.beta = p - 1.0;
      break;
    }
    case ExponentMode::singular: {
      if (!(p > 2.0 * N / (N + 2.0)) || !(p <= 2.0))
        throw std::invalid_argument(
            "choose_exponents: singular mode needs 2N/(N+2) < p <= 2");
      e.alpha = 2.0 - p;
      e.gamma = 2.0 - p;
      e.beta = 1.0;
      break;
    }
  }
  if (!(e.alpha >= e.gamma) || !(e.beta >= 1.0))
    throw std::logic_error("choose_exponents: admissibility violated");
  return e;
}

// Closed-form constants of the level-set recursion.  sigma * level_power
// equals N + 2 in every mode, which is what lets one recursion shape serve
// the full exponent range.
struct BoundConstants {
  ExponentMode mode = ExponentMode::unified;
  int N = 1;
  double p = 2.0;
  double rho = 1.0;
  double theta = 1.0;

  double growth = 0.0;         // geometric factor per recursion step
  double sigma = 0.0;          // inversion exponent, (N+2)/level_power
  double level_power = 0.0;    // total power of the level k spent per step
  double radius_weight = 0.0;  // 2^gamma/rho^2 + 2^{p+gamma-2}/theta
  double sup_power = 0.0;      // power of sup v in the one-step bound
  double integrand_power = 0.0;  // alpha + beta + 2 - gamma
};

inline BoundConstants bound_constants(int N, double p, const ExponentSet& e,
                                      double rho, double theta) {
  if (rho <= 0.0 || theta <= 0.0)
    throw std::invalid_argument("bound_constants: radii must be positive");
  BoundConstants b;
  b.mode = e.mode;
  b.N = N;
  b.p = p;
  b.rho = rho;
  b.theta = theta;
  const double g = e.gamma;
  b.growth = std::pow(2.0, p + 2.0 + g - 2.0 * (p + 1.0 + g) / (N + 2.0));
  b.radius_weight = std::pow(2.0, g) / (rho * rho) +
                    std::pow(2.0, p + g - 2.0) / theta;
  b.integrand_power = e.alpha + e.beta + 2.0 - e.gamma;
  switch (e.mode) {
    case ExponentMode::unified:
      b.level_power = p * N + 4.0 + 2.0 * (p + 1.0 + g);
      b.sup_power = p + g;
      break;
    case ExponentMode::degenerate:
      b.level_power = N * (p - 2.0) + 2.0 * (p + 1.0);
      b.sup_power = p - 2.0;
      break;
    case ExponentMode::singular:
      // written so that sigma * level_power = N + 2 and the p = 2 seam
      // matches the degenerate constants exactly
      b.level_power = (2.0 - p) * N + 6.0;
      b.sup_power = 2.0 - p;
      break;
  }
  b.sigma = (N + 2.0) / b.level_power;
  return b;
}

}  // namespace plreg
