#pragma once

#include <span>

// Scalar special functions. All functions are pure and thread-safe; domain
// violations throw bnnmi::DomainError.
namespace bnnmi::specfun {

// Euler-Mascheroni constant, gamma = -digamma(1).
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Branch point of Minka's two-branch inverse-digamma approximation.
inline constexpr double kInvDigammaBranch = -2.22;

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// digamma(x) = d/dx ln Gamma(x) for x > 0. Shifts x above 10 with the
// recurrence, then evaluates the asymptotic series.
double digamma(double x);

// trigamma(x) = d/dx digamma(x) for x > 0. Only needed by the Newton
// refinement of the inverse digamma.
double trigamma(double x);

// Minka's approximate inverse of digamma:
//   exp(y) + 1/2      if y >= -2.22
//   -1 / (y + gamma)  otherwise
// With `refine` set, Newton steps on digamma(x) - y = 0 follow until the
// residual is below 1e-12 (scaled by max(1, |y|)).
double inv_digamma_minka(double y, bool refine = false);

// ln B(alpha) = sum_k ln Gamma(alpha_k) - ln Gamma(sum_k alpha_k).
// Requires at least two entries, all strictly positive.
double log_beta_multivariate(std::span<const double> alpha);

}  // namespace bnnmi::specfun
