#include "bnnmi/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bnnmi/errors.hpp"

namespace bnnmi::specfun {

namespace {

void require_positive(double x, const char* name) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    std::ostringstream msg;
    msg << name << ": argument must be finite and > 0, got " << x;
    throw DomainError(msg.str());
  }
}

// Stirling series for ln Gamma(z), z >= kShift.
constexpr double kShift = 15.0;

double stirling_log_gamma(double z) {
  // B_2k / (2k (2k - 1)) for k = 1..8
  constexpr double kCoeff[] = {
      1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,
      -1.0 / 1680.0,       1.0 / 1188.0,         -691.0 / 360360.0,
      1.0 / 156.0,         -3617.0 / 122400.0,
  };
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (int k = 7; k >= 0; --k) series = series * inv2 + kCoeff[k];
  series *= inv;
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) +
         series;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x >= kShift) return stirling_log_gamma(x);
  // ln Gamma(x) = ln Gamma(x + n) - ln(x (x+1) ... (x+n-1)); the product stays
  // far from overflow because x + n < 16.
  double product = 1.0;
  double z = x;
  while (z < kShift) {
    product *= z;
    z += 1.0;
  }
  return stirling_log_gamma(z) - std::log(product);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // digamma(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k)
  constexpr double kCoeff[] = {
      1.0 / 12.0,  -1.0 / 120.0,       1.0 / 252.0, -1.0 / 240.0,
      1.0 / 132.0, -691.0 / 32760.0,   1.0 / 12.0,
  };
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  for (int k = 6; k >= 0; --k) series = series * inv2 + kCoeff[k];
  series *= inv2;
  return result + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double result = 0.0;
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  // trigamma(x) ~ 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1)
  constexpr double kCoeff[] = {
      1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0,
      -691.0 / 2730.0, 7.0 / 6.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (int k = 6; k >= 0; --k) series = series * inv2 + kCoeff[k];
  series *= inv2 * inv;
  return result + inv + 0.5 * inv2 + series;
}

double inv_digamma_minka(double y, bool refine) {
  if (!std::isfinite(y)) {
    throw DomainError("inv_digamma_minka: argument must be finite");
  }
  double x = y >= kInvDigammaBranch ? std::exp(y) + 0.5
                                    : -1.0 / (y + kEulerGamma);
  if (!refine) return x;

  const double tol = 1e-12 * std::max(1.0, std::abs(y));
  for (int iter = 0; iter < 100; ++iter) {
    const double residual = digamma(x) - y;
    if (std::abs(residual) <= tol) break;
    double next = x - residual / trigamma(x);
    // digamma is increasing and concave, so Newton from the left can
    // overshoot past zero; halve toward zero instead.
    if (!(next > 0.0)) next = 0.5 * x;
    if (next == x) break;
    x = next;
  }
  return x;
}

double log_beta_multivariate(std::span<const double> alpha) {
  if (alpha.size() < 2) {
    throw DomainError("log_beta_multivariate: need at least two parameters");
  }
  double total = 0.0;
  double sum_log_gamma = 0.0;
  for (const double a : alpha) {
    require_positive(a, "log_beta_multivariate");
    total += a;
    sum_log_gamma += log_gamma(a);
  }
  return sum_log_gamma - log_gamma(total);
}

}  // namespace bnnmi::specfun
