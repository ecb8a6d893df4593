#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bnnmi {

// Concentration vector of a Dirichlet distribution over the C-simplex.
// Invariants: C >= 2, every entry finite and >= 0, at least one entry > 0.
// A zero entry marks a degenerate coordinate (P_k = 0 almost surely).
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alpha);

  std::span<const double> alpha() const { return alpha_; }
  std::size_t classes() const { return alpha_.size(); }
  double operator[](std::size_t k) const { return alpha_[k]; }
  double total() const { return total_; }
  bool strictly_positive() const;

  friend bool operator==(const DirichletParams&, const DirichletParams&) = default;

 private:
  std::vector<double> alpha_;
  double total_ = 0.0;
};

// A probability vector: entries >= 0 summing to 1 within 1e-9.
class SimplexPoint {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit SimplexPoint(std::vector<double> p);

  std::span<const double> p() const { return p_; }
  std::size_t classes() const { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }

 private:
  std::vector<double> p_;
};

// M simplex points of a common dimension C, stored row-major.
class SampleBatch {
 public:
  // Validates every row against the SimplexPoint invariants.
  SampleBatch(std::size_t classes, std::vector<double> values);
  explicit SampleBatch(std::span<const SimplexPoint> points);

  std::size_t size() const { return rows_; }
  std::size_t classes() const { return classes_; }
  std::span<const double> row(std::size_t m) const {
    return {values_.data() + m * classes_, classes_};
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;

 private:
  std::size_t classes_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

// Checks a single probability row; throws DomainError when it is off the
// simplex by more than `tolerance`.
void validate_simplex_row(std::span<const double> p, double tolerance);

namespace dirichlet {

// ln f(p) = -ln B(alpha) + sum_k (alpha_k - 1) ln p_k. Needs alpha_k > 0 and
// p_k > 0 for every k.
double log_density(const DirichletParams& params, std::span<const double> p);

// h = ln B(alpha) + (A - C) digamma(A) - sum_i (alpha_i - 1) digamma(alpha_i),
// A = sum alpha. Strictly positive alpha only.
double differential_entropy(const DirichletParams& params);

SimplexPoint mean(const DirichletParams& params);

// E[P_i ln P_j] (0-based indices), strictly positive alpha only.
//   i == j:  m_i [digamma(alpha_i + 1) - digamma(A + 1)]
//   i != j:  m_i [digamma(alpha_j)     - digamma(A + 1)]
// where m_i = alpha_i / A stands in for B(alpha(i,++)) / B(alpha).
double cross_moment(const DirichletParams& params, std::size_t i, std::size_t j);

// M independent draws via normalised Gamma(alpha_k, 1) variates. Degenerate
// coordinates come out exactly 0. Deterministic in `seed`.
SampleBatch sample(const DirichletParams& params, std::size_t count,
                   std::uint64_t seed);

}  // namespace dirichlet
}  // namespace bnnmi
