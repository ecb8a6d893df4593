#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bnnmi/dirichlet.hpp"

namespace bnnmi::estimation {

// Sufficient statistic s_k driving the fixed point
//   alpha_k <- invdigamma(digamma(sum alpha) + s_k).
enum class StatisticMode {
  PaperLogOfMean,  // s_k = ln E[p_k]
  MeanOfLogs,      // s_k = E[ln p_k], the classical Dirichlet MLE statistic
};

std::string_view to_string(StatisticMode mode);
// Accepts "paper-log-of-mean" and "mean-of-logs"; throws ParseError otherwise.
StatisticMode parse_statistic_mode(std::string_view text);

struct EstimationConfig {
  std::size_t max_iterations = 1000;
  // Stop once the largest absolute change of any alpha_k in a sweep is at or
  // below this value. Zero runs the full iteration budget.
  double convergence_tol = 1e-10;
  StatisticMode statistic_mode = StatisticMode::PaperLogOfMean;
  double degenerate_epsilon = 1e-8;
  bool refine_inverse_digamma = false;

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

// Floor applied to the moment initializer and to probabilities inside logs.
inline constexpr double kInitialAlphaFloor = 1e-3;
inline constexpr double kLogProbabilityFloor = 1e-300;

struct MomentSummary {
  std::vector<double> mean_p;
  std::vector<double> mean_p2;
  // Mean of ln p_k over samples with p_k > 0; -infinity when there are none.
  std::vector<double> mean_log_p;
  std::size_t samples = 0;
};

// Per-class raw moments; needs at least two samples.
MomentSummary summarize(const SampleBatch& batch);

// Indices k with mean_p_k < epsilon and mean_p2_k < epsilon^2. Throws
// DegenerateError if every class qualifies.
std::vector<std::size_t> detect_degenerate(const MomentSummary& summary,
                                           double epsilon);

// Moment-matching start point
//   alpha_k = (E[p]^2 - E[p] E[p^2]) / (E[p^2] - E[p]^2)
// with degenerate classes set to 0 and non-positive or undefined values
// floored at kInitialAlphaFloor.
DirichletParams initial_alpha(const MomentSummary& summary,
                              double degenerate_epsilon = 1e-8);

struct EstimationResult {
  DirichletParams alpha;
  std::size_t iterations = 0;
  bool converged = false;
  StatisticMode statistic_mode = StatisticMode::PaperLogOfMean;
  std::vector<std::size_t> degenerate_classes;
};

// Minka-style fixed-point iteration over the non-degenerate classes.
// Degenerate classes stay pinned at 0. Running out of iterations is not an
// error; a non-finite alpha is (EstimationError). Fewer than two
// non-degenerate classes raises DegenerateError.
EstimationResult fixed_point_estimate(const SampleBatch& batch,
                                      const EstimationConfig& config = {});

// Same iteration starting from an already computed summary.
EstimationResult fixed_point_estimate(const MomentSummary& summary,
                                      const EstimationConfig& config = {});

}  // namespace bnnmi::estimation
