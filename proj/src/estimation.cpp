#include "bnnmi/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bnnmi/errors.hpp"
#include "bnnmi/specfun.hpp"

namespace bnnmi::estimation {

std::string_view to_string(StatisticMode mode) {
  switch (mode) {
    case StatisticMode::PaperLogOfMean:
      return "paper-log-of-mean";
    case StatisticMode::MeanOfLogs:
      return "mean-of-logs";
  }
  return "unknown";
}

StatisticMode parse_statistic_mode(std::string_view text) {
  if (text == "paper-log-of-mean") return StatisticMode::PaperLogOfMean;
  if (text == "mean-of-logs") return StatisticMode::MeanOfLogs;
  throw ParseError("unknown statistic mode '" + std::string(text) +
                   "' (expected paper-log-of-mean or mean-of-logs)");
}

void EstimationConfig::validate() const {
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!(convergence_tol >= 0.0)) {
    throw DomainError("convergence_tol must be >= 0");
  }
  if (!(degenerate_epsilon > 0.0)) {
    throw DomainError("degenerate_epsilon must be > 0");
  }
}

MomentSummary summarize(const SampleBatch& batch) {
  if (batch.size() < 2) {
    throw DomainError("summarize: need at least two samples");
  }
  const std::size_t classes = batch.classes();
  MomentSummary s;
  s.samples = batch.size();
  s.mean_p.assign(classes, 0.0);
  s.mean_p2.assign(classes, 0.0);
  s.mean_log_p.assign(classes, 0.0);
  std::vector<std::size_t> positive(classes, 0);
  for (std::size_t m = 0; m < batch.size(); ++m) {
    const auto row = batch.row(m);
    for (std::size_t k = 0; k < classes; ++k) {
      s.mean_p[k] += row[k];
      s.mean_p2[k] += row[k] * row[k];
      if (row[k] > 0.0) {
        s.mean_log_p[k] += std::log(std::max(row[k], kLogProbabilityFloor));
        ++positive[k];
      }
    }
  }
  const auto n = static_cast<double>(batch.size());
  for (std::size_t k = 0; k < classes; ++k) {
    s.mean_p[k] /= n;
    s.mean_p2[k] /= n;
    s.mean_log_p[k] = positive[k] > 0
                          ? s.mean_log_p[k] / static_cast<double>(positive[k])
                          : -std::numeric_limits<double>::infinity();
  }
  return s;
}

std::vector<std::size_t> detect_degenerate(const MomentSummary& summary,
                                           double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("detect_degenerate: epsilon must be > 0");
  std::vector<std::size_t> flagged;
  for (std::size_t k = 0; k < summary.mean_p.size(); ++k) {
    if (summary.mean_p[k] < epsilon && summary.mean_p2[k] < epsilon * epsilon) {
      flagged.push_back(k);
    }
  }
  if (flagged.size() == summary.mean_p.size()) {
    throw DegenerateError("every class is degenerate");
  }
  return flagged;
}

DirichletParams initial_alpha(const MomentSummary& summary,
                              double degenerate_epsilon) {
  const auto degenerate = detect_degenerate(summary, degenerate_epsilon);
  std::vector<double> alpha(summary.mean_p.size(), 0.0);
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (std::binary_search(degenerate.begin(), degenerate.end(), k)) continue;
    const double m = summary.mean_p[k];
    const double m2 = summary.mean_p2[k];
    const double variance = m2 - m * m;
    double value = variance > 0.0 ? (m * m - m * m2) / variance : 0.0;
    if (!std::isfinite(value) || value <= 0.0) value = kInitialAlphaFloor;
    alpha[k] = std::max(value, kInitialAlphaFloor);
  }
  return DirichletParams(std::move(alpha));
}

EstimationResult fixed_point_estimate(const SampleBatch& batch,
                                      const EstimationConfig& config) {
  return fixed_point_estimate(summarize(batch), config);
}

EstimationResult fixed_point_estimate(const MomentSummary& summary,
                                      const EstimationConfig& config) {
  config.validate();
  const auto degenerate = detect_degenerate(summary, config.degenerate_epsilon);
  const std::size_t classes = summary.mean_p.size();
  if (classes - degenerate.size() < 2) {
    throw DegenerateError(
        "fixed_point_estimate: need at least two non-degenerate classes");
  }

  std::vector<std::size_t> active;
  std::vector<double> statistic;
  for (std::size_t k = 0; k < classes; ++k) {
    if (std::binary_search(degenerate.begin(), degenerate.end(), k)) continue;
    active.push_back(k);
    const double s =
        config.statistic_mode == StatisticMode::PaperLogOfMean
            ? std::log(std::max(summary.mean_p[k], kLogProbabilityFloor))
            : std::max(summary.mean_log_p[k], std::log(kLogProbabilityFloor));
    statistic.push_back(s);
  }

  const auto start = initial_alpha(summary, config.degenerate_epsilon);
  std::vector<double> alpha(start.alpha().begin(), start.alpha().end());

  EstimationResult result{start, 0, false, config.statistic_mode, degenerate};
  std::vector<double> next(active.size());
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    double total = 0.0;
    for (const std::size_t k : active) total += alpha[k];
    const double psi_total = specfun::digamma(total);
    double max_change = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      next[a] = specfun::inv_digamma_minka(psi_total + statistic[a],
                                           config.refine_inverse_digamma);
      if (!std::isfinite(next[a]) || !(next[a] > 0.0)) {
        std::ostringstream msg;
        msg << "fixed_point_estimate: alpha_" << active[a]
            << " became non-finite at iteration " << iter + 1;
        throw EstimationError(msg.str());
      }
      max_change = std::max(max_change, std::abs(next[a] - alpha[active[a]]));
    }
    for (std::size_t a = 0; a < active.size(); ++a) alpha[active[a]] = next[a];
    result.iterations = iter + 1;
    if (max_change <= config.convergence_tol) {
      result.converged = true;
      break;
    }
  }
  result.alpha = DirichletParams(std::move(alpha));
  return result;
}

}  // namespace bnnmi::estimation
