#include "bnnmi/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "bnnmi/errors.hpp"
#include "bnnmi/specfun.hpp"

namespace bnnmi::uncertainty {

namespace {

using specfun::digamma;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s;
}

// The two Lemma-2 sums shared by MI, aleatoric and joint entropy:
//   cross = sum_i sum_{j!=i} (a_j - 1) m_i [digamma(a_j) - digamma(A + 1)]
//   diag  = sum_i a_i m_i [digamma(a_i + 1) - digamma(A + 1)]
struct MomentSums {
  double cross = 0.0;
  double diag = 0.0;
};

MomentSums moment_sums(std::span<const double> alpha) {
  const double total = sum_of(alpha);
  const double psi_total1 = digamma(total + 1.0);
  std::vector<double> psi(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) psi[j] = digamma(alpha[j]);

  MomentSums sums;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double m_i = alpha[i] / total;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (j == i) continue;
      sums.cross += (alpha[j] - 1.0) * m_i * (psi[j] - psi_total1);
    }
    sums.diag += alpha[i] * m_i * (digamma(alpha[i] + 1.0) - psi_total1);
  }
  return sums;
}

// (A - C) digamma(A) - sum_i (a_i - 1) digamma(a_i)
double entropy_digamma_terms(std::span<const double> alpha) {
  const double total = sum_of(alpha);
  double acc = (total - static_cast<double>(alpha.size())) * digamma(total);
  for (const double a : alpha) acc -= (a - 1.0) * digamma(a);
  return acc;
}

double predictive_entropy_of(std::span<const double> alpha) {
  const double total = sum_of(alpha);
  double acc = 0.0;
  for (const double a : alpha) acc -= xlogx(a / total);
  return acc;
}

double beta_entropy(double a, double b) {
  return dirichlet::differential_entropy(DirichletParams({a, b}));
}

double clamp_noise(double v) { return (v < 0.0 && v >= -1e-9) ? 0.0 : v; }

}  // namespace

std::vector<double> reduce_degenerate(std::span<const double> alpha) {
  std::vector<double> kept;
  kept.reserve(alpha.size());
  for (const double a : alpha) {
    if (a >= kTinyAlpha) kept.push_back(a);
  }
  return kept;
}

double shannon_entropy(std::span<const double> p) {
  double acc = 0.0;
  for (const double v : p) acc -= xlogx(v);
  return acc;
}

double predictive_entropy(const DirichletParams& params) {
  return predictive_entropy_of(reduce_degenerate(params.alpha()));
}

double analytic_mutual_information(const DirichletParams& params) {
  const auto alpha = reduce_degenerate(params.alpha());
  if (alpha.size() < 2) return 0.0;
  const auto sums = moment_sums(alpha);
  return entropy_digamma_terms(alpha) + predictive_entropy_of(alpha) +
         sums.cross + sums.diag;
}

double analytic_aleatoric(const DirichletParams& params) {
  const auto alpha = reduce_degenerate(params.alpha());
  if (alpha.size() < 2) return 0.0;
  const auto sums = moment_sums(alpha);
  return -entropy_digamma_terms(alpha) - sums.cross - sums.diag;
}

double janossy_joint_entropy(const DirichletParams& params) {
  if (!params.strictly_positive()) {
    throw DomainError(
        "janossy_joint_entropy: requires strictly positive concentrations");
  }
  const auto sums = moment_sums(params.alpha());
  return specfun::log_beta_multivariate(params.alpha()) - sums.cross - sums.diag;
}

double mjent(const DirichletParams& params) {
  const auto alpha = reduce_degenerate(params.alpha());
  if (alpha.size() < 2) return 0.0;
  const double total = sum_of(alpha);
  double acc = 0.0;
  for (const double a : alpha) {
    const double m = a / total;
    acc += m * (beta_entropy(a + 1.0, total - a) - std::log(m));
  }
  return acc;
}

double baba_ratio(double bald, double mjent_value) {
  const auto floored = [](double d) {
    if (std::abs(d) >= kBabaDenominatorFloor) return d;
    return d < 0.0 ? -kBabaDenominatorFloor : kBabaDenominatorFloor;
  };
  if (mjent_value >= 0.0) return bald / floored(mjent_value);
  return mjent_value / floored(bald);
}

double baba(const DirichletParams& params) {
  return baba_ratio(analytic_mutual_information(params), mjent(params));
}

double empirical_aleatoric(const SampleBatch& batch) {
  double acc = 0.0;
  for (std::size_t m = 0; m < batch.size(); ++m) {
    acc += shannon_entropy(batch.row(m));
  }
  return acc / static_cast<double>(batch.size());
}

double empirical_bald(const SampleBatch& batch) {
  const auto first = batch.row(0);
  bool identical = true;
  for (std::size_t m = 1; m < batch.size() && identical; ++m) {
    identical = std::equal(first.begin(), first.end(), batch.row(m).begin());
  }
  if (identical) return 0.0;
  std::vector<double> mean(batch.classes(), 0.0);
  for (std::size_t m = 0; m < batch.size(); ++m) {
    const auto row = batch.row(m);
    for (std::size_t k = 0; k < row.size(); ++k) mean[k] += row[k];
  }
  for (double& v : mean) v /= static_cast<double>(batch.size());
  return shannon_entropy(mean) - empirical_aleatoric(batch);
}

UncertaintyReport analyze(const DirichletParams& params) {
  UncertaintyReport report;
  report.predictive_entropy = predictive_entropy(params);
  report.epistemic = clamp_noise(analytic_mutual_information(params));
  report.aleatoric = clamp_noise(analytic_aleatoric(params));
  const auto reduced = reduce_degenerate(params.alpha());
  if (reduced.size() >= 2) {
    report.joint_entropy = janossy_joint_entropy(DirichletParams(reduced));
  }
  report.mjent = mjent(params);
  report.baba = baba_ratio(report.epistemic, report.mjent);
  return report;
}

}  // namespace bnnmi::uncertainty
