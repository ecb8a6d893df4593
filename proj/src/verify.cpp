#include "bnnmi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "bnnmi/errors.hpp"
#include "bnnmi/parallel.hpp"
#include "bnnmi/random.hpp"
#include "bnnmi/specfun.hpp"
#include "bnnmi/uncertainty.hpp"

namespace bnnmi::verify {

McEstimate mc_mean(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("mc_mean: need at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

McEstimate mc_bald(const SampleBatch& batch, std::size_t replicates,
                   std::uint64_t seed) {
  if (replicates < 2) throw DomainError("mc_bald: need at least two replicates");
  const std::size_t n = batch.size();
  const std::size_t classes = batch.classes();
  std::vector<double> row_entropy(n);
  for (std::size_t m = 0; m < n; ++m) {
    row_entropy[m] = uncertainty::shannon_entropy(batch.row(m));
  }
  const double estimate = uncertainty::empirical_bald(batch);

  std::vector<double> replicate_values(replicates);
  std::vector<double> mean(classes);
  for (std::size_t b = 0; b < replicates; ++b) {
    Rng rng(derive_seed(seed, b));
    std::fill(mean.begin(), mean.end(), 0.0);
    double entropy_sum = 0.0;
    for (std::size_t draw = 0; draw < n; ++draw) {
      const std::size_t m = rng.below(n);
      const auto row = batch.row(m);
      for (std::size_t k = 0; k < classes; ++k) mean[k] += row[k];
      entropy_sum += row_entropy[m];
    }
    for (double& v : mean) v /= static_cast<double>(n);
    replicate_values[b] =
        uncertainty::shannon_entropy(mean) - entropy_sum / static_cast<double>(n);
  }
  double centre = 0.0;
  for (const double v : replicate_values) centre += v;
  centre /= static_cast<double>(replicates);
  double ss = 0.0;
  for (const double v : replicate_values) ss += (v - centre) * (v - centre);
  return {estimate, std::sqrt(ss / static_cast<double>(replicates - 1))};
}

McEstimate mc_cross_moment(const SampleBatch& batch, std::size_t i, std::size_t j) {
  if (i >= batch.classes() || j >= batch.classes()) {
    throw IndexError("mc_cross_moment: class index out of range");
  }
  std::vector<double> values(batch.size());
  for (std::size_t m = 0; m < batch.size(); ++m) {
    const auto row = batch.row(m);
    values[m] = row[i] * std::log(std::max(row[j], std::numeric_limits<double>::denorm_min()));
  }
  return mc_mean(values);
}

void VerifyConfig::validate() const {
  if (classes.empty() || alpha_grid.empty()) {
    throw DomainError("verify: empty class list or alpha grid");
  }
  for (const auto c : classes) {
    if (c < 2) throw DomainError("verify: class counts must be >= 2");
  }
  for (const double a : alpha_grid) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw DomainError("verify: alpha grid values must be finite and > 0");
    }
  }
  if (mc_samples < 2) throw DomainError("verify: need at least two MC samples");
  if (bootstrap_replicates < 2) {
    throw DomainError("verify: need at least two bootstrap replicates");
  }
}

std::vector<DirichletParams> build_grid(const VerifyConfig& config) {
  std::vector<DirichletParams> grid;
  for (const auto c : config.classes) {
    for (const double a : config.alpha_grid) {
      grid.emplace_back(std::vector<double>(c, a));
      std::vector<double> ramp(c);
      for (std::size_t k = 0; k < c; ++k) ramp[k] = a * static_cast<double>(k + 1);
      grid.emplace_back(std::move(ramp));
    }
  }
  return grid;
}

std::string format_alpha(const DirichletParams& params) {
  std::ostringstream out;
  out << std::setprecision(12) << '(';
  for (std::size_t k = 0; k < params.classes(); ++k) {
    out << (k ? "," : "") << params[k];
  }
  out << ')';
  return out.str();
}

namespace {

std::vector<CheckResult> check_point(const DirichletParams& params,
                                     const VerifyConfig& config,
                                     std::uint64_t seed) {
  namespace u = uncertainty;
  const std::string label = format_alpha(params);
  std::vector<CheckResult> out;

  const double h = dirichlet::differential_entropy(params);
  const double hy = u::predictive_entropy(params);
  const double mi = u::analytic_mutual_information(params);
  const double alea = u::analytic_aleatoric(params);
  const double joint = u::janossy_joint_entropy(params);

  const double decomposition = std::abs(hy - mi - alea);
  out.push_back({"decomposition", label, decomposition <= config.identity_tolerance,
                 decomposition, config.identity_tolerance});
  const double identity = std::abs(h + hy - joint - mi);
  out.push_back({"joint-entropy-identity", label,
                 identity <= config.identity_tolerance, identity,
                 config.identity_tolerance});

  const std::size_t classes = params.classes();
  double worst_sum = 0.0;
  for (std::size_t j = 0; j < classes; ++j) {
    double column = 0.0;
    for (std::size_t i = 0; i < classes; ++i) column += dirichlet::cross_moment(params, i, j);
    const double expected = specfun::digamma(params[j]) - specfun::digamma(params.total());
    worst_sum = std::max(worst_sum, std::abs(column - expected));
  }
  out.push_back({"lemma2-column-sum", label, worst_sum <= config.lemma_sum_tolerance,
                 worst_sum, config.lemma_sum_tolerance});

  const auto batch = dirichlet::sample(params, config.mc_samples, derive_seed(seed, 0));
  double worst_z = 0.0;
  for (std::size_t i = 0; i < classes; ++i) {
    for (std::size_t j = 0; j < classes; ++j) {
      const auto est = mc_cross_moment(batch, i, j);
      const double z = std::abs(est.value - dirichlet::cross_moment(params, i, j)) /
                       est.standard_error;
      worst_z = std::max(worst_z, z);
    }
  }
  out.push_back({"lemma2-mc", label, worst_z <= config.z_threshold, worst_z,
                 config.z_threshold});

  const auto bald = mc_bald(batch, config.bootstrap_replicates, derive_seed(seed, 1));
  const double bald_z = std::abs(bald.value - mi) / bald.standard_error;
  out.push_back({"bald-mc", label, bald_z <= config.z_threshold, bald_z,
                 config.z_threshold});
  return out;
}

}  // namespace

VerifyReport run_verification(const VerifyConfig& config) {
  config.validate();
  const auto grid = build_grid(config);
  std::vector<std::vector<CheckResult>> per_point(grid.size());
  parallel_for(grid.size(), config.threads, [&](std::size_t p) {
    per_point[p] = check_point(grid[p], config, derive_seed(config.seed, p));
  });

  VerifyReport report;
  for (auto& checks : per_point) {
    report.checks.insert(report.checks.end(), checks.begin(), checks.end());
  }

  auto ray = config.alpha_grid;
  std::sort(ray.begin(), ray.end());
  ray.erase(std::unique(ray.begin(), ray.end()), ray.end());
  for (const auto c : config.classes) {
    double worst_mi_step = -std::numeric_limits<double>::infinity();
    double worst_alea_step = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t < ray.size(); ++t) {
      const DirichletParams prev(std::vector<double>(c, ray[t - 1]));
      const DirichletParams next(std::vector<double>(c, ray[t]));
      worst_mi_step = std::max(worst_mi_step,
                               uncertainty::analytic_mutual_information(next) -
                                   uncertainty::analytic_mutual_information(prev));
      worst_alea_step = std::max(worst_alea_step,
                                 uncertainty::analytic_aleatoric(prev) -
                                     uncertainty::analytic_aleatoric(next));
    }
    if (ray.size() < 2) worst_mi_step = worst_alea_step = -1.0;
    const std::string label = "C=" + std::to_string(c) + " symmetric ray";
    report.checks.push_back({"mi-decreasing", label, worst_mi_step < 0.0,
                             worst_mi_step, 0.0});
    report.checks.push_back({"aleatoric-increasing", label, worst_alea_step < 0.0,
                             worst_alea_step, 0.0});
  }
  return report;
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

void print_report(const VerifyReport& report, std::ostream& out) {
  std::size_t failed = 0;
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(12);
  for (const auto& c : report.checks) {
    if (!c.passed) ++failed;
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ' ' << c.alpha
        << " deviation=" << c.deviation << " tolerance=" << c.tolerance << '\n';
  }
  out << (failed == 0 ? "ALL PASS" : "FAILURES") << ' '
      << report.checks.size() - failed << '/' << report.checks.size() << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace bnnmi::verify
