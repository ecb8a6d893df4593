#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bnnmi/dirichlet.hpp"

// Analytic-versus-Monte-Carlo cross-checks of the uncertainty formulas.
namespace bnnmi::verify {

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Mean and standard error of the mean.
McEstimate mc_mean(std::span<const double> values);

// Empirical BALD of the batch with a bootstrap standard error computed from
// `replicates` resamples of the rows.
McEstimate mc_bald(const SampleBatch& batch, std::size_t replicates,
                   std::uint64_t seed);

// Sample mean of p_i ln p_j (exact zeros are floored at the smallest
// denormal before the log).
McEstimate mc_cross_moment(const SampleBatch& batch, std::size_t i, std::size_t j);

struct VerifyConfig {
  std::vector<std::size_t> classes{2, 3};
  std::vector<double> alpha_grid{0.5, 1.0, 2.0, 5.0};
  std::size_t mc_samples = 100000;
  std::size_t bootstrap_replicates = 100;
  std::uint64_t seed = 1;
  double z_threshold = 3.0;
  double identity_tolerance = 1e-9;
  double lemma_sum_tolerance = 1e-10;
  std::size_t threads = 1;

  void validate() const;
};

// For each class count C and grid value a: the symmetric vector (a, ..., a)
// and the ramp (a, 2a, ..., Ca).
std::vector<DirichletParams> build_grid(const VerifyConfig& config);

struct CheckResult {
  std::string name;
  std::string alpha;
  bool passed = false;
  double deviation = 0.0;
  double tolerance = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Checks per grid point: decomposition identity, joint-entropy identity,
// cross-moment column sums, cross moments against MC means (z-scored), and
// analytic MI against the MC BALD estimate (z-scored with bootstrap SE).
// Per class count: MI strictly decreasing and aleatoric strictly increasing
// along the symmetric ray over the sorted grid values.
VerifyReport run_verification(const VerifyConfig& config);

// One line per check, numbers at 12 significant digits.
void print_report(const VerifyReport& report, std::ostream& out);

std::string format_alpha(const DirichletParams& params);

}  // namespace bnnmi::verify
