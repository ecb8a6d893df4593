#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bnnmi/dirichlet.hpp"

// Analytic uncertainty measures for a Dirichlet predictive distribution, and
// their Monte-Carlo counterparts computed from a batch of sampled
// probability vectors. All values are in nats.
//
// Degenerate coordinates: concentrations below kTinyAlpha are treated as
// exactly zero and removed before any digamma/log-gamma evaluation, so a
// measure on (0, a2, ..., aC) equals the measure on (a2, ..., aC). When a
// single class survives the output is deterministic and the analytic MI and
// aleatoric terms are 0.
namespace bnnmi::uncertainty {

inline constexpr double kTinyAlpha = 1e-10;
inline constexpr double kBabaDenominatorFloor = 1e-12;

struct UncertaintyReport {
  double predictive_entropy = 0.0;
  double epistemic = 0.0;
  double aleatoric = 0.0;
  // Joint (Janossy) entropy of (P, Y); empty when fewer than two classes
  // remain after degenerate reduction.
  std::optional<double> joint_entropy;
  double mjent = 0.0;
  double baba = 0.0;
};

// Concentrations with entries below kTinyAlpha dropped.
std::vector<double> reduce_degenerate(std::span<const double> alpha);

// Shannon entropy -sum p ln p with 0 ln 0 = 0.
double shannon_entropy(std::span<const double> p);

// H(Y) = -sum_i m_i ln m_i, m = E[P].
double predictive_entropy(const DirichletParams& params);

// Epistemic uncertainty I(P; Y), evaluated term by term as
//   (A - C) digamma(A) - sum_i (a_i - 1) digamma(a_i) - sum_i m_i ln m_i
//   + sum_i sum_{j!=i} (a_j - 1) m_i [digamma(a_j) - digamma(A + 1)]
//   + sum_i a_i m_i [digamma(a_i + 1) - digamma(A + 1)]
double analytic_mutual_information(const DirichletParams& params);

// Aleatoric uncertainty E[H(Y | P)]: the expression above without the
// predictive-entropy term and with every remaining sign flipped.
double analytic_aleatoric(const DirichletParams& params);

// Joint entropy of (P, Y) under the Janossy density j(p, i) = p_i f(p).
// Strictly positive concentrations only.
double janossy_joint_entropy(const DirichletParams& params);

// sum_i m_i [h(Beta(a_i + 1, A - a_i)) - ln m_i] over classes with a_i > 0.
double mjent(const DirichletParams& params);

// BALD / MJEnt when MJEnt >= 0, MJEnt / BALD otherwise. Denominators smaller
// than kBabaDenominatorFloor in magnitude are pushed out to +-floor.
double baba_ratio(double bald, double mjent_value);

// baba_ratio(analytic_mutual_information, mjent).
double baba(const DirichletParams& params);

// H(mean of batch) - mean over rows of H(row).
double empirical_bald(const SampleBatch& batch);

// Mean over rows of H(row).
double empirical_aleatoric(const SampleBatch& batch);

// All analytic measures at once. Values in [-1e-9, 0) are clamped to 0.
UncertaintyReport analyze(const DirichletParams& params);

}  // namespace bnnmi::uncertainty
