#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnnmi/bayes_model.hpp"
#include "bnnmi/data_io.hpp"
#include "bnnmi/dataset.hpp"
#include "bnnmi/estimation.hpp"

namespace bnnmi::active {

enum class AcquisitionStrategy {
  Random,
  BaldEmpirical,
  BaldAnalytic,
  BabaEmpirical,
  BabaAnalytic,
};

// "random", "bald-empirical", "bald-analytic", "baba-empirical", "baba-analytic"
std::string_view to_string(AcquisitionStrategy strategy);
AcquisitionStrategy parse_strategy(std::string_view text);
bool is_analytic(AcquisitionStrategy strategy);

struct ALConfig {
  std::size_t k = 20;             // acquisitions per iteration
  std::size_t k_total = 200;      // labeling budget, initial set included
  std::size_t mc_samples = 50;    // dropout passes per pool item
  std::size_t initial_size = 20;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  model::ModelConfig model;
  estimation::EstimationConfig estimation{
      .statistic_mode = estimation::StatisticMode::MeanOfLogs};
  std::size_t threads = 1;
  bool keep_scores = false;
  bool record_wall_time = true;

  void validate(AcquisitionStrategy strategy) const;
};

struct PoolScore {
  std::size_t index = 0;  // position in the dataset the pool was drawn from
  double score = 0.0;
  bool fallback = false;  // analytic estimation failed; empirical score used
};

// Scores each pool item. Item i's randomness comes from derive_seed(seed,
// pool[i]) so results are independent of thread count and pool order.
// Analytic strategies fit Dirichlet parameters to the MC batch; an item whose
// fit fails is scored with the empirical counterpart and flagged.
std::vector<PoolScore> score_pool(const model::TrainedModel& model,
                                  const LabeledDataset& data,
                                  std::span<const std::size_t> pool,
                                  AcquisitionStrategy strategy,
                                  std::size_t mc_samples, std::uint64_t seed,
                                  const estimation::EstimationConfig& estimation = {},
                                  std::size_t threads = 1);

// Indices of the K highest scores (ties to the smaller index), returned in
// ascending index order. Throws DomainError when K exceeds the pool.
std::vector<std::size_t> select_top_k(std::span<const PoolScore> scores,
                                      std::size_t k);

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<std::size_t> initial_indices;
  std::vector<io::LearningCurveRecord> curves;
  std::vector<std::vector<std::size_t>> selections;
  std::vector<io::ScoreRow> scores;
  std::size_t fallback_count = 0;
  std::optional<std::string> failure;
};

struct ALRunResult {
  AcquisitionStrategy strategy = AcquisitionStrategy::Random;
  std::vector<SeedRun> runs;

  std::vector<io::LearningCurveRecord> curves() const;
  bool failed() const;
  // Mean over seeds of the last recorded test accuracy.
  double mean_final_accuracy() const;
};

// Pool-based active learning: seeded random initial set, then repeat
// {train from scratch, evaluate, score the unlabeled pool, add the top K}
// until the labeled set reaches k_total. One full run per configured seed.
// A training failure ends that seed's run; results gathered so far are kept.
ALRunResult run_active_learning(const LabeledDataset& pool,
                                const LabeledDataset& test_set,
                                const ALConfig& config,
                                AcquisitionStrategy strategy);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace bnnmi::active
