#include "bnnmi/active_loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "bnnmi/errors.hpp"
#include "bnnmi/parallel.hpp"
#include "bnnmi/random.hpp"
#include "bnnmi/uncertainty.hpp"

namespace bnnmi::active {

namespace {

// Stream tags for derive_seed; each (run seed, tag, iteration) triple owns an
// independent stream, shared across strategies.
enum Stream : std::uint64_t {
  kInitialSet = 0x1001,
  kTraining = 0x2002,
  kEvaluation = 0x3003,
  kScoring = 0x4004,
};

std::uint64_t stream_seed(std::uint64_t seed, Stream stream, std::uint64_t n) {
  return derive_seed(derive_seed(seed, stream), n);
}

struct Named {
  AcquisitionStrategy strategy;
  std::string_view name;
};

constexpr Named kNames[] = {
    {AcquisitionStrategy::Random, "random"},
    {AcquisitionStrategy::BaldEmpirical, "bald-empirical"},
    {AcquisitionStrategy::BaldAnalytic, "bald-analytic"},
    {AcquisitionStrategy::BabaEmpirical, "baba-empirical"},
    {AcquisitionStrategy::BabaAnalytic, "baba-analytic"},
};

PoolScore score_item(const model::TrainedModel& model, const LabeledDataset& data,
                     std::size_t index, AcquisitionStrategy strategy,
                     std::size_t mc_samples, std::uint64_t seed,
                     const estimation::EstimationConfig& estimation) {
  const std::uint64_t item_seed = derive_seed(seed, index);
  if (strategy == AcquisitionStrategy::Random) {
    Rng rng(item_seed);
    return {index, rng.uniform(), false};
  }
  const auto batch = model::predict_mc(model, data.row(index), mc_samples, item_seed);
  const double empirical = uncertainty::empirical_bald(batch);
  if (strategy == AcquisitionStrategy::BaldEmpirical) return {index, empirical, false};

  try {
    const auto fit = estimation::fixed_point_estimate(batch, estimation);
    const double bald = is_analytic(strategy)
                            ? uncertainty::analytic_mutual_information(fit.alpha)
                            : empirical;
    double score = bald;
    if (strategy == AcquisitionStrategy::BabaEmpirical ||
        strategy == AcquisitionStrategy::BabaAnalytic) {
      score = uncertainty::baba_ratio(bald, uncertainty::mjent(fit.alpha));
    }
    if (std::isfinite(score)) return {index, score, false};
  } catch (const DegenerateError&) {
  } catch (const EstimationError&) {
  } catch (const DomainError&) {
  }
  return {index, empirical, true};
}

}  // namespace

std::string_view to_string(AcquisitionStrategy strategy) {
  for (const auto& n : kNames) {
    if (n.strategy == strategy) return n.name;
  }
  return "unknown";
}

AcquisitionStrategy parse_strategy(std::string_view text) {
  for (const auto& n : kNames) {
    if (n.name == text) return n.strategy;
  }
  throw ParseError("unknown acquisition strategy '" + std::string(text) + "'");
}

bool is_analytic(AcquisitionStrategy strategy) {
  return strategy == AcquisitionStrategy::BaldAnalytic ||
         strategy == AcquisitionStrategy::BabaAnalytic;
}

void ALConfig::validate(AcquisitionStrategy strategy) const {
  if (k < 1) throw DomainError("ALConfig: K must be >= 1");
  if (k_total < initial_size + k) {
    throw DomainError("ALConfig: K_tot must be >= initial_size + K");
  }
  if (initial_size < 1) throw DomainError("ALConfig: initial_size must be >= 1");
  if (mc_samples < 1) throw DomainError("ALConfig: M must be >= 1");
  if (strategy != AcquisitionStrategy::Random &&
      strategy != AcquisitionStrategy::BaldEmpirical && mc_samples < 2) {
    throw DomainError("ALConfig: Dirichlet-based strategies need M >= 2");
  }
  if (seeds.empty()) throw DomainError("ALConfig: need at least one seed");
  model.validate();
  estimation.validate();
}

std::vector<PoolScore> score_pool(const model::TrainedModel& model,
                                  const LabeledDataset& data,
                                  std::span<const std::size_t> pool,
                                  AcquisitionStrategy strategy,
                                  std::size_t mc_samples, std::uint64_t seed,
                                  const estimation::EstimationConfig& estimation,
                                  std::size_t threads) {
  if (pool.empty()) throw DomainError("score_pool: empty pool");
  std::vector<PoolScore> scores(pool.size());
  parallel_for(pool.size(), threads, [&](std::size_t i) {
    scores[i] = score_item(model, data, pool[i], strategy, mc_samples, seed, estimation);
  });
  return scores;
}

std::vector<std::size_t> select_top_k(std::span<const PoolScore> scores,
                                      std::size_t k) {
  if (k > scores.size()) {
    throw DomainError("select_top_k: K = " + std::to_string(k) +
                      " exceeds remaining pool of " + std::to_string(scores.size()));
  }
  std::vector<PoolScore> ranked(scores.begin(), scores.end());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k),
                    ranked.end(), [](const PoolScore& a, const PoolScore& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.index < b.index;
                    });
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(ranked[i].index);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<io::LearningCurveRecord> ALRunResult::curves() const {
  std::vector<io::LearningCurveRecord> all;
  for (const auto& run : runs) all.insert(all.end(), run.curves.begin(), run.curves.end());
  return all;
}

bool ALRunResult::failed() const {
  return std::any_of(runs.begin(), runs.end(),
                     [](const SeedRun& r) { return r.failure.has_value(); });
}

double ALRunResult::mean_final_accuracy() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& run : runs) {
    if (run.curves.empty()) continue;
    sum += run.curves.back().test_accuracy;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

ALRunResult run_active_learning(const LabeledDataset& pool,
                                const LabeledDataset& test_set,
                                const ALConfig& config,
                                AcquisitionStrategy strategy) {
  config.validate(strategy);
  pool.validate();
  test_set.validate();
  if (pool.size() < config.k_total) {
    throw DomainError("run_active_learning: pool of " + std::to_string(pool.size()) +
                      " is smaller than K_tot = " + std::to_string(config.k_total));
  }
  if (test_set.dim != pool.dim) {
    throw DomainError("run_active_learning: test and pool feature dimensions differ");
  }

  ALRunResult result;
  result.strategy = strategy;
  const std::string name(to_string(strategy));
  for (const std::uint64_t seed : config.seeds) {
    SeedRun run;
    run.seed = seed;
    const auto started = std::chrono::steady_clock::now();

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    Rng init_rng(stream_seed(seed, kInitialSet, 0));
    for (std::size_t i = 0; i < config.initial_size; ++i) {
      std::swap(order[i], order[i + init_rng.below(order.size() - i)]);
    }
    std::vector<bool> labeled(pool.size(), false);
    for (std::size_t i = 0; i < config.initial_size; ++i) labeled[order[i]] = true;
    std::size_t labeled_count = config.initial_size;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (labeled[i]) run.initial_indices.push_back(i);
    }

    for (std::size_t iteration = 0;; ++iteration) {
      std::vector<std::size_t> train_idx;
      std::vector<std::size_t> unlabeled;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        (labeled[i] ? train_idx : unlabeled).push_back(i);
      }
      model::TrainedModel trained;
      double accuracy = 0.0;
      try {
        auto model_cfg = config.model;
        model_cfg.seed = stream_seed(seed, kTraining, iteration);
        trained = model::train(pool.subset(train_idx), model_cfg);
        accuracy = model::evaluate(trained, test_set, config.mc_samples,
                                   stream_seed(seed, kEvaluation, iteration));
      } catch (const std::exception& e) {
        run.failure = "iteration " + std::to_string(iteration) + ": " + e.what();
        break;
      }
      const double elapsed =
          config.record_wall_time
              ? std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count()
              : 0.0;
      run.curves.push_back({iteration, labeled_count, name, seed, accuracy, elapsed});
      if (labeled_count >= config.k_total) break;

      const std::size_t take = std::min(config.k, config.k_total - labeled_count);
      const auto scores = score_pool(trained, pool, unlabeled, strategy,
                                     config.mc_samples,
                                     stream_seed(seed, kScoring, iteration),
                                     config.estimation, config.threads);
      for (const auto& s : scores) {
        if (s.fallback) ++run.fallback_count;
        if (config.keep_scores) {
          run.scores.push_back({iteration, s.index, s.score, s.fallback});
        }
      }
      auto chosen = select_top_k(scores, take);
      for (const auto i : chosen) labeled[i] = true;
      labeled_count += chosen.size();
      run.selections.push_back(std::move(chosen));
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DomainError("spearman: need two equal-length samples of size >= 2");
  }
  const auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace bnnmi::active
