#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bnnmi/dataset.hpp"
#include "bnnmi/dirichlet.hpp"

namespace bnnmi::io {

// IDX containers as shipped with MNIST/EMNIST: big-endian 32-bit magic,
// big-endian 32-bit dimension sizes, raw uint8 payload.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

class IdxError : public std::runtime_error {
 public:
  enum class Kind { WrongMagic, Truncated, CountMismatch, Io };

  IdxError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;
};

IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);
void write_idx_images(const IdxImages& images, const std::filesystem::path& path);
void write_idx_labels(const std::vector<std::uint8_t>& labels,
                      const std::filesystem::path& path);

// Images scaled to [0, 1] by /255, labels kept as 0-based class indices. The
// class count is one more than the largest label present. `transpose` flips
// each image about its diagonal (EMNIST stores images transposed).
LabeledDataset read_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path,
                        bool transpose = false);

// Inverse of read_idx for datasets whose features are k/255 values.
void write_idx(const LabeledDataset& dataset, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

// Isotropic Gaussian clusters. Class c is centred on +-e_(c/2 mod dim)
// scaled by `radius` (sign alternating with c), with c/(2 dim) extra radius
// shells when there are more classes than axis directions. Rows interleave
// classes, so any prefix is balanced.
LabeledDataset synth_blobs(std::size_t classes, std::size_t n_per_class,
                           std::size_t dim, double spread, std::uint64_t seed,
                           double radius = 1.0);

// `count` rows drawn without replacement (seeded), in ascending index order.
LabeledDataset subsample(const LabeledDataset& dataset, std::size_t count,
                         std::uint64_t seed);

struct LearningCurveRecord {
  std::size_t iteration = 0;
  std::size_t labeled_count = 0;
  std::string strategy;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double wall_time_s = 0.0;

  friend bool operator==(const LearningCurveRecord&,
                         const LearningCurveRecord&) = default;
};

inline constexpr const char* kCurvesHeader =
    "strategy,seed,iteration,labeled_count,test_accuracy,wall_time_s";

// CSV sorted by (strategy, seed, iteration). Accuracy is written with 17
// significant digits so read_curves restores it exactly.
void write_curves(std::vector<LearningCurveRecord> records,
                  const std::filesystem::path& path);
std::vector<LearningCurveRecord> read_curves(const std::filesystem::path& path);

// M rows of C probabilities, comma-separated, optional non-numeric header
// line. Each row must be non-negative and sum to 1 within `tolerance`; rows
// are renormalised before being stored. Throws ParseError on malformed input.
SampleBatch read_samples_csv(const std::filesystem::path& path,
                             double tolerance = 1e-6);
void write_samples_csv(const SampleBatch& batch, const std::filesystem::path& path);

struct ScoreRow {
  std::size_t iteration = 0;
  std::size_t pool_index = 0;
  double score = 0.0;
  bool fallback = false;
};

// iteration,pool_index,score,fallback
void write_scores(const std::vector<ScoreRow>& rows,
                  const std::filesystem::path& path);

// Comma-separated list of doubles, e.g. "1,2.5,3". Throws ParseError.
std::vector<double> parse_real_list(const std::string& text);

}  // namespace bnnmi::io
