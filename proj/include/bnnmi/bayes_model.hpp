#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bnnmi/dataset.hpp"
#include "bnnmi/dirichlet.hpp"
#include "bnnmi/random.hpp"

// A one-hidden-layer ReLU classifier with dropout on the hidden layer. Dropout
// stays active at prediction time, so repeated stochastic forward passes give
// Monte-Carlo samples of the predictive probability vector.
namespace bnnmi::model {

struct ModelConfig {
  std::size_t hidden_width = 128;
  double dropout_rate = 0.5;
  double learning_rate = 1e-3;  // Adam step size
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;

  void validate() const;
};

// Weights of input -> hidden -> output in one flat buffer, laid out as
// W1 (hidden x input, row-major), b1 (hidden), W2 (classes x hidden), b2.
class Network {
 public:
  Network() = default;
  Network(std::size_t input_dim, std::size_t hidden, std::size_t classes);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t classes() const { return classes_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return hidden_ * input_dim_; }
  std::size_t w2_offset() const { return b1_offset() + hidden_; }
  std::size_t b2_offset() const { return w2_offset() + classes_ * hidden_; }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void initialize(Rng& rng);

  // Softmax output for one input. `hidden_scale` multiplies each hidden
  // activation (empty means no dropout).
  void forward(std::span<const double> x, std::span<const double> hidden_scale,
               std::span<double> probs) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> params_;
};

// Mean cross-entropy over the rows of `inputs` (row-major, input_dim wide).
// `hidden_scale` is either empty or one row of hidden multipliers per example.
double cross_entropy(const Network& net, std::span<const double> inputs,
                     std::span<const std::size_t> labels,
                     std::span<const double> hidden_scale = {});

// As cross_entropy, also writing d(loss)/d(params) into `gradient`.
double cross_entropy_gradient(const Network& net, std::span<const double> inputs,
                              std::span<const std::size_t> labels,
                              std::span<const double> hidden_scale,
                              std::span<double> gradient);

struct TrainedModel {
  Network network;
  ModelConfig config;
  // Deterministic (dropout-free) training loss before the first update and
  // after each epoch.
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;

  std::size_t classes() const { return network.classes(); }
};

// Mini-batch gradient descent from a fresh seeded initialization.
// Throws TrainingError on an empty set or a non-finite loss.
TrainedModel train(const LabeledDataset& train_set, const ModelConfig& config);

// M forward passes with independently drawn dropout masks.
SampleBatch predict_mc(const TrainedModel& model, std::span<const double> x,
                       std::size_t samples, std::uint64_t seed);

// Fraction of items whose argmax of the MC-averaged probabilities matches the
// label (ties go to the lowest class index).
double evaluate(const TrainedModel& model, const LabeledDataset& test_set,
                std::size_t samples, std::uint64_t seed);

// Text checkpoint:
//   bnnmi-mlp 1
//   input_dim hidden classes
//   hidden_width dropout_rate learning_rate epochs batch_size seed
//   <count> followed by the flat parameters, one hexfloat per line
void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace bnnmi::model
