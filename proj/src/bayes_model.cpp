#include "bnnmi/bayes_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "bnnmi/errors.hpp"

namespace bnnmi::model {

void ModelConfig::validate() const {
  if (hidden_width < 1 || epochs < 1 || batch_size < 1) {
    throw DomainError("ModelConfig: counts must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw DomainError("ModelConfig: dropout_rate must be in [0, 1)");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("ModelConfig: learning_rate must be > 0");
  }
}

Network::Network(std::size_t input_dim, std::size_t hidden, std::size_t classes)
    : input_dim_(input_dim),
      hidden_(hidden),
      classes_(classes),
      params_(hidden * input_dim + hidden + classes * hidden + classes, 0.0) {
  if (input_dim == 0 || hidden == 0 || classes < 2) {
    throw DomainError("Network: need input_dim >= 1, hidden >= 1, classes >= 2");
  }
}

void Network::initialize(Rng& rng) {
  std::fill(params_.begin(), params_.end(), 0.0);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  for (std::size_t i = 0; i < hidden_ * input_dim_; ++i) {
    params_[w1_offset() + i] = rng.uniform(-bound1, bound1);
  }
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (std::size_t i = 0; i < classes_ * hidden_; ++i) {
    params_[w2_offset() + i] = rng.uniform(-bound2, bound2);
  }
}

namespace {

// Scratch buffers for one example's forward/backward pass.
struct Activations {
  std::vector<double> pre_hidden;
  std::vector<double> hidden;  // after ReLU and dropout scaling
  std::vector<double> probs;

  explicit Activations(const Network& net)
      : pre_hidden(net.hidden()), hidden(net.hidden()), probs(net.classes()) {}
};

void forward_into(const Network& net, std::span<const double> x,
                  std::span<const double> scale, Activations& act) {
  const auto p = net.params();
  const std::size_t in = net.input_dim();
  const double* w1 = p.data() + net.w1_offset();
  const double* b1 = p.data() + net.b1_offset();
  const double* w2 = p.data() + net.w2_offset();
  const double* b2 = p.data() + net.b2_offset();
  for (std::size_t h = 0; h < net.hidden(); ++h) {
    const double* w = w1 + h * in;
    double z = b1[h];
    for (std::size_t d = 0; d < in; ++d) z += w[d] * x[d];
    act.pre_hidden[h] = z;
    double a = z > 0.0 ? z : 0.0;
    if (!scale.empty()) a *= scale[h];
    act.hidden[h] = a;
  }
  double max_logit = -INFINITY;
  for (std::size_t c = 0; c < net.classes(); ++c) {
    const double* w = w2 + c * net.hidden();
    double z = b2[c];
    for (std::size_t h = 0; h < net.hidden(); ++h) z += w[h] * act.hidden[h];
    act.probs[c] = z;
    max_logit = std::max(max_logit, z);
  }
  double sum = 0.0;
  for (double& z : act.probs) {
    z = std::exp(z - max_logit);
    sum += z;
  }
  for (double& z : act.probs) z /= sum;
}

void check_inputs(const Network& net, std::span<const double> inputs,
                  std::span<const std::size_t> labels,
                  std::span<const double> hidden_scale) {
  if (labels.empty() || inputs.size() != labels.size() * net.input_dim()) {
    throw DomainError("cross_entropy: inputs do not match labels");
  }
  if (!hidden_scale.empty() &&
      hidden_scale.size() != labels.size() * net.hidden()) {
    throw DomainError("cross_entropy: hidden_scale has the wrong size");
  }
  for (const auto y : labels) {
    if (y >= net.classes()) throw DomainError("cross_entropy: label out of range");
  }
}

std::span<const double> scale_row(std::span<const double> hidden_scale,
                                  std::size_t i, std::size_t hidden) {
  if (hidden_scale.empty()) return {};
  return hidden_scale.subspan(i * hidden, hidden);
}

double neg_log(double p) {
  return -std::log(std::max(p, std::numeric_limits<double>::min()));
}

}  // namespace

void Network::forward(std::span<const double> x,
                      std::span<const double> hidden_scale,
                      std::span<double> probs) const {
  if (x.size() != input_dim_) throw DomainError("forward: input dimension mismatch");
  Activations act(*this);
  forward_into(*this, x, hidden_scale, act);
  std::copy(act.probs.begin(), act.probs.end(), probs.begin());
}

double cross_entropy(const Network& net, std::span<const double> inputs,
                     std::span<const std::size_t> labels,
                     std::span<const double> hidden_scale) {
  check_inputs(net, inputs, labels, hidden_scale);
  Activations act(net);
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    forward_into(net, inputs.subspan(i * net.input_dim(), net.input_dim()),
                 scale_row(hidden_scale, i, net.hidden()), act);
    loss += neg_log(act.probs[labels[i]]);
  }
  return loss / static_cast<double>(labels.size());
}

double cross_entropy_gradient(const Network& net, std::span<const double> inputs,
                              std::span<const std::size_t> labels,
                              std::span<const double> hidden_scale,
                              std::span<double> gradient) {
  check_inputs(net, inputs, labels, hidden_scale);
  if (gradient.size() != net.params().size()) {
    throw DomainError("cross_entropy_gradient: gradient buffer size mismatch");
  }
  std::fill(gradient.begin(), gradient.end(), 0.0);
  const std::size_t in = net.input_dim();
  const std::size_t hid = net.hidden();
  const std::size_t classes = net.classes();
  const double* w2 = net.params().data() + net.w2_offset();
  double* g_w1 = gradient.data() + net.w1_offset();
  double* g_b1 = gradient.data() + net.b1_offset();
  double* g_w2 = gradient.data() + net.w2_offset();
  double* g_b2 = gradient.data() + net.b2_offset();

  Activations act(net);
  std::vector<double> d_hidden(hid);
  const double inv_n = 1.0 / static_cast<double>(labels.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto x = inputs.subspan(i * in, in);
    const auto scale = scale_row(hidden_scale, i, hid);
    forward_into(net, x, scale, act);
    loss += neg_log(act.probs[labels[i]]);

    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
      const double d_logit =
          (act.probs[c] - (c == labels[i] ? 1.0 : 0.0)) * inv_n;
      g_b2[c] += d_logit;
      double* gw = g_w2 + c * hid;
      const double* w = w2 + c * hid;
      for (std::size_t h = 0; h < hid; ++h) {
        gw[h] += d_logit * act.hidden[h];
        d_hidden[h] += d_logit * w[h];
      }
    }
    for (std::size_t h = 0; h < hid; ++h) {
      if (act.pre_hidden[h] <= 0.0) continue;
      const double d_pre = scale.empty() ? d_hidden[h] : d_hidden[h] * scale[h];
      if (d_pre == 0.0) continue;
      g_b1[h] += d_pre;
      double* gw = g_w1 + h * in;
      for (std::size_t d = 0; d < in; ++d) gw[d] += d_pre * x[d];
    }
  }
  return loss * inv_n;
}

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

void fill_dropout(Rng& rng, double rate, std::span<double> scale) {
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& s : scale) s = rng.uniform() < rate ? 0.0 : keep_scale;
}

}  // namespace

TrainedModel train(const LabeledDataset& train_set, const ModelConfig& config) {
  if (train_set.size() == 0) throw TrainingError("train: empty training set");
  train_set.validate();
  config.validate();

  TrainedModel model{Network(train_set.dim, config.hidden_width, train_set.classes),
                     config, 0.0, {}};
  Rng rng(config.seed);
  model.network.initialize(rng);
  model.initial_loss =
      cross_entropy(model.network, train_set.features, train_set.labels);

  const std::size_t n = train_set.size();
  const std::size_t hid = config.hidden_width;
  const bool use_dropout = config.dropout_rate > 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> gradient(model.network.params().size());
  std::vector<double> batch_x;
  std::vector<std::size_t> batch_y;
  std::vector<double> batch_scale;
  std::vector<double> first_moment(gradient.size(), 0.0);
  std::vector<double> second_moment(gradient.size(), 0.0);
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      batch_x.clear();
      batch_y.clear();
      for (std::size_t b = start; b < stop; ++b) {
        const auto row = train_set.row(order[b]);
        batch_x.insert(batch_x.end(), row.begin(), row.end());
        batch_y.push_back(train_set.labels[order[b]]);
      }
      batch_scale.assign(use_dropout ? batch_y.size() * hid : 0, 1.0);
      if (use_dropout) fill_dropout(rng, config.dropout_rate, batch_scale);
      const double loss = cross_entropy_gradient(model.network, batch_x, batch_y,
                                                 batch_scale, gradient);
      if (!std::isfinite(loss)) {
        throw TrainingError("train: non-finite loss in epoch " +
                            std::to_string(epoch + 1));
      }
      beta1_power *= kAdamBeta1;
      beta2_power *= kAdamBeta2;
      const double step = config.learning_rate * std::sqrt(1.0 - beta2_power) /
                          (1.0 - beta1_power);
      auto params = model.network.params();
      for (std::size_t k = 0; k < params.size(); ++k) {
        first_moment[k] = kAdamBeta1 * first_moment[k] + (1.0 - kAdamBeta1) * gradient[k];
        second_moment[k] =
            kAdamBeta2 * second_moment[k] + (1.0 - kAdamBeta2) * gradient[k] * gradient[k];
        params[k] -= step * first_moment[k] / (std::sqrt(second_moment[k]) + kAdamEpsilon);
      }
    }
    const double epoch_loss =
        cross_entropy(model.network, train_set.features, train_set.labels);
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("train: non-finite loss after epoch " +
                          std::to_string(epoch + 1));
    }
    model.epoch_losses.push_back(epoch_loss);
  }
  return model;
}

SampleBatch predict_mc(const TrainedModel& model, std::span<const double> x,
                       std::size_t samples, std::uint64_t seed) {
  const Network& net = model.network;
  if (samples < 1) throw DomainError("predict_mc: need at least one sample");
  if (x.size() != net.input_dim()) {
    throw DomainError("predict_mc: input dimension " + std::to_string(x.size()) +
                      " does not match model input " +
                      std::to_string(net.input_dim()));
  }
  const double rate = model.config.dropout_rate;
  Rng rng(seed);
  Activations act(net);
  std::vector<double> scale(rate > 0.0 ? net.hidden() : 0);
  std::vector<double> values;
  values.reserve(samples * net.classes());
  for (std::size_t m = 0; m < samples; ++m) {
    if (rate > 0.0) fill_dropout(rng, rate, scale);
    forward_into(net, x, scale, act);
    values.insert(values.end(), act.probs.begin(), act.probs.end());
  }
  return SampleBatch(net.classes(), std::move(values));
}

double evaluate(const TrainedModel& model, const LabeledDataset& test_set,
                std::size_t samples, std::uint64_t seed) {
  if (test_set.size() == 0) throw DomainError("evaluate: empty test set");
  std::size_t correct = 0;
  std::vector<double> mean(model.classes());
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const auto batch = predict_mc(model, test_set.row(i), samples, derive_seed(seed, i));
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t m = 0; m < batch.size(); ++m) {
      const auto row = batch.row(m);
      for (std::size_t c = 0; c < row.size(); ++c) mean[c] += row[c];
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(mean.begin(), mean.end()) - mean.begin());
    if (best == test_set.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

namespace {
constexpr const char* kCheckpointMagic = "bnnmi-mlp";
constexpr int kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  const auto& net = model.network;
  const auto& cfg = model.config;
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n'
      << net.input_dim() << ' ' << net.hidden() << ' ' << net.classes() << '\n'
      << cfg.hidden_width << ' ' << std::hexfloat << cfg.dropout_rate << ' '
      << cfg.learning_rate << std::defaultfloat << ' ' << cfg.epochs << ' '
      << cfg.batch_size << ' ' << cfg.seed << '\n'
      << net.params().size() << '\n'
      << std::hexfloat;
  for (const double v : net.params()) out << v << '\n';
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

namespace {

double read_hex(std::istream& in, const std::string& context) {
  std::string token;
  if (!(in >> token)) throw ParseError("checkpoint truncated: " + context);
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("checkpoint: bad number '" + token + "' in " + context);
  }
}

}  // namespace

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kCheckpointMagic) {
    throw ParseError("not a bnnmi checkpoint: " + path.string());
  }
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  std::size_t input_dim = 0, hidden = 0, classes = 0;
  ModelConfig cfg;
  std::size_t count = 0;
  if (!(in >> input_dim >> hidden >> classes >> cfg.hidden_width)) {
    throw ParseError("checkpoint header truncated: " + path.string());
  }
  cfg.dropout_rate = read_hex(in, path.string());
  cfg.learning_rate = read_hex(in, path.string());
  if (!(in >> cfg.epochs >> cfg.batch_size >> cfg.seed >> count)) {
    throw ParseError("checkpoint header truncated: " + path.string());
  }
  TrainedModel model{Network(input_dim, hidden, classes), cfg, 0.0, {}};
  if (count != model.network.params().size()) {
    throw ParseError("checkpoint parameter count does not match layer shapes");
  }
  for (double& v : model.network.params()) v = read_hex(in, path.string());
  return model;
}

}  // namespace bnnmi::model
