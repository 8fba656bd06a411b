#include "aertk/probe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "aertk/error.hpp"
#include "aertk/rng.hpp"

namespace aertk {

namespace {

constexpr char kCheckpointMagic[8] = {'A', 'E', 'R', 'T', 'K', 'C', 'K', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::uint32_t kFlagBatchNorm = 1u << 0;
constexpr std::uint32_t kFlagOptimizer = 1u << 1;

void check_dims(std::span<const std::size_t> layer_dims) {
  if (layer_dims.size() < 2) {
    throw ArgumentError("layer_dims needs at least input and output sizes");
  }
  for (const std::size_t dim : layer_dims) {
    if (dim == 0) {
      throw ArgumentError("layer_dims entries must be positive");
    }
  }
}

// z = a * W^T + bias, row-major throughout.
Matrix affine(const Matrix& a, const Matrix& w, const std::vector<double>& bias) {
  Matrix z(a.rows, w.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* in = a.row(i);
    double* out = z.row(i);
    for (std::size_t j = 0; j < w.rows; ++j) {
      const double* wr = w.row(j);
      double sum = bias[j];
      for (std::size_t k = 0; k < w.cols; ++k) {
        sum += in[k] * wr[k];
      }
      out[j] = sum;
    }
  }
  return z;
}

void check_batch(const MlpModel& model, const Matrix& batch) {
  if (batch.cols != model.input_dim()) {
    throw ArgumentError("batch width " + std::to_string(batch.cols) +
                        " does not match input dim " +
                        std::to_string(model.input_dim()));
  }
  if (batch.rows == 0) {
    throw ArgumentError("empty batch");
  }
}

void check_labels(std::span<const int> labels, std::size_t batch,
                  std::size_t classes) {
  if (labels.size() != batch) {
    throw ArgumentError("label count " + std::to_string(labels.size()) +
                        " does not match batch size " + std::to_string(batch));
  }
  for (const int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ArgumentError("label " + std::to_string(label) +
                          " outside [0, " + std::to_string(classes) + ")");
    }
  }
}

// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits) {
  Matrix probs(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* in = logits.row(i);
    double* out = probs.row(i);
    const double peak = *std::max_element(in, in + logits.cols);
    double total = 0.0;
    for (std::size_t c = 0; c < logits.cols; ++c) {
      out[c] = std::exp(in[c] - peak);
      total += out[c];
    }
    for (std::size_t c = 0; c < logits.cols; ++c) {
      out[c] /= total;
    }
  }
  return probs;
}

ParamGrads zeros_like(const MlpModel& model) {
  ParamGrads grads;
  for (const Matrix& w : model.weights) {
    grads.weights.emplace_back(w.rows, w.cols);
  }
  for (const std::vector<double>& b : model.biases) {
    grads.biases.emplace_back(b.size(), 0.0);
  }
  for (const BatchNormParams& bn : model.batchnorm) {
    grads.gamma.emplace_back(bn.gamma.size(), 0.0);
    grads.beta.emplace_back(bn.beta.size(), 0.0);
  }
  return grads;
}

void check_same_shape(const MlpModel& model, const ParamGrads& grads,
                      const char* what = "gradient") {
  if (grads.weights.size() != model.weights.size() ||
      grads.biases.size() != model.biases.size() ||
      grads.gamma.size() != model.batchnorm.size() ||
      grads.beta.size() != model.batchnorm.size()) {
    throw ArgumentError(std::string(what) + " structure does not match the model");
  }
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (grads.weights[l].rows != model.weights[l].rows ||
        grads.weights[l].cols != model.weights[l].cols ||
        grads.biases[l].size() != model.biases[l].size()) {
      throw ArgumentError(std::string(what) + " shape mismatch at layer " +
                          std::to_string(l));
    }
  }
  for (std::size_t l = 0; l < model.batchnorm.size(); ++l) {
    if (grads.gamma[l].size() != model.batchnorm[l].gamma.size() ||
        grads.beta[l].size() != model.batchnorm[l].beta.size()) {
      throw ArgumentError(std::string(what) + " shape mismatch at hidden layer " +
                          std::to_string(l));
    }
  }
}

// Applies fn(parameter array, length, matching m, v, gradient) across every
// parameter tensor in the canonical order.
template <typename Fn>
void for_each_param(MlpModel& model, AdamState& state, const ParamGrads& grads,
                    Fn&& fn) {
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    fn(model.weights[l].data.data(), model.weights[l].data.size(),
       state.m.weights[l].data.data(), state.v.weights[l].data.data(),
       grads.weights[l].data.data());
    fn(model.biases[l].data(), model.biases[l].size(),
       state.m.biases[l].data(), state.v.biases[l].data(),
       grads.biases[l].data());
  }
  for (std::size_t l = 0; l < model.batchnorm.size(); ++l) {
    fn(model.batchnorm[l].gamma.data(), model.batchnorm[l].gamma.size(),
       state.m.gamma[l].data(), state.v.gamma[l].data(), grads.gamma[l].data());
    fn(model.batchnorm[l].beta.data(), model.batchnorm[l].beta.size(),
       state.m.beta[l].data(), state.v.beta[l].data(), grads.beta[l].data());
  }
}

class ByteWriter {
public:
  void raw(const void* data, std::size_t count) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), bytes, bytes + count);
  }
  void u32(std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8) {
      out_.push_back(static_cast<std::uint8_t>((value >> shift) & 0xFF));
    }
  }
  void f64(double value) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
    for (int shift = 0; shift < 64; shift += 8) {
      out_.push_back(static_cast<std::uint8_t>((bits >> shift) & 0xFF));
    }
  }
  void f64_array(std::span<const double> values) {
    for (const double value : values) {
      f64(value);
    }
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

private:
  std::vector<std::uint8_t> out_;
};

class ByteParser {
public:
  explicit ByteParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void raw(void* data, std::size_t count) {
    require(count);
    std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(offset_), count,
                static_cast<std::uint8_t*>(data));
    offset_ += count;
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t value = 0;
    for (int shift = 0; shift < 32; shift += 8) {
      value |= static_cast<std::uint32_t>(bytes_[offset_++]) << shift;
    }
    return value;
  }
  double f64() {
    require(8);
    std::uint64_t bits = 0;
    for (int shift = 0; shift < 64; shift += 8) {
      bits |= static_cast<std::uint64_t>(bytes_[offset_++]) << shift;
    }
    return std::bit_cast<double>(bits);
  }
  void f64_array(std::span<double> values) {
    for (double& value : values) {
      value = f64();
    }
  }
  bool exhausted() const { return offset_ == bytes_.size(); }

private:
  void require(std::size_t count) {
    if (offset_ + count > bytes_.size()) {
      throw DataError("checkpoint truncated at offset " + std::to_string(offset_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

} // namespace

MlpModel he_init(std::span<const std::size_t> layer_dims, std::uint64_t seed,
                 bool with_batchnorm, double dropout_rate) {
  check_dims(layer_dims);
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ArgumentError("dropout_rate must lie in [0, 1)");
  }

  MlpModel model;
  model.layer_dims.assign(layer_dims.begin(), layer_dims.end());
  model.dropout_rate = dropout_rate;

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l];
    const std::size_t fan_out = layer_dims[l + 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (double& value : w.data) {
      value = stddev * rng.normal();
    }
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }

  if (with_batchnorm) {
    for (std::size_t l = 0; l + 2 < layer_dims.size(); ++l) {
      BatchNormParams bn;
      const std::size_t units = layer_dims[l + 1];
      bn.gamma.assign(units, 1.0);
      bn.beta.assign(units, 0.0);
      bn.running_mean.assign(units, 0.0);
      bn.running_var.assign(units, 1.0);
      model.batchnorm.push_back(std::move(bn));
    }
  }
  return model;
}

Matrix forward(const MlpModel& model, const Matrix& batch) {
  check_batch(model, batch);
  Matrix activations = batch;
  for (std::size_t l = 0; l + 1 < model.num_layers(); ++l) {
    Matrix z = affine(activations, model.weights[l], model.biases[l]);
    if (model.has_batchnorm()) {
      const BatchNormParams& bn = model.batchnorm[l];
      for (std::size_t j = 0; j < z.cols; ++j) {
        const double inv_std = 1.0 / std::sqrt(bn.running_var[j] + bn.epsilon);
        for (std::size_t i = 0; i < z.rows; ++i) {
          z(i, j) = bn.gamma[j] * (z(i, j) - bn.running_mean[j]) * inv_std +
                    bn.beta[j];
        }
      }
    }
    for (double& value : z.data) {
      value = std::max(0.0, value);
    }
    activations = std::move(z);
  }
  return affine(activations, model.weights.back(), model.biases.back());
}

Matrix forward(MlpModel& model, const Matrix& batch, std::uint64_t dropout_seed,
               ForwardCache& cache, bool apply_dropout) {
  check_batch(model, batch);
  if (model.has_batchnorm() && batch.rows < 2) {
    throw ArgumentError("training batch norm needs at least 2 samples");
  }

  cache = ForwardCache{};
  cache.batch_size = batch.rows;
  const bool use_dropout = apply_dropout && model.dropout_rate > 0.0;
  Rng rng(dropout_seed);

  Matrix activations = batch;
  for (std::size_t l = 0; l + 1 < model.num_layers(); ++l) {
    cache.inputs.push_back(activations);
    Matrix z = affine(activations, model.weights[l], model.biases[l]);

    if (model.has_batchnorm()) {
      BatchNormParams& bn = model.batchnorm[l];
      const double batch_count = static_cast<double>(z.rows);
      Matrix normalized(z.rows, z.cols);
      std::vector<double> inv_std(z.cols);
      for (std::size_t j = 0; j < z.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < z.rows; ++i) {
          mean += z(i, j);
        }
        mean /= batch_count;
        double var = 0.0;
        for (std::size_t i = 0; i < z.rows; ++i) {
          const double centered = z(i, j) - mean;
          var += centered * centered;
        }
        var /= batch_count;
        inv_std[j] = 1.0 / std::sqrt(var + bn.epsilon);
        for (std::size_t i = 0; i < z.rows; ++i) {
          normalized(i, j) = (z(i, j) - mean) * inv_std[j];
          z(i, j) = bn.gamma[j] * normalized(i, j) + bn.beta[j];
        }
        bn.running_mean[j] = bn.momentum * bn.running_mean[j] + (1.0 - bn.momentum) * mean;
        bn.running_var[j] = bn.momentum * bn.running_var[j] + (1.0 - bn.momentum) * var;
      }
      cache.bn_normalized.push_back(std::move(normalized));
      cache.bn_inv_std.push_back(std::move(inv_std));
    }

    cache.pre_relu.push_back(z);
    for (double& value : z.data) {
      value = std::max(0.0, value);
    }

    if (use_dropout) {
      const double keep_scale = 1.0 / (1.0 - model.dropout_rate);
      Matrix scale(z.rows, z.cols);
      for (std::size_t i = 0; i < z.rows; ++i) {
        for (std::size_t j = 0; j < z.cols; ++j) {
          scale(i, j) = rng.uniform() >= model.dropout_rate ? keep_scale : 0.0;
          z(i, j) *= scale(i, j);
        }
      }
      cache.dropout_scale.push_back(std::move(scale));
    }
    activations = std::move(z);
  }

  cache.inputs.push_back(activations);
  cache.logits = affine(activations, model.weights.back(), model.biases.back());
  cache.valid = true;
  return cache.logits;
}

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  check_labels(labels, logits.rows, logits.cols);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* row = logits.row(i);
    const double peak = *std::max_element(row, row + logits.cols);
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < logits.cols; ++c) {
      sum_exp += std::exp(row[c] - peak);
    }
    total += peak + std::log(sum_exp) - row[static_cast<std::size_t>(labels[i])];
  }
  return total / static_cast<double>(logits.rows);
}

ParamGrads backward(const MlpModel& model, const ForwardCache& cache,
                    std::span<const int> labels) {
  if (!cache.valid) {
    throw ArgumentError("backward needs a cache from a training forward pass");
  }
  check_labels(labels, cache.batch_size, model.num_classes());
  if (cache.inputs.size() != model.num_layers()) {
    throw ArgumentError("cache does not match the model layout");
  }

  const std::size_t batch = cache.batch_size;
  const double inv_batch = 1.0 / static_cast<double>(batch);

  ParamGrads grads = zeros_like(model);

  // d(mean CE)/d(logits) = (softmax - one_hot) / B
  Matrix delta = softmax(cache.logits);
  for (std::size_t i = 0; i < batch; ++i) {
    delta(i, static_cast<std::size_t>(labels[i])) -= 1.0;
  }
  for (double& value : delta.data) {
    value *= inv_batch;
  }

  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const Matrix& input = cache.inputs[l];

    Matrix& dw = grads.weights[l];
    std::vector<double>& db = grads.biases[l];
    for (std::size_t i = 0; i < batch; ++i) {
      const double* in = input.row(i);
      const double* d = delta.row(i);
      for (std::size_t j = 0; j < dw.rows; ++j) {
        if (d[j] == 0.0) continue;
        double* wrow = dw.row(j);
        for (std::size_t k = 0; k < dw.cols; ++k) {
          wrow[k] += d[j] * in[k];
        }
      }
    }
    for (std::size_t i = 0; i < batch; ++i) {
      const double* d = delta.row(i);
      for (std::size_t j = 0; j < db.size(); ++j) {
        db[j] += d[j];
      }
    }
    if (l == 0) break;

    // Gradient w.r.t. this layer's input, then back through the previous
    // hidden layer's dropout / ReLU / batch norm.
    const Matrix& w = model.weights[l];
    Matrix upstream(batch, w.cols);
    for (std::size_t i = 0; i < batch; ++i) {
      const double* d = delta.row(i);
      double* out = upstream.row(i);
      for (std::size_t j = 0; j < w.rows; ++j) {
        if (d[j] == 0.0) continue;
        const double* wrow = w.row(j);
        for (std::size_t k = 0; k < w.cols; ++k) {
          out[k] += d[j] * wrow[k];
        }
      }
    }

    const std::size_t hidden = l - 1;
    if (!cache.dropout_scale.empty()) {
      const Matrix& scale = cache.dropout_scale[hidden];
      for (std::size_t i = 0; i < upstream.data.size(); ++i) {
        upstream.data[i] *= scale.data[i];
      }
    }
    const Matrix& pre = cache.pre_relu[hidden];
    for (std::size_t i = 0; i < upstream.data.size(); ++i) {
      if (pre.data[i] <= 0.0) {
        upstream.data[i] = 0.0;
      }
    }

    if (model.has_batchnorm()) {
      const Matrix& normalized = cache.bn_normalized[hidden];
      const std::vector<double>& inv_std = cache.bn_inv_std[hidden];
      const BatchNormParams& bn = model.batchnorm[hidden];
      Matrix next(batch, upstream.cols);
      for (std::size_t j = 0; j < upstream.cols; ++j) {
        double sum_d = 0.0;
        double sum_dx = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
          const double dxhat = upstream(i, j) * bn.gamma[j];
          sum_d += dxhat;
          sum_dx += dxhat * normalized(i, j);
          grads.beta[hidden][j] += upstream(i, j);
          grads.gamma[hidden][j] += upstream(i, j) * normalized(i, j);
        }
        for (std::size_t i = 0; i < batch; ++i) {
          const double dxhat = upstream(i, j) * bn.gamma[j];
          next(i, j) = inv_std[j] *
                       (dxhat - inv_batch * sum_d -
                        inv_batch * normalized(i, j) * sum_dx);
        }
      }
      delta = std::move(next);
    } else {
      delta = std::move(upstream);
    }
  }
  return grads;
}

AdamState make_adam_state(const MlpModel& model, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.m = zeros_like(model);
  state.v = zeros_like(model);
  return state;
}

void adam_step(AdamState& state, MlpModel& model, const ParamGrads& grads) {
  check_same_shape(model, grads);
  check_same_shape(model, state.m, "optimizer moment");

  state.step += 1;
  const AdamConfig& cfg = state.config;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for_each_param(model, state, grads,
                 [&](double* param, std::size_t count, double* m, double* v,
                     const double* grad) {
                   for (std::size_t i = 0; i < count; ++i) {
                     m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
                     v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
                     const double m_hat = m[i] / bias1;
                     const double v_hat = v[i] / bias2;
                     param[i] -= cfg.learning_rate * m_hat /
                                 (std::sqrt(v_hat) + cfg.epsilon);
                   }
                 });
}

double evaluate(const MlpModel& model, const Matrix& x, std::span<const int> labels) {
  if (x.rows == 0) {
    throw ArgumentError("evaluate needs a non-empty set");
  }
  check_labels(labels, x.rows, model.num_classes());

  std::size_t correct = 0;
  constexpr std::size_t kChunk = 1024;
  for (std::size_t start = 0; start < x.rows; start += kChunk) {
    const std::size_t rows = std::min(kChunk, x.rows - start);
    Matrix chunk(rows, x.cols);
    std::copy_n(x.row(start), rows * x.cols, chunk.data.data());
    const Matrix logits = forward(model, chunk);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = logits.row(i);
      std::size_t best = 0;
      for (std::size_t c = 1; c < logits.cols; ++c) {
        if (row[c] > row[best]) best = c; // ties keep the lowest index
      }
      if (best == static_cast<std::size_t>(labels[start + i])) {
        ++correct;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows);
}

std::vector<EpochStats> train(MlpModel& model, const Matrix& x_train,
                              std::span<const int> y_train, const Matrix& x_val,
                              std::span<const int> y_val,
                              const TrainConfig& config) {
  if (config.epochs == 0 || config.batch_size == 0) {
    throw ArgumentError("epochs and batch_size must be at least 1");
  }
  check_batch(model, x_train);
  check_labels(y_train, x_train.rows, model.num_classes());
  check_labels(y_val, x_val.rows, model.num_classes());

  const std::size_t count = x_train.rows;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);

  // Batch boundaries; a trailing singleton is merged into the previous batch
  // when batch norm is active, which cannot normalize a single sample.
  std::vector<std::size_t> starts;
  for (std::size_t start = 0; start < count; start += config.batch_size) {
    starts.push_back(start);
  }
  if (model.has_batchnorm() && starts.size() > 1 &&
      count - starts.back() == 1) {
    starts.pop_back();
  }

  Rng rng(config.seed);
  AdamState adam = make_adam_state(model, config.adam);
  std::vector<EpochStats> history;
  history.reserve(config.epochs);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) {
      for (std::size_t i = count; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(order[i - 1], order[j]);
      }
    }

    double loss_sum = 0.0;
    for (std::size_t b = 0; b < starts.size(); ++b) {
      const std::size_t begin = starts[b];
      const std::size_t end = (b + 1 < starts.size()) ? starts[b + 1] : count;
      const std::size_t rows = end - begin;

      Matrix batch(rows, x_train.cols);
      std::vector<int> labels(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t src = order[begin + i];
        std::copy_n(x_train.row(src), x_train.cols, batch.row(i));
        labels[i] = y_train[src];
      }

      const std::uint64_t dropout_seed = rng.next_u64();
      ForwardCache cache;
      const Matrix logits =
          forward(model, batch, dropout_seed, cache, config.dropout);
      loss_sum += cross_entropy(logits, labels) * static_cast<double>(rows);
      const ParamGrads grads = backward(model, cache, labels);
      adam_step(adam, model, grads);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(count);
    stats.train_accuracy = evaluate(model, x_train, y_train);
    stats.val_accuracy = evaluate(model, x_val, y_val);
    history.push_back(stats);
  }
  return history;
}

std::vector<std::uint8_t> save_checkpoint(const MlpModel& model,
                                          const AdamState* optimizer) {
  if (optimizer) {
    check_same_shape(model, optimizer->m, "optimizer moment");
    check_same_shape(model, optimizer->v, "optimizer moment");
  }

  ByteWriter writer;
  writer.raw(kCheckpointMagic, sizeof(kCheckpointMagic));
  writer.u32(kCheckpointVersion);
  writer.u32(static_cast<std::uint32_t>(model.layer_dims.size()));
  for (const std::size_t dim : model.layer_dims) {
    writer.u32(static_cast<std::uint32_t>(dim));
  }
  std::uint32_t flags = 0;
  if (model.has_batchnorm()) flags |= kFlagBatchNorm;
  if (optimizer) flags |= kFlagOptimizer;
  writer.u32(flags);
  writer.f64(model.dropout_rate);

  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    writer.f64_array(model.weights[l].data);
    writer.f64_array(model.biases[l]);
  }
  if (model.has_batchnorm()) {
    writer.f64(model.batchnorm.front().momentum);
    writer.f64(model.batchnorm.front().epsilon);
    for (const BatchNormParams& bn : model.batchnorm) {
      writer.f64_array(bn.gamma);
      writer.f64_array(bn.beta);
      writer.f64_array(bn.running_mean);
      writer.f64_array(bn.running_var);
    }
  }
  if (optimizer) {
    const auto write_params = [&](const ParamGrads& params) {
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        writer.f64_array(params.weights[l].data);
        writer.f64_array(params.biases[l]);
      }
      for (std::size_t l = 0; l < params.gamma.size(); ++l) {
        writer.f64_array(params.gamma[l]);
        writer.f64_array(params.beta[l]);
      }
    };
    write_params(optimizer->m);
    write_params(optimizer->v);
    writer.f64(static_cast<double>(optimizer->step));
    writer.f64(optimizer->config.learning_rate);
    writer.f64(optimizer->config.beta1);
    writer.f64(optimizer->config.beta2);
    writer.f64(optimizer->config.epsilon);
  }
  return writer.take();
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteParser parser(bytes);
  char magic[8];
  parser.raw(magic, sizeof(magic));
  if (!std::equal(magic, magic + sizeof(magic), kCheckpointMagic)) {
    throw DataError("bad checkpoint magic");
  }
  const std::uint32_t version = parser.u32();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t dim_count = parser.u32();
  if (dim_count < 2 || dim_count > 64) {
    throw DataError("checkpoint layer count out of range");
  }
  std::vector<std::size_t> dims(dim_count);
  for (std::size_t& dim : dims) {
    dim = parser.u32();
    if (dim == 0) {
      throw DataError("checkpoint has a zero layer dim");
    }
  }
  const std::uint32_t flags = parser.u32();
  const double dropout_rate = parser.f64();
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw DataError("checkpoint dropout rate out of range");
  }

  Checkpoint checkpoint;
  MlpModel& model = checkpoint.model;
  model.layer_dims = dims;
  model.dropout_rate = dropout_rate;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Matrix w(dims[l + 1], dims[l]);
    parser.f64_array(w.data);
    model.weights.push_back(std::move(w));
    std::vector<double> b(dims[l + 1]);
    parser.f64_array(b);
    model.biases.push_back(std::move(b));
  }
  if (flags & kFlagBatchNorm) {
    const double momentum = parser.f64();
    const double epsilon = parser.f64();
    for (std::size_t l = 0; l + 2 < dims.size(); ++l) {
      BatchNormParams bn;
      bn.momentum = momentum;
      bn.epsilon = epsilon;
      const std::size_t units = dims[l + 1];
      bn.gamma.resize(units);
      bn.beta.resize(units);
      bn.running_mean.resize(units);
      bn.running_var.resize(units);
      parser.f64_array(bn.gamma);
      parser.f64_array(bn.beta);
      parser.f64_array(bn.running_mean);
      parser.f64_array(bn.running_var);
      model.batchnorm.push_back(std::move(bn));
    }
  }
  if (flags & kFlagOptimizer) {
    AdamState state = make_adam_state(model);
    const auto read_params = [&](ParamGrads& params) {
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        parser.f64_array(params.weights[l].data);
        parser.f64_array(params.biases[l]);
      }
      for (std::size_t l = 0; l < params.gamma.size(); ++l) {
        parser.f64_array(params.gamma[l]);
        parser.f64_array(params.beta[l]);
      }
    };
    read_params(state.m);
    read_params(state.v);
    state.step = static_cast<std::uint64_t>(parser.f64());
    state.config.learning_rate = parser.f64();
    state.config.beta1 = parser.f64();
    state.config.beta2 = parser.f64();
    state.config.epsilon = parser.f64();
    checkpoint.optimizer = std::move(state);
  }
  if (!parser.exhausted()) {
    throw DataError("checkpoint has trailing bytes");
  }
  return checkpoint;
}

} // namespace aertk
