#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aertk/matrix.hpp"

namespace aertk {

// Per hidden layer batch normalization state. Normalization uses batch
// statistics (biased variance) in training and the running averages in
// inference; running stats follow an exponential moving average with the
// given momentum.
struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.9;
  double epsilon = 1e-5;

  bool operator==(const BatchNormParams&) const = default;
};

// Fully connected softmax classifier. Hidden layers run
// affine -> (batch norm) -> ReLU -> (inverted dropout); the final layer is
// affine only. weights[l] has shape dims[l+1] x dims[l].
struct MlpModel {
  std::vector<std::size_t> layer_dims;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  std::vector<BatchNormParams> batchnorm; // one per hidden layer, or empty
  double dropout_rate = 0.5;              // in [0, 1)

  bool has_batchnorm() const { return !batchnorm.empty(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_hidden() const { return weights.empty() ? 0 : weights.size() - 1; }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t num_classes() const { return layer_dims.back(); }

  bool operator==(const MlpModel&) const = default;
};

// Parameter-shaped bundle: gradients and Adam moments both use it. The
// canonical parameter order is all weights, all biases, then per hidden
// layer gamma and beta.
struct ParamGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  std::vector<std::vector<double>> gamma;
  std::vector<std::vector<double>> beta;

  bool operator==(const ParamGrads&) const = default;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  ParamGrads m;
  ParamGrads v;

  bool operator==(const AdamState&) const = default;
};

// Activations recorded by a training forward pass, consumed by backward().
struct ForwardCache {
  bool valid = false;
  std::size_t batch_size = 0;
  std::vector<Matrix> inputs;        // input to each affine layer
  std::vector<Matrix> bn_normalized; // x-hat per hidden layer (batch norm only)
  std::vector<std::vector<double>> bn_inv_std;
  std::vector<Matrix> pre_relu;      // value fed into ReLU per hidden layer
  std::vector<Matrix> dropout_scale; // kept ? 1/(1-rate) : 0; empty if unused
  Matrix logits;
};

// He initialization: weights ~ Normal(0, sqrt(2 / fan_in)), biases zero,
// gamma 1 / beta 0 when with_batchnorm. Deterministic per seed. layer_dims
// needs at least [d_in, n_classes], all positive.
MlpModel he_init(std::span<const std::size_t> layer_dims, std::uint64_t seed,
                 bool with_batchnorm = true, double dropout_rate = 0.5);

// Inference forward pass: running batch-norm statistics, no dropout.
Matrix forward(const MlpModel& model, const Matrix& batch);

// Training forward pass. Fills the cache, draws dropout masks from
// dropout_seed, and updates the model's running batch-norm statistics.
// Batch normalization requires a batch of at least 2 rows. Dropout can be
// suppressed (apply_dropout = false) without touching the model.
Matrix forward(MlpModel& model, const Matrix& batch, std::uint64_t dropout_seed,
               ForwardCache& cache, bool apply_dropout = true);

// Mean of -log softmax(logits)[label] over the batch, max-subtracted for
// stability. Labels must lie in [0, n_classes).
double cross_entropy(const Matrix& logits, std::span<const int> labels);

// Exact gradients of the mean cross-entropy with respect to every
// parameter, reusing the cache's dropout masks and batch statistics.
ParamGrads backward(const MlpModel& model, const ForwardCache& cache,
                    std::span<const int> labels);

AdamState make_adam_state(const MlpModel& model, const AdamConfig& config = {});

// One Adam update: advances the step counter, refreshes the first and
// second moment estimates, and applies the bias-corrected step to the
// model's parameters in place.
void adam_step(AdamState& state, MlpModel& model, const ParamGrads& grads);

struct TrainConfig {
  std::size_t epochs = 50;    // >= 1
  std::size_t batch_size = 32; // >= 1
  std::uint64_t seed = 0;
  bool shuffle = true;
  bool batchnorm = true; // consulted when constructing the model
  bool dropout = true;
  AdamConfig adam;
};

struct EpochStats {
  std::size_t epoch = 0; // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;

  bool operator==(const EpochStats&) const = default;
};

// Full training loop: seeded shuffling per epoch, Adam updates, one history
// row per epoch with the epoch-mean training loss and end-of-epoch
// accuracies (inference mode). Single-threaded and deterministic per seed.
// When batch normalization is active, a trailing single-sample batch is
// merged into the previous one.
std::vector<EpochStats> train(MlpModel& model, const Matrix& x_train,
                              std::span<const int> y_train, const Matrix& x_val,
                              std::span<const int> y_val,
                              const TrainConfig& config);

// Fraction of argmax(logits) == label, inference mode, ties resolved to the
// lowest class index. An empty set is an ArgumentError.
double evaluate(const MlpModel& model, const Matrix& x, std::span<const int> labels);

// Checkpoint container (all integers and floats little-endian):
//   magic "AERTKCK1", u32 version 1,
//   u32 dim count, u32 layer dims,
//   u32 flags (bit 0: batch norm, bit 1: optimizer state), f64 dropout rate,
//   weights then biases per layer as f64,
//   batch norm: f64 momentum, f64 epsilon, then per hidden layer
//     gamma, beta, running mean, running var,
//   optimizer: first moments then second moments in parameter order,
//     f64 step count, f64 learning rate, f64 beta1, f64 beta2, f64 epsilon.
std::vector<std::uint8_t> save_checkpoint(const MlpModel& model,
                                          const AdamState* optimizer = nullptr);

struct Checkpoint {
  MlpModel model;
  std::optional<AdamState> optimizer;
};

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);

} // namespace aertk
