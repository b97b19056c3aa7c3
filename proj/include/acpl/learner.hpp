// acpl-engine — trainable base learner: feature extractor, head, SGD, EMA
//
// Copyright 2026 the acpl-engine authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "acpl/common.hpp"
#include "acpl/dataset.hpp"
#include "acpl/rng.hpp"
#include "acpl/types.hpp"

namespace acpl {

enum class ExtractorKind { linear, mlp1 };
enum class OptimizerKind { sgd, adam };
enum class WeightInit { zeros, identity, glorot };

inline std::string to_string(ExtractorKind k) { return k == ExtractorKind::linear ? "linear" : "mlp1"; }
inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adam"; }
inline std::string to_string(WeightInit w) {
  switch (w) {
    case WeightInit::zeros: return "zeros";
    case WeightInit::identity: return "identity";
    default: return "glorot";
  }
}

inline ExtractorKind extractor_from_string(const std::string& s) {
  if (s == "linear") return ExtractorKind::linear;
  if (s == "mlp1") return ExtractorKind::mlp1;
  throw ConfigError("unknown extractor '" + s + "' (expected linear or mlp1)");
}
inline OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + s + "' (expected sgd or adam)");
}
inline WeightInit weight_init_from_string(const std::string& s) {
  if (s == "zeros") return WeightInit::zeros;
  if (s == "identity") return WeightInit::identity;
  if (s == "glorot") return WeightInit::glorot;
  throw ConfigError("unknown weight_init '" + s + "' (expected zeros, identity or glorot)");
}

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t batch_size = 16;
  std::size_t warmup_epochs = 30;
  std::size_t stage_epochs = 15;
  OptimizerKind optimizer = OptimizerKind::sgd;
  WeightInit weight_init = WeightInit::glorot;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  }
};

struct LearnerShape {
  std::size_t input_dim = 0;
  std::size_t hidden_units = 0;  // mlp1 only
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
  ExtractorKind extractor = ExtractorKind::linear;

  void validate() const {
    if (input_dim == 0 || feature_dim == 0 || num_classes == 0) {
      throw ConfigError("learner dimensions must be positive");
    }
    if (extractor == ExtractorKind::mlp1 && hidden_units == 0) {
      throw ConfigError("mlp1 extractor needs hidden_units > 0");
    }
  }
};

// ---------------------------------------------------------------------------
// Loss primitives (numerically stable forms)
// ---------------------------------------------------------------------------

namespace detail {

inline void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// -[y log sigma(z) + (1-y) log(1-sigma(z))] without overflow.
inline double bce_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

inline double log_sum_exp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace detail

// Cross-entropy with soft targets (multiclass) or per-class binary
// cross-entropy averaged over classes (multilabel), evaluated on logits.
inline double classification_loss(std::span<const double> logits, const LabelVector& target) {
  if (logits.size() != target.num_classes()) {
    throw ShapeError("logit/label width mismatch");
  }
  if (target.task_kind == TaskKind::multiclass) {
    const double lse = detail::log_sum_exp(logits);
    double mass = 0.0;
    double dot = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
      mass += target.values[j];
      dot += target.values[j] * logits[j];
    }
    return mass * lse - dot;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    sum += detail::bce_logit(logits[j], target.values[j]);
  }
  return sum / static_cast<double>(logits.size());
}

// ---------------------------------------------------------------------------
// BaseLearner
//
// extractor f: R^D -> R^F (linear, or one tanh hidden layer), linear head
// R^F -> R^C, final activation softmax (multiclass) or sigmoid (multilabel).
// Parameters live in one flat vector; the EMA shadow is a same-shape copy.
// ---------------------------------------------------------------------------

class BaseLearner {
 public:
  BaseLearner(LearnerShape shape, TaskKind task, double ema_decay, WeightInit init,
              std::uint64_t seed)
      : shape_(shape), task_(task), ema_decay_(ema_decay) {
    shape_.validate();
    if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) {
      throw ConfigError("ema_decay must lie in [0,1]");
    }
    build_layout();
    params_.assign(param_count_, 0.0);
    initialize(init, seed);
    ema_ = params_;
  }

  const LearnerShape& shape() const { return shape_; }
  TaskKind task_kind() const { return task_; }
  double ema_decay() const { return ema_decay_; }
  std::size_t param_count() const { return param_count_; }

  std::span<const double> params() const { return params_; }
  std::span<const double> ema_params() const { return ema_; }
  void set_params(std::span<const double> p) {
    if (p.size() != param_count_) throw ShapeError("parameter vector has wrong length");
    params_.assign(p.begin(), p.end());
  }
  void set_param(std::size_t i, double v) { params_.at(i) = v; }
  double param(std::size_t i) const { return params_.at(i); }

  void init_ema_to_params() { ema_ = params_; }
  void ema_step() {
    for (std::size_t i = 0; i < param_count_; ++i) {
      ema_[i] = ema_decay_ * ema_[i] + (1.0 - ema_decay_) * params_[i];
    }
  }

  // Penultimate representation used by every KNN operation.
  std::vector<double> extract_features(std::span<const double> x) const {
    return extract_with(params_, x);
  }

  // Probability vector in [0,1]^C; softmax rows sum to 1.
  std::vector<double> predict(std::span<const double> x, bool use_ema = false) const {
    const auto& p = use_ema ? ema_ : params_;
    std::vector<double> logits = head_logits(p, extract_with(p, x));
    if (task_ == TaskKind::multiclass) {
      detail::softmax_inplace(logits);
      return logits;
    }
    for (double& v : logits) v = detail::sigmoid(v);
    return logits;
  }

  double sample_loss(std::span<const double> x, const LabelVector& target) const {
    return classification_loss(head_logits(params_, extract_with(params_, x)), target);
  }

  // Adds weight * dloss/dtheta into grad and returns weight * loss.
  double sample_loss_and_grad(std::span<const double> x, const LabelVector& target,
                              double weight, std::vector<double>& grad) const {
    check_input(x);
    if (target.num_classes() != shape_.num_classes) throw ShapeError("label width mismatch");
    if (grad.size() != param_count_) throw ShapeError("gradient buffer has wrong length");

    // Forward pass, keeping activations.
    std::vector<double> hidden_act;  // mlp1 only
    std::vector<double> features;
    if (shape_.extractor == ExtractorKind::linear) {
      features = linear_forward(params_, off_[0], off_[1], shape_.feature_dim, x);
    } else {
      hidden_act = linear_forward(params_, off_[0], off_[1], shape_.hidden_units, x);
      for (double& v : hidden_act) v = std::tanh(v);
      features = linear_forward(params_, off_[2], off_[3], shape_.feature_dim, hidden_act);
    }
    const std::size_t head_w = off_[layers_ * 2 - 2];
    const std::size_t head_b = off_[layers_ * 2 - 1];
    std::vector<double> logits = linear_forward(params_, head_w, head_b, shape_.num_classes, features);
    const double loss = classification_loss(logits, target);

    // dloss/dlogits.
    const std::size_t c_count = shape_.num_classes;
    std::vector<double> dlogits(c_count);
    if (task_ == TaskKind::multiclass) {
      std::vector<double> probs = logits;
      detail::softmax_inplace(probs);
      double mass = 0.0;
      for (double v : target.values) mass += v;
      for (std::size_t j = 0; j < c_count; ++j) dlogits[j] = mass * probs[j] - target.values[j];
    } else {
      for (std::size_t j = 0; j < c_count; ++j) {
        dlogits[j] = (detail::sigmoid(logits[j]) - target.values[j]) / static_cast<double>(c_count);
      }
    }

    std::vector<double> dfeatures = linear_backward(grad, head_w, head_b, dlogits, features, weight);
    if (shape_.extractor == ExtractorKind::linear) {
      linear_backward(grad, off_[0], off_[1], dfeatures, x, weight);
    } else {
      std::vector<double> dhidden = linear_backward(grad, off_[2], off_[3], dfeatures, hidden_act, weight);
      for (std::size_t j = 0; j < dhidden.size(); ++j) {
        dhidden[j] *= 1.0 - hidden_act[j] * hidden_act[j];
      }
      linear_backward(grad, off_[0], off_[1], dhidden, x, weight);
    }
    return weight * loss;
  }

  // --- checkpoint (bit-exact round trip) ---

  void save_checkpoint(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    write_bytes(out, "ACPLCK01", 8);
    write_u64(out, static_cast<std::uint64_t>(shape_.extractor));
    write_u64(out, static_cast<std::uint64_t>(task_));
    write_u64(out, shape_.input_dim);
    write_u64(out, shape_.hidden_units);
    write_u64(out, shape_.feature_dim);
    write_u64(out, shape_.num_classes);
    write_u64(out, std::bit_cast<std::uint64_t>(ema_decay_));
    write_u64(out, param_count_);
    for (double v : params_) write_u64(out, std::bit_cast<std::uint64_t>(v));
    for (double v : ema_) write_u64(out, std::bit_cast<std::uint64_t>(v));
  }

  static BaseLearner load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "ACPLCK01") {
      throw IoError("'" + path + "' is not a learner checkpoint");
    }
    LearnerShape shape;
    shape.extractor = static_cast<ExtractorKind>(read_u64(in));
    const TaskKind task = static_cast<TaskKind>(read_u64(in));
    shape.input_dim = read_u64(in);
    shape.hidden_units = read_u64(in);
    shape.feature_dim = read_u64(in);
    shape.num_classes = read_u64(in);
    const double decay = std::bit_cast<double>(read_u64(in));
    const std::uint64_t count = read_u64(in);
    BaseLearner learner(shape, task, decay, WeightInit::zeros, 0);
    if (count != learner.param_count_) throw IoError("checkpoint parameter count mismatch");
    for (double& v : learner.params_) v = std::bit_cast<double>(read_u64(in));
    for (double& v : learner.ema_) v = std::bit_cast<double>(read_u64(in));
    if (!in) throw IoError("checkpoint '" + path + "' is truncated");
    return learner;
  }

 private:
  void check_input(std::span<const double> x) const {
    if (x.size() != shape_.input_dim) {
      throw ShapeError("input has length " + std::to_string(x.size()) + ", expected " +
                       std::to_string(shape_.input_dim));
    }
  }

  void build_layout() {
    // Offsets alternate weight/bias per layer, weights row-major.
    std::vector<std::pair<std::size_t, std::size_t>> dims;  // (out, in)
    if (shape_.extractor == ExtractorKind::linear) {
      dims = {{shape_.feature_dim, shape_.input_dim}, {shape_.num_classes, shape_.feature_dim}};
    } else {
      dims = {{shape_.hidden_units, shape_.input_dim},
              {shape_.feature_dim, shape_.hidden_units},
              {shape_.num_classes, shape_.feature_dim}};
    }
    layers_ = dims.size();
    layer_dims_ = dims;
    off_.clear();
    std::size_t off = 0;
    for (auto [out, in] : dims) {
      off_.push_back(off);
      off += out * in;
      off_.push_back(off);
      off += out;
    }
    param_count_ = off;
  }

  void initialize(WeightInit init, std::uint64_t seed) {
    switch (init) {
      case WeightInit::zeros:
        return;
      case WeightInit::identity: {
        if (shape_.extractor != ExtractorKind::linear || shape_.feature_dim != shape_.input_dim) {
          throw ConfigError("identity init needs a linear extractor with feature_dim == input_dim");
        }
        for (std::size_t i = 0; i < shape_.feature_dim; ++i) {
          params_[off_[0] + i * shape_.input_dim + i] = 1.0;
        }
        return;
      }
      case WeightInit::glorot: {
        for (std::size_t l = 0; l < layers_; ++l) {
          Random rng(derive_seed(seed, tag("init-layer") + l));
          const auto [out, in] = layer_dims_[l];
          const double s = std::sqrt(6.0 / static_cast<double>(in + out));
          for (std::size_t i = 0; i < out * in; ++i) {
            params_[off_[2 * l] + i] = rng.uniform(-s, s);
          }
        }
        return;
      }
    }
  }

  std::vector<double> extract_with(const std::vector<double>& p, std::span<const double> x) const {
    check_input(x);
    if (shape_.extractor == ExtractorKind::linear) {
      return linear_forward(p, off_[0], off_[1], shape_.feature_dim, x);
    }
    std::vector<double> h = linear_forward(p, off_[0], off_[1], shape_.hidden_units, x);
    for (double& v : h) v = std::tanh(v);
    return linear_forward(p, off_[2], off_[3], shape_.feature_dim, h);
  }

  std::vector<double> head_logits(const std::vector<double>& p, std::span<const double> f) const {
    return linear_forward(p, off_[layers_ * 2 - 2], off_[layers_ * 2 - 1], shape_.num_classes, f);
  }

  static std::vector<double> linear_forward(const std::vector<double>& p, std::size_t w_off,
                                            std::size_t b_off, std::size_t out_dim,
                                            std::span<const double> x) {
    std::vector<double> out(out_dim);
    const std::size_t in_dim = x.size();
    for (std::size_t i = 0; i < out_dim; ++i) {
      double v = p[b_off + i];
      const double* w = p.data() + w_off + i * in_dim;
      for (std::size_t j = 0; j < in_dim; ++j) v += w[j] * x[j];
      out[i] = v;
    }
    return out;
  }

  // Accumulates weighted layer gradients; returns dloss/dinput.
  std::vector<double> linear_backward(std::vector<double>& grad, std::size_t w_off,
                                      std::size_t b_off, std::span<const double> dout,
                                      std::span<const double> x, double weight) const {
    const std::size_t out_dim = dout.size();
    const std::size_t in_dim = x.size();
    std::vector<double> dx(in_dim, 0.0);
    for (std::size_t i = 0; i < out_dim; ++i) {
      const double g = dout[i];
      grad[b_off + i] += weight * g;
      double* gw = grad.data() + w_off + i * in_dim;
      const double* w = params_.data() + w_off + i * in_dim;
      for (std::size_t j = 0; j < in_dim; ++j) {
        gw[j] += weight * g * x[j];
        dx[j] += w[j] * g;
      }
    }
    return dx;
  }

  static void write_bytes(std::ofstream& out, const char* data, std::size_t n) {
    out.write(data, static_cast<std::streamsize>(n));
  }
  static void write_u64(std::ofstream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
  }
  static std::uint64_t read_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  LearnerShape shape_;
  TaskKind task_;
  double ema_decay_;
  std::size_t layers_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> layer_dims_;
  std::vector<std::size_t> off_;
  std::size_t param_count_ = 0;
  std::vector<double> params_;
  std::vector<double> ema_;
};

// ---------------------------------------------------------------------------
// Training loops
//
// The joint objective is the sum of the labelled-set average loss and the
// pseudo-set average loss. Each epoch iterates both sets as one shuffled
// pool; per-sample weights 1/|D_L| and 1/|D_S| make the epoch-summed
// gradient equal the full objective's gradient.
// ---------------------------------------------------------------------------

namespace detail {

struct WeightedRef {
  const Sample* sample;
  double weight;
};

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, std::size_t n) : kind_(kind), lr_(lr) {
    if (kind_ == OptimizerKind::adam) {
      m_.assign(n, 0.0);
      v_.assign(n, 0.0);
    }
  }

  void step(BaseLearner& learner, const std::vector<double>& grad) {
    const std::size_t n = grad.size();
    if (kind_ == OptimizerKind::sgd) {
      for (std::size_t i = 0; i < n; ++i) {
        learner.set_param(i, learner.param(i) - lr_ * grad[i]);
      }
      return;
    }
    ++t_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < n; ++i) {
      m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
      v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
      const double update = (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
      learner.set_param(i, learner.param(i) - lr_ * update);
    }
  }

 private:
  OptimizerKind kind_;
  double lr_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

inline void run_epochs(BaseLearner& learner, const std::vector<WeightedRef>& pool,
                       std::size_t epochs, const TrainConfig& cfg, std::uint64_t stream_seed,
                       bool track_ema) {
  Random rng(stream_seed);
  Optimizer opt(cfg.optimizer, cfg.learning_rate, learner.param_count());
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(learner.param_count(), 0.0);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const auto& ref = pool[order[i]];
        learner.sample_loss_and_grad(ref.sample->features, *ref.sample->label, ref.weight, grad);
      }
      opt.step(learner, grad);
      if (track_ema) learner.ema_step();
    }
  }
}

}  // namespace detail

inline void warmup_train(BaseLearner& learner, const DataPools& pools, const TrainConfig& cfg) {
  cfg.validate();
  if (pools.labelled().empty()) throw TrainingError("warm-up requires a nonempty labelled pool");
  if (!pools.pseudo().empty()) throw TrainingError("warm-up expects an empty pseudo set");
  std::vector<detail::WeightedRef> pool;
  pool.reserve(pools.labelled().size());
  const double w = 1.0 / static_cast<double>(pools.labelled().size());
  for (const auto& s : pools.labelled()) pool.push_back({&s, w});
  detail::run_epochs(learner, pool, cfg.warmup_epochs, cfg,
                     derive_seed(cfg.seed, tag("warmup")), /*track_ema=*/false);
  learner.init_ema_to_params();
}

inline void train_stage(BaseLearner& learner, const DataPools& pools, const TrainConfig& cfg) {
  cfg.validate();
  if (pools.labelled().empty()) throw TrainingError("stage training requires a nonempty labelled pool");
  std::vector<detail::WeightedRef> pool;
  pool.reserve(pools.labelled().size() + pools.pseudo().size());
  const double wl = 1.0 / static_cast<double>(pools.labelled().size());
  for (const auto& s : pools.labelled()) pool.push_back({&s, wl});
  if (!pools.pseudo().empty()) {
    const double ws = 1.0 / static_cast<double>(pools.pseudo().size());
    for (const auto& s : pools.pseudo()) pool.push_back({&s, ws});
  }
  detail::run_epochs(learner, pool, cfg.stage_epochs, cfg,
                     derive_seed(cfg.seed, tag("stage-train")), /*track_ema=*/true);
}

// Joint objective value at the learner's current parameters.
inline double acpl_loss(const BaseLearner& learner, const DataPools& pools) {
  if (pools.labelled().empty()) throw TrainingError("loss needs a nonempty labelled pool");
  double total = 0.0;
  for (const auto& s : pools.labelled()) {
    total += learner.sample_loss(s.features, *s.label) /
             static_cast<double>(pools.labelled().size());
  }
  for (const auto& s : pools.pseudo()) {
    total += learner.sample_loss(s.features, *s.label) /
             static_cast<double>(pools.pseudo().size());
  }
  return total;
}

// Full-batch analytic gradient of the joint objective.
inline std::vector<double> acpl_loss_gradient(const BaseLearner& learner, const DataPools& pools) {
  if (pools.labelled().empty()) throw TrainingError("gradient needs a nonempty labelled pool");
  std::vector<double> grad(learner.param_count(), 0.0);
  const double wl = 1.0 / static_cast<double>(pools.labelled().size());
  for (const auto& s : pools.labelled()) {
    learner.sample_loss_and_grad(s.features, *s.label, wl, grad);
  }
  if (!pools.pseudo().empty()) {
    const double ws = 1.0 / static_cast<double>(pools.pseudo().size());
    for (const auto& s : pools.pseudo()) {
      learner.sample_loss_and_grad(s.features, *s.label, ws, grad);
    }
  }
  return grad;
}

}  // namespace acpl
