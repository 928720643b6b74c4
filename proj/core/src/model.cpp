#include "shapval/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "shapval/errors.hpp"

namespace shapval {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InputError("learning_rate must be a positive finite number");
  }
  if (max_epochs < 1) throw InputError("max_epochs must be at least 1");
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) {
    throw InputError("l2_penalty must be a non-negative finite number");
  }
  if (class_weight_positive &&
      (!(*class_weight_positive > 0.0) || !std::isfinite(*class_weight_positive))) {
    throw InputError("class_weight_positive must be a positive finite number");
  }
  if (!(convergence_tol > 0.0) || !std::isfinite(convergence_tol)) {
    throw InputError("convergence_tol must be a positive finite number");
  }
}

Model Model::constant(Label label) {
  Model m;
  m.kind_ = ModelKind::constant;
  m.constant_label_ = label;
  return m;
}

Model Model::trained(std::vector<double> weights, double bias) {
  if (weights.empty()) throw InputError("trained model needs at least one weight");
  for (double w : weights) {
    if (!std::isfinite(w)) throw InputError("trained model weights must be finite");
  }
  if (!std::isfinite(bias)) throw InputError("trained model bias must be finite");
  Model m;
  m.kind_ = ModelKind::trained;
  m.weights_ = std::move(weights);
  m.bias_ = bias;
  return m;
}

Label Model::constant_label() const {
  if (kind_ != ModelKind::constant) {
    throw InputError("constant_label() called on a trained model");
  }
  return constant_label_;
}

const std::vector<double>& Model::weights() const {
  if (kind_ != ModelKind::trained) {
    throw InputError("weights() called on a constant model");
  }
  return weights_;
}

double Model::bias() const {
  if (kind_ != ModelKind::trained) {
    throw InputError("bias() called on a constant model");
  }
  return bias_;
}

Label Model::predict(std::span<const double> features) const {
  if (kind_ == ModelKind::constant) return constant_label_;
  if (features.size() != weights_.size()) {
    throw InputError("feature vector has " + std::to_string(features.size()) +
                     " dimensions, model expects " +
                     std::to_string(weights_.size()));
  }
  double z = bias_;
  for (std::size_t k = 0; k < weights_.size(); ++k) z += weights_[k] * features[k];
  return z >= 0.0 ? Label::positive : Label::negative;
}

namespace detail {

FlatData FlatData::from_dataset(const Dataset& data) {
  FlatData out;
  out.d = data.dim();
  out.x.reserve(static_cast<std::size_t>(data.size()) * data.dim());
  out.y.reserve(data.size());
  for (const DataPoint& p : data.points()) out.push_row(p.features, p.label);
  return out;
}

void FlatData::push_row(std::span<const double> features, Label label) {
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(label == Label::positive ? 1 : 0);
  if (label == Label::positive) {
    ++n_positive;
  } else {
    ++n_negative;
  }
  ++n;
}

}  // namespace detail

namespace {

// Shared evaluator writing into a caller-owned LossGrad so the training loop
// does not allocate per epoch.
void loss_grad_into(const detail::FlatData& data, std::span<const double> w,
                    double bias, double positive_weight, double l2_penalty,
                    LossGrad& out) {
  const int n = data.n;
  const int d = data.d;
  out.grad_weights.assign(static_cast<std::size_t>(d), 0.0);
  double* g = out.grad_weights.data();

  double loss = 0.0;
  double grad_bias = 0.0;
  double total_weight = 0.0;
  const double* row = data.x.data();
  for (int i = 0; i < n; ++i, row += d) {
    double z = bias;
    for (int k = 0; k < d; ++k) z += w[k] * row[k];

    const bool positive = data.y[static_cast<std::size_t>(i)] != 0;
    const double c = positive ? positive_weight : 1.0;

    // Stable cross-entropy: with e = exp(-|z|),
    //   -log sigmoid(z)  =  log1p(e) + max(-z, 0)
    //   -log(1 - sigmoid(z)) = log1p(e) + max(z, 0)
    const double e = std::exp(-std::abs(z));
    const double log_term = std::log1p(e);
    loss += c * (positive ? (z >= 0.0 ? log_term : log_term - z)
                          : (z >= 0.0 ? log_term + z : log_term));

    const double p = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    const double coeff = c * (p - (positive ? 1.0 : 0.0));
    grad_bias += coeff;
    for (int k = 0; k < d; ++k) g[k] += coeff * row[k];
    total_weight += c;
  }

  const double inv = 1.0 / total_weight;
  double squared = 0.0;
  for (int k = 0; k < d; ++k) {
    squared += w[k] * w[k];
    g[k] = g[k] * inv + l2_penalty * w[k];
  }
  out.loss = loss * inv + 0.5 * l2_penalty * squared;
  out.grad_bias = grad_bias * inv;
}

}  // namespace

LossGrad weighted_logistic_loss(const detail::FlatData& data,
                                std::span<const double> weights, double bias,
                                double positive_weight, double l2_penalty) {
  if (data.n == 0) throw InputError("loss is undefined on empty data");
  if (static_cast<int>(weights.size()) != data.d) {
    throw InputError("weight vector does not match the feature dimension");
  }
  LossGrad out;
  loss_grad_into(data, weights, bias, positive_weight, l2_penalty, out);
  return out;
}

namespace detail {

Model fit_flat(const FlatData& train, const TrainConfig& config) {
  config.validate();
  if (train.n == 0) return Model::constant(Label::negative);
  if (train.n_positive == 0) return Model::constant(Label::negative);
  if (train.n_negative == 0) return Model::constant(Label::positive);

  const double positive_weight =
      config.class_weight_positive
          ? *config.class_weight_positive
          : std::max(1.0, static_cast<double>(train.n_negative) /
                              static_cast<double>(train.n_positive));

  std::vector<double> w(static_cast<std::size_t>(train.d), 0.0);
  double bias = 0.0;
  double previous_loss = std::numeric_limits<double>::infinity();
  LossGrad lg;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    loss_grad_into(train, w, bias, positive_weight, config.l2_penalty, lg);
    if (!std::isfinite(lg.loss)) {
      throw NumericError("training loss diverged at epoch " +
                         std::to_string(epoch) + " (learning_rate " +
                         std::to_string(config.learning_rate) + ")");
    }
    for (int k = 0; k < train.d; ++k) {
      w[static_cast<std::size_t>(k)] -=
          config.learning_rate * lg.grad_weights[static_cast<std::size_t>(k)];
    }
    bias -= config.learning_rate * lg.grad_bias;
    if (std::abs(previous_loss - lg.loss) < config.convergence_tol) break;
    previous_loss = lg.loss;
  }

  for (double v : w) {
    if (!std::isfinite(v)) {
      throw NumericError("training produced non-finite weights (learning_rate " +
                         std::to_string(config.learning_rate) + ")");
    }
  }
  if (!std::isfinite(bias)) {
    throw NumericError("training produced a non-finite bias");
  }
  return Model::trained(std::move(w), bias);
}

}  // namespace detail

Model fit(const Dataset& train, const TrainConfig& config) {
  config.validate();
  if (train.empty()) return Model::constant(Label::negative);
  return detail::fit_flat(detail::FlatData::from_dataset(train), config);
}

}  // namespace shapval
