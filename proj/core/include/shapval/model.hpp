#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shapval/dataset.hpp"

namespace shapval {

// Hyperparameters for the logistic-regression utility model.
//
// class_weight_positive multiplies the loss contribution of positive-class
// samples. When unset it is derived per training set as
// max(1, #negative / #positive), which counteracts class imbalance the way a
// weighted cross-entropy usually does.
struct TrainConfig {
  double learning_rate = 0.1;
  int max_epochs = 200;
  double l2_penalty = 1e-4;
  std::optional<double> class_weight_positive;  // unset -> automatic
  double convergence_tol = 1e-6;                // stop when |loss delta| drops below

  void validate() const;  // InputError on out-of-range values
  bool operator==(const TrainConfig&) const = default;
};

enum class ModelKind : std::uint8_t { trained, constant };

// Binary classifier: either a trained logistic model or a constant predictor
// (used for empty and single-class training sets).
class Model {
 public:
  static Model constant(Label label);
  static Model trained(std::vector<double> weights, double bias);

  ModelKind kind() const { return kind_; }
  Label constant_label() const;                  // InputError unless constant
  const std::vector<double>& weights() const;    // InputError unless trained
  double bias() const;                           // InputError unless trained
  int dim() const { return static_cast<int>(weights_.size()); }

  // Decision rule: sigmoid(w.x + b) >= 0.5, i.e. the raw score z >= 0; the
  // boundary case predicts positive. Constant models ignore the features.
  Label predict(std::span<const double> features) const;

 private:
  Model() = default;
  ModelKind kind_ = ModelKind::constant;
  Label constant_label_ = Label::negative;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

// Loss value and gradient of the weighted, L2-penalized cross-entropy.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

namespace detail {

// Row-major feature matrix; the single training path shared by fit() and the
// coalition utility evaluator (which assembles coalitions without paying for
// Dataset construction).
struct FlatData {
  int n = 0;
  int d = 0;
  std::vector<double> x;        // n * d, row major
  std::vector<std::uint8_t> y;  // 1 = positive
  int n_positive = 0;
  int n_negative = 0;

  static FlatData from_dataset(const Dataset& data);
  void push_row(std::span<const double> features, Label label);
};

Model fit_flat(const FlatData& train, const TrainConfig& config);

}  // namespace detail

// Average weighted cross-entropy plus 0.5 * l2_penalty * |w|^2 (the bias is
// not penalized), normalized by the total sample weight. Exposed so the
// analytic gradient can be checked against finite differences.
LossGrad weighted_logistic_loss(const detail::FlatData& data,
                                std::span<const double> weights, double bias,
                                double positive_weight, double l2_penalty);

// Full-batch gradient descent from zero-initialized parameters. A pure
// function of (train, config): no hidden state, bit-identical reruns.
// Empty training data yields a constant negative model; single-class data a
// constant model of that class. Throws NumericError if the loss diverges.
Model fit(const Dataset& train, const TrainConfig& config = {});

}  // namespace shapval
