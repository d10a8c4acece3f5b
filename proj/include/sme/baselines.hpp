#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sme/dataset.hpp"
#include "sme/numerics.hpp"

namespace sme::baselines {

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 300;
  int batch_size = 16;
  double l2 = 0.0;  // used by logistic regression
  std::uint64_t seed = 1;
  int hidden_units = 16;
  // random forest
  int n_trees = 50;
  int max_depth = 8;  // < 0 means unlimited
  bool bootstrap = true;
  // linear SVM / SVR
  double svm_c = 1.0;
  double svr_epsilon = 0.1;
};

// Standardization of regression targets during training; predictions are
// mapped back to task units.
struct TargetScaler {
  double mean = 0.0;
  double scale = 1.0;

  double to_net(double y) const { return (y - mean) / scale; }
  double to_unit(double o) const { return mean + scale * o; }
  bool operator==(const TargetScaler&) const = default;
};

TargetScaler fit_scaler(const std::vector<double>& values);

// Targets for one task, whichever representation the head needs.
struct TaskTargets {
  data::HeadKind kind = data::HeadKind::regression;
  std::vector<double> values;  // regression values or binary 0/1
  std::vector<int> classes;    // exclusive3 class indices
  std::vector<std::string> class_order;

  std::size_t size() const {
    return kind == data::HeadKind::exclusive3 ? classes.size() : values.size();
  }

  static TaskTargets regression(std::vector<double> values);
  static TaskTargets binary(const std::vector<int>& labels);
  static TaskTargets exclusive(std::vector<int> class_indices, std::vector<std::string> order);
};

// ---------------------------------------------------------------------------
// Shared single-hidden-layer core. The multi-task model routes its per-task
// trunks and heads through these same functions, which is what makes its
// single-task reduction exactly reproduce train_mlp_single.

struct DenseNet {
  num::Matrix W;  // hidden x d
  num::Vector b;  // hidden
  num::Matrix V;  // out x hidden
  num::Vector c;  // out

  std::size_t out_dim() const { return c.size(); }
  bool operator==(const DenseNet&) const = default;
};

struct NetTarget {
  double value = 0.0;  // regression (net space) or binary 0/1
  int cls = 0;         // exclusive3
};

struct NetEval {
  num::Vector h;    // tanh hidden activations
  num::Vector out;  // net value / sigmoid probability / softmax probabilities
  double loss = 0.0;
};

NetEval net_forward_loss(const DenseNet& net, const num::Vector& x, data::HeadKind kind,
                         const NetTarget& target);

// Accumulates parameter gradients of the per-instance loss into `grads`
// (same shapes as the net); writes dL/dx into `dx` when non-null.
void net_backward(const DenseNet& net, const num::Vector& x, data::HeadKind kind,
                  const NetTarget& target, const NetEval& eval, DenseNet& grads, num::Vector* dx);

num::Matrix init_weight(std::size_t rows, std::size_t cols, double radius, num::SeededRng& rng);
num::Vector init_bias(std::size_t n, double radius, num::SeededRng& rng);

std::size_t head_out_dim(data::HeadKind kind);

num::Vector pack(const DenseNet& net);
void unpack(const num::Vector& flat, DenseNet& net);

// net -= step * grads, elementwise.
void apply_sgd(DenseNet& net, const DenseNet& grads, double step);

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticModel {
  num::Vector w;
  double b = 0.0;
  double threshold = 0.5;

  double probability(const num::Vector& x) const;
  // class is 1 iff probability > threshold; a tie at the threshold is 0
  std::pair<double, int> predict(const num::Vector& x) const;
};

struct LogisticTrainResult {
  LogisticModel model;
  std::vector<double> loss_trace;
};

LogisticTrainResult train_logistic(const num::Matrix& X, const std::vector<int>& y,
                                   const TrainConfig& cfg);
LogisticTrainResult train_logistic_from(LogisticModel start, const num::Matrix& X,
                                        const std::vector<int>& y, const TrainConfig& cfg);
double logistic_loss(const LogisticModel& model, const num::Matrix& X, const std::vector<int>& y,
                     double l2);
std::pair<num::Vector, double> logistic_grad(const LogisticModel& model, const num::Matrix& X,
                                             const std::vector<int>& y, double l2);

// ---------------------------------------------------------------------------
// Single-task MLP

struct MlpModel {
  DenseNet net;
  data::HeadKind head = data::HeadKind::regression;
  std::vector<std::string> class_order;
  TargetScaler scaler;

  // regression: value in task units; binary: probability; exclusive3: probabilities
  num::Vector predict(const num::Vector& x) const;
};

struct MlpTrainResult {
  MlpModel model;
  std::vector<double> loss_trace;  // entry 0 is the pre-training loss
};

MlpTrainResult train_mlp_single(const num::Matrix& X, const TaskTargets& targets,
                                const TrainConfig& cfg);

// Mean data loss and gradients at the model's current parameters, for the
// finite-difference harness. Regression targets are given in task units and
// standardized with the model's scaler.
std::pair<double, DenseNet> mlp_loss_grad(const MlpModel& model, const num::Matrix& X,
                                          const TaskTargets& targets);

// ---------------------------------------------------------------------------
// Random forest

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf payload: mean or class index

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  double predict(const num::Vector& x) const;
};

struct ForestModel {
  data::HeadKind kind = data::HeadKind::regression;
  int n_classes = 0;
  std::vector<std::string> class_order;
  std::vector<DecisionTree> trees;

  double predict_value(const num::Vector& x) const;  // regression: mean over trees
  int predict_class(const num::Vector& x) const;     // majority vote, ties to lower index
};

ForestModel train_forest(const num::Matrix& X, const TaskTargets& targets, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Linear SVM (primal subgradient) and its one-vs-rest and regression forms

struct SvmModel {
  num::Vector w;
  double b = 0.0;
  double C = 1.0;

  double decision(const num::Vector& x) const;
  int predict(const num::Vector& x) const;  // +1 / -1
};

struct SvmTrainResult {
  SvmModel model;
  std::vector<double> objective_trace;
};

SvmTrainResult train_svm(const num::Matrix& X, const std::vector<int>& y, const TrainConfig& cfg);
double svm_objective(const SvmModel& model, const num::Matrix& X, const std::vector<int>& y);

struct SvmOvrModel {
  std::vector<SvmModel> members;  // one per class, class order fixed
  std::vector<std::string> class_order;

  int predict_class(const num::Vector& x) const;  // argmax score, ties to lower index
};

SvmOvrModel train_svm_ovr(const num::Matrix& X, const std::vector<int>& class_indices,
                          const std::vector<std::string>& class_order, const TrainConfig& cfg);

// Epsilon-insensitive linear regression, the value-predicting counterpart of
// the hinge classifier; targets are standardized internally.
struct SvrModel {
  num::Vector w;
  double b = 0.0;
  double C = 1.0;
  double epsilon = 0.1;
  TargetScaler scaler;

  double predict(const num::Vector& x) const;  // task units
};

struct SvrTrainResult {
  SvrModel model;
  std::vector<double> objective_trace;
};

SvrTrainResult train_svr(const num::Matrix& X, const std::vector<double>& y,
                         const TrainConfig& cfg);

}  // namespace sme::baselines
