#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sme/baselines.hpp"
#include "sme/dataset.hpp"
#include "sme/numerics.hpp"

namespace sme::mtl {

struct MtlConfig {
  int hidden_units = 16;
  int attn_dim = 8;
  double learning_rate = 0.05;
  int epochs = 300;
  int batch_size = 16;
  double lambda_share = 0.1;
  std::vector<double> task_weights;    // empty means all 1
  std::vector<data::TaskSpec> tasks;   // empty means the dataset's task list
};

// Per-task additive scorer over the global feature pool: feature j is scored
// as u_t . tanh(x_j * A_t[j,:]) and the scores are softmaxed into weights on
// the probability simplex.
struct AttentionBlock {
  std::vector<num::Matrix> A;  // per task: d x attn_dim
  std::vector<num::Vector> u;  // per task: attn_dim

  bool operator==(const AttentionBlock&) const = default;
};

struct TaskHeadInfo {
  data::TaskSpec spec;
  baselines::TargetScaler scaler;  // identity unless the head is regression
  double weight = 1.0;

  bool operator==(const TaskHeadInfo&) const = default;
};

struct MtlModel {
  AttentionBlock attention;
  // Per task: W,b is the soft-shared trunk, V,c the task head.
  std::vector<baselines::DenseNet> nets;
  std::vector<TaskHeadInfo> heads;
  double lambda_share = 0.1;

  std::size_t task_count() const { return nets.size(); }
  std::size_t feature_dim() const { return nets.empty() ? 0 : nets[0].W.cols(); }

  num::Vector attention_weights(const num::Vector& x, std::size_t task) const;

  // Attention-gated input, rescaled by d so uniform attention is an exact
  // identity: x~_j = (d * alpha_j) * x_j.
  num::Vector gated_input(const num::Vector& alpha, const num::Vector& x) const;

  // User-facing per-task outputs: regression in task units, binary a
  // probability, exclusive3 a probability triple.
  std::vector<num::Vector> predict(const num::Vector& x) const;

  bool operator==(const MtlModel&) const = default;
};

struct LossBreakdown {
  std::vector<double> task_losses;  // unweighted per-task data losses
  double sharing_penalty = 0.0;
  double total = 0.0;  // sum of weighted task losses plus the penalty
};

// lambda * sum over task pairs of ||W_t - W_t'||_F^2, trunk biases included.
double soft_sharing_penalty(const MtlModel& model);

// predictions[t][i] and targets[t][i] hold, per head kind: regression values
// (net space), binary probability vs 0/1 label, exclusive3 probabilities vs
// one-hot. Probabilities are clamped at 1e-12 inside the logs.
LossBreakdown mtl_loss(const std::vector<std::vector<num::Vector>>& predictions,
                       const std::vector<std::vector<num::Vector>>& targets,
                       const MtlModel& model);

struct MtlTrainResult {
  MtlModel model;
  std::vector<double> loss_trace;  // entry 0 is the pre-training total loss
};

// Joint minibatch gradient descent over attention, trunks and heads.
// Features are used as given; standardize upstream.
MtlTrainResult train_mtl(const data::Dataset& dataset, const MtlConfig& cfg, std::uint64_t seed);

struct FeatureImportance {
  std::size_t feature = 0;
  std::string name;
  num::Vector per_task;  // mean attention weight per task
  double overall = 0.0;  // task-weighted mean
};

// Descending by overall weight, ties broken by feature index.
std::vector<FeatureImportance> feature_importance(const MtlModel& model,
                                                  const data::Dataset& dataset);

// --- gradient-check surface ------------------------------------------------

struct MtlGrads {
  AttentionBlock attention;
  std::vector<baselines::DenseNet> nets;
};

// Mean data loss over the batch plus the sharing penalty, with analytic
// gradients for every parameter, all evaluated at the model's current
// parameters.
std::pair<LossBreakdown, MtlGrads> mtl_loss_grad(
    const MtlModel& model, const std::vector<num::Vector>& xs,
    const std::vector<std::vector<baselines::NetTarget>>& targets);

num::Vector pack_params(const MtlModel& model);
void unpack_params(const num::Vector& flat, MtlModel& model);
num::Vector pack_grads(const MtlGrads& grads);

// Builds the initialized (untrained) model exactly as train_mtl would.
MtlModel init_model(std::size_t feature_dim, const std::vector<data::TaskSpec>& tasks,
                    const MtlConfig& cfg, std::uint64_t seed);

// Net-space training targets for the configured tasks, plus fitted scalers
// stored into the model heads.
std::vector<std::vector<baselines::NetTarget>> prepare_mtl_targets(const data::Dataset& dataset,
                                                                   MtlModel& model);

}  // namespace sme::mtl
