#include "sme/mtl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sme/error.hpp"

namespace sme::mtl {
namespace {

constexpr std::uint64_t kAttentionStream = 0xA77;
constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) { return std::min(std::max(p, kProbFloor), 1.0 - kProbFloor); }

struct AttentionCache {
  num::Matrix e;      // d x attn_dim, tanh embeddings
  num::Vector alpha;  // d
  num::Vector gated;  // d
};

AttentionCache attention_forward(const num::Matrix& A, const num::Vector& u,
                                 const num::Vector& x) {
  const std::size_t d = x.size();
  const std::size_t h = u.size();
  AttentionCache cache;
  cache.e = num::Matrix(d, h);
  num::Vector scores(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double* arow = A.row(j);
    double* erow = cache.e.row(j);
    double s = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
      erow[k] = std::tanh(x[j] * arow[k]);
      s += u[k] * erow[k];
    }
    scores[j] = s;
  }
  cache.alpha = num::softmax(scores);
  cache.gated.resize(d);
  const double dd = static_cast<double>(d);
  for (std::size_t j = 0; j < d; ++j) {
    cache.gated[j] = (dd * cache.alpha[j]) * x[j];
  }
  return cache;
}

// Backpropagates dL/d(gated input) into the attention parameters.
void attention_backward(const num::Matrix& A, const num::Vector& u, const num::Vector& x,
                        const AttentionCache& cache, const num::Vector& d_gated,
                        num::Matrix& gA, num::Vector& gu) {
  (void)A;
  const std::size_t d = x.size();
  const std::size_t h = u.size();
  const double dd = static_cast<double>(d);
  num::Vector d_alpha(d);
  for (std::size_t j = 0; j < d; ++j) d_alpha[j] = d_gated[j] * dd * x[j];
  double dot = 0.0;
  for (std::size_t j = 0; j < d; ++j) dot += cache.alpha[j] * d_alpha[j];
  for (std::size_t j = 0; j < d; ++j) {
    const double ds = cache.alpha[j] * (d_alpha[j] - dot);
    const double* erow = cache.e.row(j);
    double* garow = gA.row(j);
    for (std::size_t k = 0; k < h; ++k) {
      gu[k] += ds * erow[k];
      garow[k] += ds * u[k] * (1.0 - erow[k] * erow[k]) * x[j];
    }
  }
}

double task_data_loss(const num::Vector& pred, const num::Vector& target, data::HeadKind kind) {
  switch (kind) {
    case data::HeadKind::regression: {
      const double diff = pred[0] - target[0];
      return diff * diff;
    }
    case data::HeadKind::binary: {
      const double pc = clamp_prob(pred[0]);
      return -(target[0] * std::log(pc) + (1.0 - target[0]) * std::log(1.0 - pc));
    }
    case data::HeadKind::exclusive3: {
      double loss = 0.0;
      for (std::size_t k = 0; k < pred.size(); ++k) {
        if (target[k] == 1.0) loss = -std::log(clamp_prob(pred[k]));
      }
      return loss;
    }
  }
  throw ContractViolation("mtl_loss: unknown head kind");
}

double penalty_of(const MtlModel& model) {
  if (model.task_count() < 2) return 0.0;
  return soft_sharing_penalty(model);
}

void zero_grads(MtlGrads& g) {
  for (auto& A : g.attention.A) std::fill(A.values().begin(), A.values().end(), 0.0);
  for (auto& u : g.attention.u) std::fill(u.begin(), u.end(), 0.0);
  for (auto& net : g.nets) {
    std::fill(net.W.values().begin(), net.W.values().end(), 0.0);
    std::fill(net.b.begin(), net.b.end(), 0.0);
    std::fill(net.V.values().begin(), net.V.values().end(), 0.0);
    std::fill(net.c.begin(), net.c.end(), 0.0);
  }
}

MtlGrads grads_like(const MtlModel& model) {
  MtlGrads g;
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    g.attention.A.emplace_back(model.attention.A[t].rows(), model.attention.A[t].cols());
    g.attention.u.emplace_back(model.attention.u[t].size(), 0.0);
    baselines::DenseNet net;
    net.W = num::Matrix(model.nets[t].W.rows(), model.nets[t].W.cols());
    net.b.assign(model.nets[t].b.size(), 0.0);
    net.V = num::Matrix(model.nets[t].V.rows(), model.nets[t].V.cols());
    net.c.assign(model.nets[t].c.size(), 0.0);
    g.nets.push_back(std::move(net));
  }
  return g;
}

// Gradient of the sharing penalty with respect to trunk weights and biases,
// evaluated at the model's current parameters.
void add_penalty_grads(const MtlModel& model, MtlGrads& grads) {
  const std::size_t T = model.task_count();
  if (T < 2 || model.lambda_share == 0.0) return;
  num::Vector sum_w(model.nets[0].W.size(), 0.0);
  num::Vector sum_b(model.nets[0].b.size(), 0.0);
  for (const auto& net : model.nets) {
    for (std::size_t i = 0; i < sum_w.size(); ++i) sum_w[i] += net.W.values()[i];
    for (std::size_t i = 0; i < sum_b.size(); ++i) sum_b[i] += net.b[i];
  }
  const double tt = static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < sum_w.size(); ++i) {
      grads.nets[t].W.values()[i] +=
          2.0 * model.lambda_share * (tt * model.nets[t].W.values()[i] - sum_w[i]);
    }
    for (std::size_t i = 0; i < sum_b.size(); ++i) {
      grads.nets[t].b[i] += 2.0 * model.lambda_share * (tt * model.nets[t].b[i] - sum_b[i]);
    }
  }
}

std::vector<double> effective_weights(const MtlModel& model) {
  std::vector<double> w(model.task_count());
  for (std::size_t t = 0; t < w.size(); ++t) w[t] = model.heads[t].weight;
  return w;
}

}  // namespace

num::Vector MtlModel::attention_weights(const num::Vector& x, std::size_t task) const {
  if (task >= task_count()) {
    throw ContractViolation("attention_weights: task index " + std::to_string(task) +
                            " out of range");
  }
  if (x.size() != feature_dim()) {
    throw ContractViolation("attention_weights: input has " + std::to_string(x.size()) +
                            " features, model expects " + std::to_string(feature_dim()));
  }
  return attention_forward(attention.A[task], attention.u[task], x).alpha;
}

num::Vector MtlModel::gated_input(const num::Vector& alpha, const num::Vector& x) const {
  num::Vector gated(x.size());
  const double dd = static_cast<double>(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) gated[j] = (dd * alpha[j]) * x[j];
  return gated;
}

std::vector<num::Vector> MtlModel::predict(const num::Vector& x) const {
  if (x.size() != feature_dim()) {
    throw ContractViolation("mtl forward: input has " + std::to_string(x.size()) +
                            " features, model expects " + std::to_string(feature_dim()));
  }
  std::vector<num::Vector> outputs;
  outputs.reserve(task_count());
  baselines::NetTarget dummy;
  for (std::size_t t = 0; t < task_count(); ++t) {
    const auto cache = attention_forward(attention.A[t], attention.u[t], x);
    const auto eval =
        baselines::net_forward_loss(nets[t], cache.gated, heads[t].spec.head_kind, dummy);
    if (heads[t].spec.head_kind == data::HeadKind::regression) {
      outputs.push_back({heads[t].scaler.to_unit(eval.out[0])});
    } else {
      outputs.push_back(eval.out);
    }
  }
  return outputs;
}

double soft_sharing_penalty(const MtlModel& model) {
  const std::size_t T = model.task_count();
  if (T < 2) {
    throw ContractViolation("soft_sharing_penalty: needs at least 2 tasks, got " +
                            std::to_string(T));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = t + 1; s < T; ++s) {
      const auto& wa = model.nets[t].W.values();
      const auto& wb = model.nets[s].W.values();
      for (std::size_t i = 0; i < wa.size(); ++i) {
        const double d = wa[i] - wb[i];
        sum += d * d;
      }
      for (std::size_t i = 0; i < model.nets[t].b.size(); ++i) {
        const double d = model.nets[t].b[i] - model.nets[s].b[i];
        sum += d * d;
      }
    }
  }
  return model.lambda_share * sum;
}

LossBreakdown mtl_loss(const std::vector<std::vector<num::Vector>>& predictions,
                       const std::vector<std::vector<num::Vector>>& targets,
                       const MtlModel& model) {
  if (predictions.size() != model.task_count() || targets.size() != model.task_count()) {
    throw ContractViolation("mtl_loss: prediction/target task count does not match model");
  }
  LossBreakdown breakdown;
  breakdown.task_losses.resize(model.task_count(), 0.0);
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    const std::size_t m = predictions[t].size();
    if (m == 0 || targets[t].size() != m) {
      throw ContractViolation("mtl_loss: task " + model.heads[t].spec.name +
                              " has mismatched or empty batches");
    }
    const auto kind = model.heads[t].spec.head_kind;
    const std::size_t want = baselines::head_out_dim(kind);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (predictions[t][i].size() != want || targets[t][i].size() != want) {
        throw ContractViolation("mtl_loss: task " + model.heads[t].spec.name +
                                " prediction shape does not match head kind");
      }
      acc += task_data_loss(predictions[t][i], targets[t][i], kind);
    }
    breakdown.task_losses[t] = acc / static_cast<double>(m);
  }
  breakdown.sharing_penalty = penalty_of(model);
  const auto weights = effective_weights(model);
  double total = 0.0;
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    total += weights[t] * breakdown.task_losses[t];
  }
  breakdown.total = total + breakdown.sharing_penalty;
  return breakdown;
}

namespace {

// Trunk and head draws come from the caller's main stream (advancing it);
// attention draws come from a derived stream so they never perturb it.
MtlModel init_model_impl(std::size_t feature_dim, const std::vector<data::TaskSpec>& tasks,
                         const MtlConfig& cfg, num::SeededRng& rng) {
  if (tasks.empty()) throw ContractViolation("train_mtl: no tasks configured");
  if (cfg.hidden_units < 1 || cfg.attn_dim < 1 || cfg.learning_rate <= 0 || cfg.epochs < 1 ||
      cfg.batch_size < 1 || cfg.lambda_share < 0) {
    throw ContractViolation("train_mtl: invalid training config");
  }
  if (!cfg.task_weights.empty() && cfg.task_weights.size() != tasks.size()) {
    throw ContractViolation("train_mtl: task_weights count does not match tasks");
  }

  MtlModel model;
  model.lambda_share = cfg.lambda_share;
  num::SeededRng attn_rng = rng.derive(kAttentionStream);

  const std::size_t hidden = static_cast<std::size_t>(cfg.hidden_units);
  const std::size_t attn = static_cast<std::size_t>(cfg.attn_dim);
  const double r_in = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  const double r_hidden = 1.0 / std::sqrt(static_cast<double>(hidden));
  const double r_attn = 1.0 / std::sqrt(static_cast<double>(attn));

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    model.attention.A.push_back(baselines::init_weight(feature_dim, attn, 1.0, attn_rng));
    model.attention.u.push_back(baselines::init_bias(attn, r_attn, attn_rng));
  }
  // One trunk draw copied to every task: the sharing penalty starts at zero
  // and trunks only drift apart where the data pulls them.
  const num::Matrix trunk_w = baselines::init_weight(hidden, feature_dim, r_in, rng);
  const num::Vector trunk_b = baselines::init_bias(hidden, r_in, rng);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    baselines::DenseNet net;
    net.W = trunk_w;
    net.b = trunk_b;
    const std::size_t out = baselines::head_out_dim(tasks[t].head_kind);
    net.V = baselines::init_weight(out, hidden, r_hidden, rng);
    net.c = baselines::init_bias(out, r_hidden, rng);
    model.nets.push_back(std::move(net));

    TaskHeadInfo info;
    info.spec = tasks[t];
    info.weight = cfg.task_weights.empty() ? 1.0 : cfg.task_weights[t];
    model.heads.push_back(std::move(info));
  }
  return model;
}

}  // namespace

MtlModel init_model(std::size_t feature_dim, const std::vector<data::TaskSpec>& tasks,
                    const MtlConfig& cfg, std::uint64_t seed) {
  num::SeededRng rng(seed);
  return init_model_impl(feature_dim, tasks, cfg, rng);
}

std::vector<std::vector<baselines::NetTarget>> prepare_mtl_targets(const data::Dataset& dataset,
                                                                   MtlModel& model) {
  const std::size_t m = dataset.size();
  std::vector<std::vector<baselines::NetTarget>> targets(model.task_count());
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    const auto& spec = model.heads[t].spec;
    targets[t].resize(m);
    const auto value_it = std::find(data::kValueTasks.begin(), data::kValueTasks.end(), spec.name);
    if (spec.head_kind == data::HeadKind::binary) {
      if (spec.name != data::kSurvivalTask) {
        throw ContractViolation("train_mtl: binary head is only defined for task '" +
                                data::kSurvivalTask + "'");
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (!dataset.instances[i].survived_5yr.has_value()) {
          throw ContractViolation("train_mtl: instance '" + dataset.instances[i].id +
                                  "' has no survival flag");
        }
        targets[t][i].value = *dataset.instances[i].survived_5yr ? 1.0 : 0.0;
      }
      continue;
    }
    if (value_it == data::kValueTasks.end()) {
      throw ContractViolation("train_mtl: dataset does not supply task '" + spec.name + "'");
    }
    const std::size_t v = static_cast<std::size_t>(value_it - data::kValueTasks.begin());
    if (spec.head_kind == data::HeadKind::regression) {
      std::vector<double> values(m);
      for (std::size_t i = 0; i < m; ++i) values[i] = dataset.instances[i].values[v];
      model.heads[t].scaler = baselines::fit_scaler(values);
      for (std::size_t i = 0; i < m; ++i) {
        targets[t][i].value = model.heads[t].scaler.to_net(values[i]);
      }
    } else {  // exclusive3
      for (std::size_t i = 0; i < m; ++i) {
        const auto& cls = dataset.instances[i].classes[v];
        const auto it = std::find(spec.class_order.begin(), spec.class_order.end(), cls);
        if (it == spec.class_order.end()) {
          throw ContractViolation("train_mtl: class '" + cls + "' of instance '" +
                                  dataset.instances[i].id + "' not in task order");
        }
        targets[t][i].cls = static_cast<int>(it - spec.class_order.begin());
      }
    }
  }
  return targets;
}

std::pair<LossBreakdown, MtlGrads> mtl_loss_grad(
    const MtlModel& model, const std::vector<num::Vector>& xs,
    const std::vector<std::vector<baselines::NetTarget>>& targets) {
  const std::size_t m = xs.size();
  if (m == 0) throw ContractViolation("mtl_loss_grad: empty batch");
  if (targets.size() != model.task_count()) {
    throw ContractViolation("mtl_loss_grad: target task count does not match model");
  }
  MtlGrads grads = grads_like(model);
  LossBreakdown breakdown;
  breakdown.task_losses.resize(model.task_count(), 0.0);
  num::Vector d_gated(model.feature_dim());
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    const auto kind = model.heads[t].spec.head_kind;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto cache = attention_forward(model.attention.A[t], model.attention.u[t], xs[i]);
      const auto eval = baselines::net_forward_loss(model.nets[t], cache.gated, kind,
                                                    targets[t][i]);
      acc += eval.loss;
      baselines::net_backward(model.nets[t], cache.gated, kind, targets[t][i], eval,
                              grads.nets[t], &d_gated);
      attention_backward(model.attention.A[t], model.attention.u[t], xs[i], cache, d_gated,
                         grads.attention.A[t], grads.attention.u[t]);
    }
    breakdown.task_losses[t] = acc / static_cast<double>(m);
  }
  // Data gradients are batch means scaled by the task weights; the penalty
  // gradient is added unscaled, matching the loss definition.
  const auto weights = effective_weights(model);
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    const double scale = weights[t] / static_cast<double>(m);
    for (double& g : grads.attention.A[t].values()) g *= scale;
    for (double& g : grads.attention.u[t]) g *= scale;
    for (double& g : grads.nets[t].W.values()) g *= scale;
    for (double& g : grads.nets[t].b) g *= scale;
    for (double& g : grads.nets[t].V.values()) g *= scale;
    for (double& g : grads.nets[t].c) g *= scale;
  }
  add_penalty_grads(model, grads);
  breakdown.sharing_penalty = penalty_of(model);
  double total = 0.0;
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    total += weights[t] * breakdown.task_losses[t];
  }
  breakdown.total = total + breakdown.sharing_penalty;
  return {breakdown, grads};
}

MtlTrainResult train_mtl(const data::Dataset& dataset, const MtlConfig& cfg, std::uint64_t seed) {
  const std::size_t m = dataset.size();
  if (m == 0) throw ContractViolation("train_mtl: empty dataset");
  const std::vector<data::TaskSpec> tasks = cfg.tasks.empty() ? dataset.tasks : cfg.tasks;

  // The init/shuffle/batch/update sequence below draws from the rng exactly
  // as train_mlp_single does; with a single task, uniform attention at d=1
  // and no penalty, the two loss traces are bit-identical.
  num::SeededRng rng(seed);
  MtlTrainResult result;
  result.model = init_model_impl(dataset.feature_count(), tasks, cfg, rng);
  MtlModel& model = result.model;
  const auto targets = prepare_mtl_targets(dataset, model);
  const std::size_t T = model.task_count();

  std::vector<num::Vector> xs(m);
  for (std::size_t i = 0; i < m; ++i) xs[i] = dataset.instances[i].features;

  const auto weights = effective_weights(model);
  auto full_loss = [&]() {
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const auto kind = model.heads[t].spec.head_kind;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto cache = attention_forward(model.attention.A[t], model.attention.u[t], xs[i]);
        acc += baselines::net_forward_loss(model.nets[t], cache.gated, kind, targets[t][i]).loss;
      }
      total += weights[t] * (acc / static_cast<double>(m));
    }
    return total + penalty_of(model);
  };

  result.loss_trace.push_back(full_loss());
  MtlGrads grads = grads_like(model);
  MtlGrads penalty_grads = grads_like(model);
  num::Vector d_gated(model.feature_dim());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  const bool penalized = model.lambda_share > 0.0 && T >= 2;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < m; start += bs) {
      const std::size_t end = std::min(start + bs, m);
      zero_grads(grads);
      for (std::size_t t = 0; t < T; ++t) {
        const auto kind = model.heads[t].spec.head_kind;
        for (std::size_t k = start; k < end; ++k) {
          const std::size_t i = order[k];
          const auto cache =
              attention_forward(model.attention.A[t], model.attention.u[t], xs[i]);
          const auto eval =
              baselines::net_forward_loss(model.nets[t], cache.gated, kind, targets[t][i]);
          baselines::net_backward(model.nets[t], cache.gated, kind, targets[t][i], eval,
                                  grads.nets[t], &d_gated);
          attention_backward(model.attention.A[t], model.attention.u[t], xs[i], cache, d_gated,
                             grads.attention.A[t], grads.attention.u[t]);
        }
      }
      if (penalized) {
        zero_grads(penalty_grads);
        add_penalty_grads(model, penalty_grads);
      }
      for (std::size_t t = 0; t < T; ++t) {
        const double step = cfg.learning_rate * weights[t] / static_cast<double>(end - start);
        auto& A = model.attention.A[t].values();
        const auto& gA = grads.attention.A[t].values();
        for (std::size_t i = 0; i < A.size(); ++i) A[i] -= step * gA[i];
        auto& u = model.attention.u[t];
        const auto& gu = grads.attention.u[t];
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= step * gu[i];
        baselines::apply_sgd(model.nets[t], grads.nets[t], step);
      }
      if (penalized) {
        for (std::size_t t = 0; t < T; ++t) {
          auto& W = model.nets[t].W.values();
          const auto& gW = penalty_grads.nets[t].W.values();
          for (std::size_t i = 0; i < W.size(); ++i) W[i] -= cfg.learning_rate * gW[i];
          auto& b = model.nets[t].b;
          const auto& gb = penalty_grads.nets[t].b;
          for (std::size_t i = 0; i < b.size(); ++i) b[i] -= cfg.learning_rate * gb[i];
        }
      }
    }
    const double loss = full_loss();
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("train_mtl: non-finite loss at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

std::vector<FeatureImportance> feature_importance(const MtlModel& model,
                                                  const data::Dataset& dataset) {
  if (dataset.size() == 0) throw ContractViolation("feature_importance: empty dataset");
  const std::size_t d = model.feature_dim();
  const std::size_t T = model.task_count();
  std::vector<num::Vector> per_task(T, num::Vector(d, 0.0));
  for (const auto& inst : dataset.instances) {
    for (std::size_t t = 0; t < T; ++t) {
      const auto alpha = model.attention_weights(inst.features, t);
      for (std::size_t j = 0; j < d; ++j) per_task[t][j] += alpha[j];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(dataset.size());
  for (auto& v : per_task) {
    for (double& x : v) x *= inv_m;
  }
  const auto weights = effective_weights(model);
  const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<FeatureImportance> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    out[j].feature = j;
    out[j].name = j < dataset.schema.size() ? dataset.schema[j].name : std::to_string(j);
    out[j].per_task.resize(T);
    double overall = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      out[j].per_task[t] = per_task[t][j];
      overall += weights[t] * per_task[t][j];
    }
    out[j].overall = overall / weight_sum;
  }
  std::stable_sort(out.begin(), out.end(), [](const FeatureImportance& a,
                                              const FeatureImportance& b) {
    if (a.overall != b.overall) return a.overall > b.overall;
    return a.feature < b.feature;
  });
  return out;
}

num::Vector pack_params(const MtlModel& model) {
  num::Vector flat;
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    flat.insert(flat.end(), model.attention.A[t].values().begin(),
                model.attention.A[t].values().end());
    flat.insert(flat.end(), model.attention.u[t].begin(), model.attention.u[t].end());
  }
  for (const auto& net : model.nets) {
    const auto packed = baselines::pack(net);
    flat.insert(flat.end(), packed.begin(), packed.end());
  }
  return flat;
}

void unpack_params(const num::Vector& flat, MtlModel& model) {
  std::size_t pos = 0;
  auto take = [&](double* dst, std::size_t n) {
    if (pos + n > flat.size()) throw ContractViolation("unpack_params: flat vector too short");
    std::copy(flat.begin() + pos, flat.begin() + pos + n, dst);
    pos += n;
  };
  for (std::size_t t = 0; t < model.task_count(); ++t) {
    take(model.attention.A[t].values().data(), model.attention.A[t].size());
    take(model.attention.u[t].data(), model.attention.u[t].size());
  }
  for (auto& net : model.nets) {
    take(net.W.values().data(), net.W.size());
    take(net.b.data(), net.b.size());
    take(net.V.values().data(), net.V.size());
    take(net.c.data(), net.c.size());
  }
  if (pos != flat.size()) {
    throw ContractViolation("unpack_params: flat vector has extra values");
  }
}

num::Vector pack_grads(const MtlGrads& grads) {
  num::Vector flat;
  for (std::size_t t = 0; t < grads.nets.size(); ++t) {
    flat.insert(flat.end(), grads.attention.A[t].values().begin(),
                grads.attention.A[t].values().end());
    flat.insert(flat.end(), grads.attention.u[t].begin(), grads.attention.u[t].end());
  }
  for (const auto& net : grads.nets) {
    const auto packed = baselines::pack(net);
    flat.insert(flat.end(), packed.begin(), packed.end());
  }
  return flat;
}

}  // namespace sme::mtl
