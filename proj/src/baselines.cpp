#include "sme/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sme/error.hpp"

namespace sme::baselines {
namespace {

constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) { return std::min(std::max(p, kProbFloor), 1.0 - kProbFloor); }

void check_rows(const num::Matrix& X, std::size_t n, const char* op) {
  if (X.rows() != n) {
    throw ContractViolation(std::string(op) + ": " + std::to_string(X.rows()) +
                            " rows vs " + std::to_string(n) + " targets");
  }
}

num::Vector row_vec(const num::Matrix& X, std::size_t i) {
  return num::Vector(X.row(i), X.row(i) + X.cols());
}

}  // namespace

TargetScaler fit_scaler(const std::vector<double>& values) {
  TargetScaler s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    sq += d * d;
  }
  const double stddev = std::sqrt(sq / static_cast<double>(values.size()));
  s.scale = stddev == 0.0 ? 1.0 : stddev;
  return s;
}

TaskTargets TaskTargets::regression(std::vector<double> values) {
  TaskTargets t;
  t.kind = data::HeadKind::regression;
  t.values = std::move(values);
  return t;
}

TaskTargets TaskTargets::binary(const std::vector<int>& labels) {
  TaskTargets t;
  t.kind = data::HeadKind::binary;
  t.values.reserve(labels.size());
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw ContractViolation("TaskTargets::binary: label " + std::to_string(y) +
                              " is not in {0,1}");
    }
    t.values.push_back(static_cast<double>(y));
  }
  return t;
}

TaskTargets TaskTargets::exclusive(std::vector<int> class_indices,
                                   std::vector<std::string> order) {
  if (order.size() != 3) {
    throw ContractViolation("TaskTargets::exclusive: class order must have 3 entries");
  }
  for (int c : class_indices) {
    if (c < 0 || c >= 3) {
      throw ContractViolation("TaskTargets::exclusive: class index " + std::to_string(c) +
                              " out of range");
    }
  }
  TaskTargets t;
  t.kind = data::HeadKind::exclusive3;
  t.classes = std::move(class_indices);
  t.class_order = std::move(order);
  return t;
}

std::size_t head_out_dim(data::HeadKind kind) {
  return kind == data::HeadKind::exclusive3 ? 3 : 1;
}

num::Matrix init_weight(std::size_t rows, std::size_t cols, double radius, num::SeededRng& rng) {
  num::Matrix w(rows, cols);
  for (double& v : w.values()) v = rng.uniform(-radius, radius);
  return w;
}

num::Vector init_bias(std::size_t n, double radius, num::SeededRng& rng) {
  num::Vector b(n);
  for (double& v : b) v = rng.uniform(-radius, radius);
  return b;
}

NetEval net_forward_loss(const DenseNet& net, const num::Vector& x, data::HeadKind kind,
                         const NetTarget& target) {
  NetEval eval;
  eval.h.resize(net.b.size());
  for (std::size_t r = 0; r < net.b.size(); ++r) {
    double acc = net.b[r];
    const double* wr = net.W.row(r);
    for (std::size_t j = 0; j < x.size(); ++j) acc += wr[j] * x[j];
    eval.h[r] = std::tanh(acc);
  }
  num::Vector z(net.c.size());
  for (std::size_t r = 0; r < net.c.size(); ++r) {
    double acc = net.c[r];
    const double* vr = net.V.row(r);
    for (std::size_t j = 0; j < eval.h.size(); ++j) acc += vr[j] * eval.h[j];
    z[r] = acc;
  }
  switch (kind) {
    case data::HeadKind::regression: {
      eval.out = {z[0]};
      const double diff = z[0] - target.value;
      eval.loss = diff * diff;
      break;
    }
    case data::HeadKind::binary: {
      const double p = num::sigmoid(z[0]);
      eval.out = {p};
      const double pc = clamp_prob(p);
      eval.loss = -(target.value * std::log(pc) + (1.0 - target.value) * std::log(1.0 - pc));
      break;
    }
    case data::HeadKind::exclusive3: {
      eval.out = num::softmax(z);
      eval.loss = -std::log(clamp_prob(eval.out[target.cls]));
      break;
    }
  }
  return eval;
}

void net_backward(const DenseNet& net, const num::Vector& x, data::HeadKind kind,
                  const NetTarget& target, const NetEval& eval, DenseNet& grads,
                  num::Vector* dx) {
  num::Vector dz(net.c.size());
  switch (kind) {
    case data::HeadKind::regression:
      dz[0] = 2.0 * (eval.out[0] - target.value);
      break;
    case data::HeadKind::binary:
      dz[0] = eval.out[0] - target.value;
      break;
    case data::HeadKind::exclusive3:
      for (std::size_t k = 0; k < dz.size(); ++k) {
        dz[k] = eval.out[k] - (static_cast<int>(k) == target.cls ? 1.0 : 0.0);
      }
      break;
  }
  num::Vector dh(eval.h.size(), 0.0);
  for (std::size_t r = 0; r < dz.size(); ++r) {
    grads.c[r] += dz[r];
    double* gvr = grads.V.row(r);
    const double* vr = net.V.row(r);
    for (std::size_t j = 0; j < eval.h.size(); ++j) {
      gvr[j] += dz[r] * eval.h[j];
      dh[j] += vr[j] * dz[r];
    }
  }
  if (dx) std::fill(dx->begin(), dx->end(), 0.0);
  for (std::size_t r = 0; r < dh.size(); ++r) {
    const double dpre = dh[r] * (1.0 - eval.h[r] * eval.h[r]);
    grads.b[r] += dpre;
    double* gwr = grads.W.row(r);
    const double* wr = net.W.row(r);
    for (std::size_t j = 0; j < x.size(); ++j) {
      gwr[j] += dpre * x[j];
      if (dx) (*dx)[j] += wr[j] * dpre;
    }
  }
}

num::Vector pack(const DenseNet& net) {
  num::Vector flat;
  flat.reserve(net.W.size() + net.b.size() + net.V.size() + net.c.size());
  flat.insert(flat.end(), net.W.values().begin(), net.W.values().end());
  flat.insert(flat.end(), net.b.begin(), net.b.end());
  flat.insert(flat.end(), net.V.values().begin(), net.V.values().end());
  flat.insert(flat.end(), net.c.begin(), net.c.end());
  return flat;
}

void unpack(const num::Vector& flat, DenseNet& net) {
  const std::size_t need = net.W.size() + net.b.size() + net.V.size() + net.c.size();
  if (flat.size() != need) {
    throw ContractViolation("unpack: expected " + std::to_string(need) + " values, got " +
                            std::to_string(flat.size()));
  }
  auto it = flat.begin();
  std::copy(it, it + net.W.size(), net.W.values().begin());
  it += net.W.size();
  std::copy(it, it + net.b.size(), net.b.begin());
  it += net.b.size();
  std::copy(it, it + net.V.size(), net.V.values().begin());
  it += net.V.size();
  std::copy(it, it + net.c.size(), net.c.begin());
}

// ---------------------------------------------------------------------------
// Logistic regression

double LogisticModel::probability(const num::Vector& x) const {
  if (x.size() != w.size()) {
    throw ContractViolation("predict_logistic: input has " + std::to_string(x.size()) +
                            " features, model expects " + std::to_string(w.size()));
  }
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return num::sigmoid(z);
}

std::pair<double, int> LogisticModel::predict(const num::Vector& x) const {
  const double p = probability(x);
  return {p, p > threshold ? 1 : 0};
}

double logistic_loss(const LogisticModel& model, const num::Matrix& X, const std::vector<int>& y,
                     double l2) {
  check_rows(X, y.size(), "logistic_loss");
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = clamp_prob(model.probability(row_vec(X, i)));
    loss += -(y[i] * std::log(p) + (1 - y[i]) * std::log(1.0 - p));
  }
  loss /= static_cast<double>(y.size());
  for (double wj : model.w) loss += l2 * wj * wj;
  return loss;
}

std::pair<num::Vector, double> logistic_grad(const LogisticModel& model, const num::Matrix& X,
                                             const std::vector<int>& y, double l2) {
  check_rows(X, y.size(), "logistic_grad");
  num::Vector dw(model.w.size(), 0.0);
  double db = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double err = model.probability(row_vec(X, i)) - static_cast<double>(y[i]);
    const double* xi = X.row(i);
    for (std::size_t j = 0; j < dw.size(); ++j) dw[j] += err * xi[j];
    db += err;
  }
  const double inv_m = 1.0 / static_cast<double>(y.size());
  for (std::size_t j = 0; j < dw.size(); ++j) dw[j] = dw[j] * inv_m + 2.0 * l2 * model.w[j];
  return {dw, db * inv_m};
}

LogisticTrainResult train_logistic_from(LogisticModel start, const num::Matrix& X,
                                        const std::vector<int>& y, const TrainConfig& cfg) {
  if (y.empty()) throw ContractViolation("train_logistic: empty training set");
  check_rows(X, y.size(), "train_logistic");
  for (int yi : y) {
    if (yi != 0 && yi != 1) {
      throw ContractViolation("train_logistic: label " + std::to_string(yi) + " is not in {0,1}");
    }
  }
  LogisticTrainResult result;
  result.model = std::move(start);
  if (result.model.w.empty()) {
    result.model.w.assign(X.cols(), 0.0);
  } else if (result.model.w.size() != X.cols()) {
    throw ContractViolation("train_logistic: start model has " +
                            std::to_string(result.model.w.size()) + " weights, data has " +
                            std::to_string(X.cols()) + " features");
  }
  result.loss_trace.push_back(logistic_loss(result.model, X, y, cfg.l2));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto [dw, db] = logistic_grad(result.model, X, y, cfg.l2);
    for (std::size_t j = 0; j < dw.size(); ++j) result.model.w[j] -= cfg.learning_rate * dw[j];
    result.model.b -= cfg.learning_rate * db;
    const double loss = logistic_loss(result.model, X, y, cfg.l2);
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("train_logistic: non-finite loss at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

LogisticTrainResult train_logistic(const num::Matrix& X, const std::vector<int>& y,
                                   const TrainConfig& cfg) {
  LogisticModel zero;
  zero.w.assign(X.cols(), 0.0);
  return train_logistic_from(std::move(zero), X, y, cfg);
}

// ---------------------------------------------------------------------------
// Single-task MLP

num::Vector MlpModel::predict(const num::Vector& x) const {
  NetTarget dummy;
  const NetEval eval = net_forward_loss(net, x, head, dummy);
  if (head == data::HeadKind::regression) return {scaler.to_unit(eval.out[0])};
  return eval.out;
}

namespace {

std::vector<NetTarget> prepare_targets(const TaskTargets& targets, const TargetScaler& scaler) {
  std::vector<NetTarget> prepared(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    switch (targets.kind) {
      case data::HeadKind::regression:
        prepared[i].value = scaler.to_net(targets.values[i]);
        break;
      case data::HeadKind::binary:
        prepared[i].value = targets.values[i];
        break;
      case data::HeadKind::exclusive3:
        prepared[i].cls = targets.classes[i];
        break;
    }
  }
  return prepared;
}

DenseNet zero_like(const DenseNet& net) {
  DenseNet g;
  g.W = num::Matrix(net.W.rows(), net.W.cols());
  g.b.assign(net.b.size(), 0.0);
  g.V = num::Matrix(net.V.rows(), net.V.cols());
  g.c.assign(net.c.size(), 0.0);
  return g;
}

void zero_grads(DenseNet& g) {
  std::fill(g.W.values().begin(), g.W.values().end(), 0.0);
  std::fill(g.b.begin(), g.b.end(), 0.0);
  std::fill(g.V.values().begin(), g.V.values().end(), 0.0);
  std::fill(g.c.begin(), g.c.end(), 0.0);
}

void sgd_step(num::Vector& params, const num::Vector& grads, double step) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= step * grads[i];
}

}  // namespace

void apply_sgd(DenseNet& net, const DenseNet& grads, double step) {
  sgd_step(net.W.values(), grads.W.values(), step);
  sgd_step(net.b, grads.b, step);
  sgd_step(net.V.values(), grads.V.values(), step);
  sgd_step(net.c, grads.c, step);
}

MlpTrainResult train_mlp_single(const num::Matrix& X, const TaskTargets& targets,
                                const TrainConfig& cfg) {
  const std::size_t m = targets.size();
  if (m == 0) throw ContractViolation("train_mlp_single: empty training set");
  check_rows(X, m, "train_mlp_single");
  if (cfg.learning_rate <= 0 || cfg.epochs < 1 || cfg.batch_size < 1 || cfg.hidden_units < 1) {
    throw ContractViolation("train_mlp_single: invalid training config");
  }

  MlpTrainResult result;
  MlpModel& model = result.model;
  model.head = targets.kind;
  model.class_order = targets.class_order;
  if (targets.kind == data::HeadKind::regression) model.scaler = fit_scaler(targets.values);

  const std::size_t d = X.cols();
  const std::size_t hidden = static_cast<std::size_t>(cfg.hidden_units);
  const std::size_t out = head_out_dim(targets.kind);
  num::SeededRng rng(cfg.seed);
  const double r_in = 1.0 / std::sqrt(static_cast<double>(d));
  const double r_hidden = 1.0 / std::sqrt(static_cast<double>(hidden));
  model.net.W = init_weight(hidden, d, r_in, rng);
  model.net.b = init_bias(hidden, r_in, rng);
  model.net.V = init_weight(out, hidden, r_hidden, rng);
  model.net.c = init_bias(out, r_hidden, rng);

  const auto prepared = prepare_targets(targets, model.scaler);
  std::vector<num::Vector> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = row_vec(X, i);

  auto full_loss = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += net_forward_loss(model.net, rows[i], model.head, prepared[i]).loss;
    }
    return acc / static_cast<double>(m);
  };

  result.loss_trace.push_back(full_loss());
  DenseNet grads = zero_like(model.net);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < m; start += bs) {
      const std::size_t end = std::min(start + bs, m);
      zero_grads(grads);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const NetEval eval = net_forward_loss(model.net, rows[i], model.head, prepared[i]);
        net_backward(model.net, rows[i], model.head, prepared[i], eval, grads, nullptr);
      }
      apply_sgd(model.net, grads, cfg.learning_rate / static_cast<double>(end - start));
    }
    const double loss = full_loss();
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("train_mlp_single: non-finite loss at epoch " +
                             std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

std::pair<double, DenseNet> mlp_loss_grad(const MlpModel& model, const num::Matrix& X,
                                          const TaskTargets& targets) {
  const std::size_t m = targets.size();
  check_rows(X, m, "mlp_loss_grad");
  const auto prepared = prepare_targets(targets, model.scaler);
  DenseNet grads = zero_like(model.net);
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const num::Vector xi = row_vec(X, i);
    const NetEval eval = net_forward_loss(model.net, xi, model.head, prepared[i]);
    loss += eval.loss;
    net_backward(model.net, xi, model.head, prepared[i], eval, grads, nullptr);
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  loss *= inv_m;
  for (double& g : grads.W.values()) g *= inv_m;
  for (double& g : grads.b) g *= inv_m;
  for (double& g : grads.V.values()) g *= inv_m;
  for (double& g : grads.c) g *= inv_m;
  return {loss, grads};
}

// ---------------------------------------------------------------------------
// Random forest

double DecisionTree::predict(const num::Vector& x) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                           : nodes[node].right;
  }
  return nodes[node].value;
}

namespace {

struct TreeBuilder {
  const num::Matrix& X;
  const TaskTargets& targets;
  bool classification;
  int n_classes;
  int max_depth;
  std::size_t n_candidates;
  num::SeededRng rng;
  std::vector<TreeNode> nodes;
  std::vector<std::size_t> feature_pool;

  TreeBuilder(const num::Matrix& x, const TaskTargets& t, bool cls, int nc, int depth,
              std::size_t cand, num::SeededRng r)
      : X(x), targets(t), classification(cls), n_classes(nc), max_depth(depth),
        n_candidates(cand), rng(r) {
    feature_pool.resize(X.cols());
    std::iota(feature_pool.begin(), feature_pool.end(), 0);
  }

  double target_of(std::size_t i) const {
    return classification ? static_cast<double>(targets.classes[i]) : targets.values[i];
  }

  double leaf_value(const std::vector<std::size_t>& idx) const {
    if (classification) {
      std::vector<std::size_t> votes(n_classes, 0);
      for (std::size_t i : idx) votes[targets.classes[i]]++;
      return static_cast<double>(
          std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    double sum = 0.0;
    for (std::size_t i : idx) sum += targets.values[i];
    return sum / static_cast<double>(idx.size());
  }

  bool pure(const std::vector<std::size_t>& idx) const {
    const double first = target_of(idx[0]);
    for (std::size_t i : idx) {
      if (target_of(i) != first) return false;
    }
    return true;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  // Impurity gain of splitting the sorted pairs after position p (0-based).
  Split best_split_for(std::size_t feature, const std::vector<std::size_t>& idx) const {
    std::vector<std::pair<double, double>> pairs;  // (x, target)
    pairs.reserve(idx.size());
    for (std::size_t i : idx) pairs.emplace_back(X(i, feature), target_of(i));
    std::sort(pairs.begin(), pairs.end());
    Split best;
    const std::size_t n = pairs.size();
    if (classification) {
      std::vector<double> left(n_classes, 0.0), total(n_classes, 0.0);
      for (const auto& pr : pairs) total[static_cast<int>(pr.second)] += 1.0;
      auto gini_sum = [&](const std::vector<double>& counts, double cnt) {
        if (cnt == 0.0) return 0.0;
        double sq = 0.0;
        for (double c : counts) sq += c * c;
        return cnt - sq / cnt;
      };
      const double parent = gini_sum(total, static_cast<double>(n));
      std::vector<double> right = total;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        const int cls = static_cast<int>(pairs[p].second);
        left[cls] += 1.0;
        right[cls] -= 1.0;
        if (pairs[p].first == pairs[p + 1].first) continue;
        const double gain = parent - gini_sum(left, static_cast<double>(p + 1)) -
                            gini_sum(right, static_cast<double>(n - p - 1));
        if (gain > best.gain) {
          best = {static_cast<int>(feature), (pairs[p].first + pairs[p + 1].first) / 2.0, gain};
        }
      }
    } else {
      double total_sum = 0.0, total_sq = 0.0;
      for (const auto& pr : pairs) {
        total_sum += pr.second;
        total_sq += pr.second * pr.second;
      }
      const double parent = total_sq - total_sum * total_sum / static_cast<double>(n);
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t p = 0; p + 1 < n; ++p) {
        left_sum += pairs[p].second;
        left_sq += pairs[p].second * pairs[p].second;
        if (pairs[p].first == pairs[p + 1].first) continue;
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double nl = static_cast<double>(p + 1);
        const double nr = static_cast<double>(n - p - 1);
        const double gain =
            parent - (left_sq - left_sum * left_sum / nl) - (right_sq - right_sum * right_sum / nr);
        if (gain > best.gain) {
          best = {static_cast<int>(feature), (pairs[p].first + pairs[p + 1].first) / 2.0, gain};
        }
      }
    }
    return best;
  }

  Split find_split(const std::vector<std::size_t>& idx) {
    // Partial Fisher-Yates draw of candidate features.
    for (std::size_t j = 0; j < n_candidates && j + 1 < feature_pool.size(); ++j) {
      const std::size_t pick = j + rng.uniform_index(feature_pool.size() - j);
      std::swap(feature_pool[j], feature_pool[pick]);
    }
    Split best;
    for (std::size_t j = 0; j < std::min(n_candidates, feature_pool.size()); ++j) {
      const Split s = best_split_for(feature_pool[j], idx);
      if (s.gain > best.gain) best = s;
    }
    if (best.feature < 0 && n_candidates < X.cols()) {
      // Candidates were all constant on this node; fall back to a full scan
      // so distinct points always separate.
      for (std::size_t f = 0; f < X.cols(); ++f) {
        const Split s = best_split_for(f, idx);
        if (s.gain > best.gain) best = s;
      }
    }
    return best;
  }

  int build(const std::vector<std::size_t>& idx, int depth) {
    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const bool depth_capped = max_depth >= 0 && depth >= max_depth;
    if (depth_capped || idx.size() < 2 || pure(idx)) {
      nodes[node_id].value = leaf_value(idx);
      return node_id;
    }
    const Split split = find_split(idx);
    if (split.feature < 0) {
      nodes[node_id].value = leaf_value(idx);
      return node_id;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (X(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    nodes[node_id].feature = split.feature;
    nodes[node_id].threshold = split.threshold;
    nodes[node_id].left = build(left, depth + 1);
    nodes[node_id].right = build(right, depth + 1);
    return node_id;
  }
};

}  // namespace

ForestModel train_forest(const num::Matrix& X, const TaskTargets& targets,
                         const TrainConfig& cfg) {
  const std::size_t m = targets.size();
  if (m < 2) throw ContractViolation("train_forest: need at least 2 instances");
  check_rows(X, m, "train_forest");
  if (cfg.n_trees < 1) throw ContractViolation("train_forest: n_trees must be >= 1");

  ForestModel model;
  model.kind = targets.kind;
  const bool classification = targets.kind != data::HeadKind::regression;
  if (targets.kind == data::HeadKind::exclusive3) {
    model.n_classes = 3;
    model.class_order = targets.class_order;
  } else if (targets.kind == data::HeadKind::binary) {
    model.n_classes = 2;
    // binary targets arrive in `values`; reuse the class-index path
  }

  TaskTargets effective = targets;
  if (targets.kind == data::HeadKind::binary) {
    effective.classes.reserve(m);
    for (double v : targets.values) effective.classes.push_back(static_cast<int>(v));
  }

  const std::size_t n_candidates = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(X.cols())))));
  num::SeededRng root(cfg.seed);
  for (int t = 0; t < cfg.n_trees; ++t) {
    num::SeededRng tree_rng = root.derive(static_cast<std::uint64_t>(t));
    std::vector<std::size_t> sample(m);
    if (cfg.bootstrap) {
      for (std::size_t i = 0; i < m; ++i) sample[i] = tree_rng.uniform_index(m);
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    TreeBuilder builder(X, effective, classification, std::max(model.n_classes, 2),
                        cfg.max_depth, n_candidates, tree_rng);
    builder.build(sample, 0);
    model.trees.push_back(DecisionTree{std::move(builder.nodes)});
  }
  return model;
}

double ForestModel::predict_value(const num::Vector& x) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return sum / static_cast<double>(trees.size());
}

int ForestModel::predict_class(const num::Vector& x) const {
  std::vector<std::size_t> votes(std::max(n_classes, 2), 0);
  for (const auto& tree : trees) votes[static_cast<int>(tree.predict(x))]++;
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

// ---------------------------------------------------------------------------
// Linear SVM

double SvmModel::decision(const num::Vector& x) const {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return z;
}

int SvmModel::predict(const num::Vector& x) const { return decision(x) > 0.0 ? 1 : -1; }

double svm_objective(const SvmModel& model, const num::Matrix& X, const std::vector<int>& y) {
  check_rows(X, y.size(), "svm_objective");
  double hinge = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    hinge += std::max(0.0, 1.0 - y[i] * model.decision(row_vec(X, i)));
  }
  hinge /= static_cast<double>(y.size());
  double reg = 0.0;
  for (double wj : model.w) reg += wj * wj;
  return hinge + reg / (2.0 * model.C);
}

SvmTrainResult train_svm(const num::Matrix& X, const std::vector<int>& y,
                         const TrainConfig& cfg) {
  if (y.empty()) throw ContractViolation("train_svm: empty training set");
  check_rows(X, y.size(), "train_svm");
  for (int yi : y) {
    if (yi != -1 && yi != 1) {
      throw ContractViolation("train_svm: label " + std::to_string(yi) + " is not in {-1,+1}");
    }
  }
  if (cfg.svm_c <= 0.0) throw ContractViolation("train_svm: C must be positive");

  SvmTrainResult result;
  result.model.w.assign(X.cols(), 0.0);
  result.model.C = cfg.svm_c;
  result.objective_trace.push_back(svm_objective(result.model, X, y));
  const double inv_m = 1.0 / static_cast<double>(y.size());
  num::Vector dw(X.cols());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::fill(dw.begin(), dw.end(), 0.0);
    double db = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double margin = y[i] * result.model.decision(row_vec(X, i));
      if (margin < 1.0) {
        const double* xi = X.row(i);
        for (std::size_t j = 0; j < dw.size(); ++j) dw[j] -= y[i] * xi[j];
        db -= y[i];
      }
    }
    // Decaying step keeps the subgradient method from oscillating at the end.
    const double step = cfg.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (std::size_t j = 0; j < dw.size(); ++j) {
      result.model.w[j] -= step * (dw[j] * inv_m + result.model.w[j] / result.model.C);
    }
    result.model.b -= step * db * inv_m;
    result.objective_trace.push_back(svm_objective(result.model, X, y));
  }
  return result;
}

int SvmOvrModel::predict_class(const num::Vector& x) const {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < members.size(); ++c) {
    const double score = members[c].decision(x);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(c);
    }
  }
  return best;
}

SvmOvrModel train_svm_ovr(const num::Matrix& X, const std::vector<int>& class_indices,
                          const std::vector<std::string>& class_order, const TrainConfig& cfg) {
  SvmOvrModel model;
  model.class_order = class_order;
  for (std::size_t c = 0; c < class_order.size(); ++c) {
    std::vector<int> y(class_indices.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = class_indices[i] == static_cast<int>(c) ? 1 : -1;
    }
    model.members.push_back(train_svm(X, y, cfg).model);
  }
  return model;
}

double SvrModel::predict(const num::Vector& x) const {
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
  return scaler.to_unit(z);
}

SvrTrainResult train_svr(const num::Matrix& X, const std::vector<double>& y,
                         const TrainConfig& cfg) {
  if (y.empty()) throw ContractViolation("train_svr: empty training set");
  check_rows(X, y.size(), "train_svr");
  if (cfg.svm_c <= 0.0) throw ContractViolation("train_svr: C must be positive");

  SvrTrainResult result;
  result.model.w.assign(X.cols(), 0.0);
  result.model.C = cfg.svm_c;
  result.model.epsilon = cfg.svr_epsilon;
  result.model.scaler = fit_scaler(y);
  std::vector<double> t(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) t[i] = result.model.scaler.to_net(y[i]);

  auto objective = [&]() {
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double z = result.model.b;
      const double* xi = X.row(i);
      for (std::size_t j = 0; j < result.model.w.size(); ++j) z += result.model.w[j] * xi[j];
      loss += std::max(0.0, std::abs(z - t[i]) - result.model.epsilon);
    }
    loss /= static_cast<double>(y.size());
    double reg = 0.0;
    for (double wj : result.model.w) reg += wj * wj;
    return loss + reg / (2.0 * result.model.C);
  };

  result.objective_trace.push_back(objective());
  const double inv_m = 1.0 / static_cast<double>(y.size());
  num::Vector dw(X.cols());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::fill(dw.begin(), dw.end(), 0.0);
    double db = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double z = result.model.b;
      const double* xi = X.row(i);
      for (std::size_t j = 0; j < result.model.w.size(); ++j) z += result.model.w[j] * xi[j];
      const double resid = z - t[i];
      if (std::abs(resid) > result.model.epsilon) {
        const double sign = resid > 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < dw.size(); ++j) dw[j] += sign * xi[j];
        db += sign;
      }
    }
    const double step = cfg.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (std::size_t j = 0; j < dw.size(); ++j) {
      result.model.w[j] -= step * (dw[j] * inv_m + result.model.w[j] / result.model.C);
    }
    result.model.b -= step * db * inv_m;
    result.objective_trace.push_back(objective());
  }
  return result;
}

}  // namespace sme::baselines
