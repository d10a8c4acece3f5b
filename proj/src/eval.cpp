#include "sme/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sme/error.hpp"

namespace sme::eval {
namespace {

std::string fmt_one_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

void aggregate_field(const std::vector<MetricReport>& folds,
                     std::optional<double> MetricReport::* field, MetricReport& mean,
                     MetricReport& stddev) {
  const bool everywhere = std::all_of(folds.begin(), folds.end(), [&](const MetricReport& r) {
    return (r.*field).has_value();
  });
  if (!everywhere) return;
  double sum = 0.0;
  for (const auto& r : folds) sum += *(r.*field);
  const double mu = sum / static_cast<double>(folds.size());
  double sq = 0.0;
  for (const auto& r : folds) {
    const double d = *(r.*field) - mu;
    sq += d * d;
  }
  mean.*field = mu;
  stddev.*field = std::sqrt(sq / static_cast<double>(folds.size()));
}

}  // namespace

double rmse(const num::Vector& predicted, const num::Vector& actual) {
  if (predicted.empty() || predicted.size() != actual.size()) {
    throw ContractViolation("rmse: need equal non-empty vectors, got " +
                            std::to_string(predicted.size()) + " and " +
                            std::to_string(actual.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predicted.size()));
}

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& actual) {
  if (predicted.size() != actual.size()) {
    throw ContractViolation("confusion: length mismatch " + std::to_string(predicted.size()) +
                            " vs " + std::to_string(actual.size()));
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if ((predicted[i] != 0 && predicted[i] != 1) || (actual[i] != 0 && actual[i] != 1)) {
      throw ContractViolation("confusion: labels must be 0 or 1");
    }
    if (predicted[i] == 1) {
      actual[i] == 1 ? ++cm.tp : ++cm.fp;
    } else {
      actual[i] == 1 ? ++cm.fn : ++cm.tn;
    }
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw UndefinedMetric("accuracy: no scored instances");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

double paper_specificity(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) {
    throw UndefinedMetric("paper_specificity: no actually-unsuccessful instances");
  }
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

double standard_specificity(const ConfusionMatrix& cm) {
  if (cm.tn + cm.fp == 0) {
    throw UndefinedMetric("standard_specificity: no actually-successful instances");
  }
  return static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
}

CvResult cross_validate(const Trainer& trainer, const data::Dataset& dataset, int k,
                        std::uint64_t seed) {
  const auto plan = data::kfold(dataset.size(), k, seed);
  const num::SeededRng harness_rng(seed);
  CvResult result;
  result.k = k;
  for (int fold = 0; fold < k; ++fold) {
    const auto train_set = data::subset(dataset, plan.train_indices(fold));
    const auto test_set = data::subset(dataset, plan.test_indices(fold));
    try {
      result.folds.push_back(
          trainer(train_set, test_set, harness_rng.derive(static_cast<std::uint64_t>(fold)).seed()));
    } catch (const std::exception& e) {
      throw std::runtime_error("cross_validate: fold " + std::to_string(fold) + ": " + e.what());
    }
  }

  // Fieldwise aggregation over whatever every fold reported.
  for (const auto& [task, value] : result.folds.front().rmse) {
    (void)value;
    const bool everywhere =
        std::all_of(result.folds.begin(), result.folds.end(),
                    [&](const MetricReport& r) { return r.rmse.count(task) > 0; });
    if (!everywhere) continue;
    double sum = 0.0;
    for (const auto& r : result.folds) sum += r.rmse.at(task);
    const double mu = sum / static_cast<double>(k);
    double sq = 0.0;
    for (const auto& r : result.folds) {
      const double d = r.rmse.at(task) - mu;
      sq += d * d;
    }
    result.mean.rmse[task] = mu;
    result.stddev.rmse[task] = std::sqrt(sq / static_cast<double>(k));
  }
  aggregate_field(result.folds, &MetricReport::accuracy, result.mean, result.stddev);
  aggregate_field(result.folds, &MetricReport::paper_specificity, result.mean, result.stddev);
  aggregate_field(result.folds, &MetricReport::standard_specificity, result.mean, result.stddev);
  return result;
}

void ComparisonGrid::set(const std::string& model, const std::string& task, double value) {
  if (std::find(models.begin(), models.end(), model) == models.end()) models.push_back(model);
  if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) tasks.push_back(task);
  cells[{model, task}] = value;
}

std::string emit_comparison_table(const ComparisonGrid& grid) {
  if (grid.models.empty() || grid.tasks.empty()) {
    throw ContractViolation("emit_comparison_table: empty grid");
  }
  for (const auto& model : grid.models) {
    for (const auto& task : grid.tasks) {
      if (grid.cells.find({model, task}) == grid.cells.end()) {
        throw ContractViolation("emit_comparison_table: missing cell " + model + " x " + task);
      }
    }
  }
  std::size_t name_width = std::string("Model").size();
  for (const auto& model : grid.models) name_width = std::max(name_width, model.size());
  std::vector<std::size_t> widths;
  for (const auto& task : grid.tasks) {
    std::size_t w = task.size();
    for (const auto& model : grid.models) {
      w = std::max(w, fmt_one_decimal(grid.cells.at({model, task})).size());
    }
    widths.push_back(w);
  }

  auto pad_right = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  auto pad_left = [](const std::string& s, std::size_t w) {
    return std::string(w - s.size(), ' ') + s;
  };

  std::string out = pad_right("Model", name_width);
  for (std::size_t c = 0; c < grid.tasks.size(); ++c) {
    out += " | " + pad_left(grid.tasks[c], widths[c]);
  }
  out += '\n';
  for (const auto& model : grid.models) {
    out += pad_right(model, name_width);
    for (std::size_t c = 0; c < grid.tasks.size(); ++c) {
      out += " | " + pad_left(fmt_one_decimal(grid.cells.at({model, grid.tasks[c]})), widths[c]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace sme::eval
