#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sme/dataset.hpp"
#include "sme/numerics.hpp"

namespace sme::eval {

// Positive class convention throughout: 1 = unsuccessful (the business fails
// within five years).
struct ConfusionMatrix {
  long tp = 0, fp = 0, tn = 0, fn = 0;

  long total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

double rmse(const num::Vector& predicted, const num::Vector& actual);

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& actual);

double accuracy(const ConfusionMatrix& cm);

// tp / (tp + fn): the fraction of actually-unsuccessful businesses that were
// flagged. This is the verbal definition used by the domain write-ups even
// though it is sensitivity-shaped, hence the name.
double paper_specificity(const ConfusionMatrix& cm);

// tn / (tn + fp), reported alongside for disambiguation.
double standard_specificity(const ConfusionMatrix& cm);

struct MetricReport {
  std::map<std::string, double> rmse;  // per task, task units
  std::optional<double> accuracy;
  std::optional<double> paper_specificity;
  std::optional<double> standard_specificity;
  std::optional<ConfusionMatrix> confusion;
};

struct CvResult {
  int k = 0;
  std::vector<MetricReport> folds;
  MetricReport mean;
  MetricReport stddev;  // population stddev over folds
};

// Trains on the fold complement and scores the fold. fold_seed is derived
// from the harness seed and the fold id.
using Trainer = std::function<MetricReport(const data::Dataset& train, const data::Dataset& test,
                                           std::uint64_t fold_seed)>;

CvResult cross_validate(const Trainer& trainer, const data::Dataset& dataset, int k,
                        std::uint64_t seed);

// Model-by-task grid of RMSE values for the fixed-layout comparison table.
struct ComparisonGrid {
  std::vector<std::string> models;  // row order
  std::vector<std::string> tasks;   // column order
  std::map<std::pair<std::string, std::string>, double> cells;

  void set(const std::string& model, const std::string& task, double value);
};

// Fixed layout, one decimal place, byte-stable for identical input.
std::string emit_comparison_table(const ComparisonGrid& grid);

}  // namespace sme::eval
