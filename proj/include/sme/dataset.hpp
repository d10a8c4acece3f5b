#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sme/numerics.hpp"

namespace sme::data {

enum class Provenance { bank, external };

struct ColumnDesc {
  std::string name;  // carries the bank_/ext_ prefix
  Provenance provenance = Provenance::bank;
  bool operator==(const ColumnDesc&) const = default;
};

enum class HeadKind { regression, exclusive3, binary };

std::string head_kind_name(HeadKind kind);
HeadKind head_kind_from_name(const std::string& name);

// Class labels are ordered Low < Medium < High and spelled L|M|H on disk.
inline const std::vector<std::string> kClassOrder = {"L", "M", "H"};

// The value tasks, in canonical column order. Survival is the fourth task
// and lives in its own flag column.
inline const std::vector<std::string> kValueTasks = {"buyers", "demand", "competitors"};
inline const std::string kSurvivalTask = "survival";

struct TaskSpec {
  std::string name;
  HeadKind head_kind = HeadKind::regression;
  std::vector<std::string> class_order;  // exactly 3 entries for exclusive3

  bool operator==(const TaskSpec&) const = default;
};

std::vector<TaskSpec> default_tasks();

struct Instance {
  std::string id;
  num::Vector features;
  std::vector<double> values;        // aligned with kValueTasks
  std::vector<std::string> classes;  // aligned with kValueTasks
  std::optional<bool> survived_5yr;

  bool operator==(const Instance&) const = default;
};

struct Dataset {
  std::vector<ColumnDesc> schema;  // feature columns only
  std::vector<TaskSpec> tasks;
  std::vector<Instance> instances;

  std::size_t feature_count() const { return schema.size(); }
  std::size_t size() const { return instances.size(); }
  const TaskSpec& task(const std::string& name) const;

  bool operator==(const Dataset&) const = default;
};

// Stable 16-hex-digit identifier of the feature schema (names + provenance).
// Site files and training data with the same feature columns agree on it.
std::string schema_hash(const std::vector<ColumnDesc>& schema);

// "361-H" -> (361.0, "H")
std::pair<double, std::string> parse_labeled_value(const std::string& text);

// CSV contract: header `id`, feature columns prefixed bank_ or ext_, then
// buyers_value,buyers_class,...,competitors_class,survived_5yr. A combined
// column `buyers` holding "10000-M" is accepted in place of the value/class
// pair. Classes L|M|H, survival 0|1|empty, '.' decimal separator.
Dataset load_csv(const std::string& path);
void write_csv(const Dataset& dataset, const std::string& path);
std::string to_csv(const Dataset& dataset);

num::Vector one_hot(const std::string& cls, const std::vector<std::string>& order);

struct BinningRule {
  enum class Mode { fixed_cuts, tertiles };
  Mode mode = Mode::tertiles;
  double low = 0.0;
  double high = 0.0;

  static BinningRule fixed(double low, double high);
  static BinningRule tertiles() { return BinningRule{}; }
};

// value < low -> L, low <= value <= high -> M, value > high -> H.
// Tertile mode derives the cuts from the empirical 1/3 and 2/3 quantiles;
// an all-equal input degenerates to all-Medium.
std::vector<std::string> bin_values(const std::vector<double>& values, const BinningRule& rule);

struct StandardizeParams {
  std::vector<double> mean;
  std::vector<double> stddev;  // population stddev; 0 marks a constant column

  num::Vector apply(const num::Vector& features) const;
  Dataset apply(const Dataset& dataset) const;

  bool operator==(const StandardizeParams&) const = default;
};

// Per feature column: mean 0, population stddev 1. Constant columns map to
// all-zeros. Labels and task values are left untouched.
std::pair<Dataset, StandardizeParams> standardize(const Dataset& dataset);

struct SplitIndices {
  std::vector<std::size_t> train, dev, test;
};

// Sizes follow largest-remainder rounding with ties resolved in order
// (train, dev, test); the permutation is seed-determined, each set sorted.
SplitIndices split(std::size_t m, const std::array<double, 3>& ratios, std::uint64_t seed);

struct FoldPlan {
  int k = 0;
  std::vector<int> fold_of;  // instance index -> fold id

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

FoldPlan kfold(std::size_t m, int k, std::uint64_t seed);

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices);

struct SyntheticConfig {
  std::size_t m = 200;
  std::size_t d_bank = 6;
  std::size_t d_external = 4;
  std::size_t latent_dim = 3;
  double noise_stddev = 0.1;  // relative to each signal's own scale
  std::uint64_t seed = 1;
};

// Latent-factor generator: features are linear mixes of per-instance latent
// draws, task values are positive-affine in overlapping latent subsets (so
// tasks genuinely share structure), classes come from tertile binning, and
// survival flags a logistic score of the latents exceeding 0.5.
Dataset generate_synthetic(const SyntheticConfig& config);

// 0 -> "A", 25 -> "Z", 26 -> "AA", ...
std::string spreadsheet_id(std::size_t index);

}  // namespace sme::data
