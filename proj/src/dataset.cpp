#include "sme/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sme/error.hpp"

namespace sme::data {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ParseError(context + ": unparseable number '" + text + "'");
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int class_index(const std::string& cls) {
  for (std::size_t i = 0; i < kClassOrder.size(); ++i) {
    if (kClassOrder[i] == cls) return static_cast<int>(i);
  }
  return -1;
}

// Largest-remainder apportionment of m into weighted parts; ties go to the
// earlier part.
std::vector<std::size_t> apportion(std::size_t m, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> sizes(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(m) * weights[i] / total;
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += sizes[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; assigned < m; ++j, ++assigned) {
    sizes[remainders[j % remainders.size()].second] += 1;
  }
  return sizes;
}

}  // namespace

std::string head_kind_name(HeadKind kind) {
  switch (kind) {
    case HeadKind::regression: return "regression";
    case HeadKind::exclusive3: return "exclusive3";
    case HeadKind::binary: return "binary";
  }
  throw ContractViolation("head_kind_name: unknown kind");
}

HeadKind head_kind_from_name(const std::string& name) {
  if (name == "regression") return HeadKind::regression;
  if (name == "exclusive3") return HeadKind::exclusive3;
  if (name == "binary") return HeadKind::binary;
  throw ContractViolation("head_kind_from_name: unknown kind '" + name + "'");
}

std::vector<TaskSpec> default_tasks() {
  std::vector<TaskSpec> tasks;
  for (const auto& name : kValueTasks) {
    tasks.push_back(TaskSpec{name, HeadKind::regression, kClassOrder});
  }
  tasks.push_back(TaskSpec{kSurvivalTask, HeadKind::binary, {}});
  return tasks;
}

const TaskSpec& Dataset::task(const std::string& name) const {
  for (const auto& t : tasks) {
    if (t.name == name) return t;
  }
  throw ContractViolation("Dataset::task: unknown task '" + name + "'");
}

std::string schema_hash(const std::vector<ColumnDesc>& schema) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= '|';
    h *= 0x100000001b3ull;
  };
  mix("id");
  for (const auto& col : schema) mix(col.name);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

std::pair<double, std::string> parse_labeled_value(const std::string& text) {
  const auto dash = text.rfind('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= text.size()) {
    throw ParseError("parse_labeled_value: expected <number>-<L|M|H>, got '" + text + "'");
  }
  const std::string cls = text.substr(dash + 1);
  if (class_index(cls) < 0) {
    throw ParseError("parse_labeled_value: unknown class in '" + text + "'");
  }
  double value;
  try {
    value = parse_double(text.substr(0, dash), "parse_labeled_value");
  } catch (const ParseError&) {
    throw ParseError("parse_labeled_value: bad numeric part in '" + text + "'");
  }
  return {value, cls};
}

num::Vector one_hot(const std::string& cls, const std::vector<std::string>& order) {
  num::Vector v(order.size(), 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == cls) {
      v[i] = 1.0;
      return v;
    }
  }
  throw ContractViolation("one_hot: class '" + cls + "' not in order list");
}

BinningRule BinningRule::fixed(double low, double high) {
  if (low > high) {
    throw ContractViolation("BinningRule: low cut " + fmt_double(low) + " > high cut " +
                            fmt_double(high));
  }
  return BinningRule{Mode::fixed_cuts, low, high};
}

std::vector<std::string> bin_values(const std::vector<double>& values, const BinningRule& rule) {
  if (values.empty()) throw ContractViolation("bin_values: empty input");
  double low = rule.low;
  double high = rule.high;
  if (rule.mode == BinningRule::Mode::tertiles) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
      // Degenerate all-equal input: cuts collapse onto the value, all Medium.
      low = high = sorted.front();
    } else {
      const auto sizes = apportion(sorted.size(), {1.0, 1.0, 1.0});
      const std::size_t n_low = sizes[0];
      const std::size_t n_mid = sizes[1];
      low = (sorted[n_low - 1] + sorted[n_low]) / 2.0;
      high = (n_low + n_mid >= sorted.size())
                 ? sorted.back()
                 : (sorted[n_low + n_mid - 1] + sorted[n_low + n_mid]) / 2.0;
    }
  }
  std::vector<std::string> classes;
  classes.reserve(values.size());
  for (double v : values) {
    classes.push_back(v < low ? "L" : (v > high ? "H" : "M"));
  }
  return classes;
}

num::Vector StandardizeParams::apply(const num::Vector& features) const {
  if (features.size() != mean.size()) {
    throw ContractViolation("StandardizeParams::apply: feature count " +
                            std::to_string(features.size()) + " does not match params (" +
                            std::to_string(mean.size()) + ")");
  }
  num::Vector out(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    out[j] = stddev[j] == 0.0 ? 0.0 : (features[j] - mean[j]) / stddev[j];
  }
  return out;
}

Dataset StandardizeParams::apply(const Dataset& dataset) const {
  Dataset out = dataset;
  for (auto& inst : out.instances) inst.features = apply(inst.features);
  return out;
}

std::pair<Dataset, StandardizeParams> standardize(const Dataset& dataset) {
  const std::size_t m = dataset.size();
  if (m < 2) {
    throw ContractViolation("standardize: need at least 2 instances, got " + std::to_string(m));
  }
  const std::size_t d = dataset.feature_count();
  StandardizeParams params;
  params.mean.assign(d, 0.0);
  params.stddev.assign(d, 0.0);
  for (const auto& inst : dataset.instances) {
    for (std::size_t j = 0; j < d; ++j) params.mean[j] += inst.features[j];
  }
  for (std::size_t j = 0; j < d; ++j) params.mean[j] /= static_cast<double>(m);
  for (const auto& inst : dataset.instances) {
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = inst.features[j] - params.mean[j];
      params.stddev[j] += delta * delta;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    params.stddev[j] = std::sqrt(params.stddev[j] / static_cast<double>(m));
  }
  return {params.apply(dataset), params};
}

SplitIndices split(std::size_t m, const std::array<double, 3>& ratios, std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0.0 || ratios[1] <= 0.0 || ratios[2] <= 0.0 || std::abs(sum - 1.0) > 1e-9) {
    throw ContractViolation("split: ratios must be positive and sum to 1");
  }
  const auto sizes = apportion(m, {ratios[0], ratios[1], ratios[2]});
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  num::SeededRng rng(seed);
  rng.shuffle(order);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + sizes[0]);
  out.dev.assign(order.begin() + sizes[0], order.begin() + sizes[0] + sizes[1]);
  out.test.assign(order.begin() + sizes[0] + sizes[1], order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.dev.begin(), out.dev.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan kfold(std::size_t m, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > m) {
    throw ContractViolation("kfold: k=" + std::to_string(k) + " out of range for m=" +
                            std::to_string(m));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  num::SeededRng rng(seed);
  rng.shuffle(order);
  FoldPlan plan;
  plan.k = k;
  plan.fold_of.assign(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    plan.fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return plan;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.schema = dataset.schema;
  out.tasks = dataset.tasks;
  out.instances.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= dataset.size()) {
      throw ContractViolation("subset: index " + std::to_string(idx) + " out of range for m=" +
                              std::to_string(dataset.size()));
    }
    out.instances.push_back(dataset.instances[idx]);
  }
  return out;
}

std::string spreadsheet_id(std::size_t index) {
  std::string out;
  std::size_t n = index;
  while (true) {
    out.insert(out.begin(), static_cast<char>('A' + n % 26));
    if (n < 26) break;
    n = n / 26 - 1;
  }
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.m < 1 || config.d_bank < 1 || config.d_external < 1 || config.latent_dim < 1) {
    throw ContractViolation("generate_synthetic: all counts must be >= 1");
  }
  if (config.noise_stddev < 0.0) {
    throw ContractViolation("generate_synthetic: negative noise_stddev");
  }
  num::SeededRng rng(config.seed);
  const std::size_t d = config.d_bank + config.d_external;
  const std::size_t L = config.latent_dim;

  Dataset ds;
  for (std::size_t j = 0; j < config.d_bank; ++j) {
    ds.schema.push_back({"bank_x" + std::to_string(j), Provenance::bank});
  }
  for (std::size_t j = 0; j < config.d_external; ++j) {
    ds.schema.push_back({"ext_x" + std::to_string(j), Provenance::external});
  }
  ds.tasks = default_tasks();

  // Feature mixing matrix: every feature observes all latents, noisily.
  num::Matrix mix(d, L);
  const double mix_scale = 1.0 / std::sqrt(static_cast<double>(L));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t l = 0; l < L; ++l) mix(j, l) = rng.gaussian(0.0, mix_scale);
  }

  // Value tasks read overlapping latent pairs (wrapping when latent_dim < 3),
  // which plants the cross-task structure multi-task training relies on.
  struct TaskGen {
    std::size_t la, lb;
    double wa, wb, offset, scale;
  };
  const std::array<TaskGen, 3> task_gen = {{
      {0 % L, 1 % L, 0.8, 0.6, 9000.0, 3500.0},  // buyers
      {1 % L, 2 % L, 0.6, 0.8, 240.0, 90.0},     // demand
      {0 % L, 2 % L, 0.6, 0.8, 130.0, 55.0},     // competitors
  }};
  // Survival depends on all latents through a logistic score.
  num::Vector survival_w(L);
  for (std::size_t l = 0; l < L; ++l) {
    survival_w[l] = 1.0 / std::sqrt(static_cast<double>(L));
  }

  std::array<std::vector<double>, 3> raw_values;
  for (auto& v : raw_values) v.reserve(config.m);

  for (std::size_t i = 0; i < config.m; ++i) {
    Instance inst;
    inst.id = spreadsheet_id(i);
    num::Vector z(L);
    for (std::size_t l = 0; l < L; ++l) z[l] = rng.gaussian(0.0, 1.0);
    inst.features.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < L; ++l) acc += mix(j, l) * z[l];
      inst.features[j] = acc + rng.gaussian(0.0, config.noise_stddev);
    }
    inst.values.resize(3);
    for (std::size_t t = 0; t < 3; ++t) {
      const auto& g = task_gen[t];
      const double signal = g.wa * z[g.la] + g.wb * z[g.lb];
      inst.values[t] =
          g.offset + g.scale * signal + rng.gaussian(0.0, config.noise_stddev * g.scale);
      raw_values[t].push_back(inst.values[t]);
    }
    double score = 0.1;
    for (std::size_t l = 0; l < L; ++l) score += survival_w[l] * z[l];
    inst.survived_5yr = num::sigmoid(1.5 * score) > 0.5;
    ds.instances.push_back(std::move(inst));
  }

  for (std::size_t t = 0; t < 3; ++t) {
    const auto classes = bin_values(raw_values[t], BinningRule::tertiles());
    for (std::size_t i = 0; i < config.m; ++i) {
      ds.instances[i].classes.push_back(classes[i]);
    }
  }
  return ds;
}

std::string to_csv(const Dataset& dataset) {
  std::string out = "id";
  for (const auto& col : dataset.schema) {
    out += ',';
    out += col.name;
  }
  for (const auto& task : kValueTasks) {
    out += ',' + task + "_value," + task + "_class";
  }
  out += ",survived_5yr\n";
  for (const auto& inst : dataset.instances) {
    out += inst.id;
    for (double f : inst.features) {
      out += ',';
      out += fmt_double(f);
    }
    for (std::size_t t = 0; t < kValueTasks.size(); ++t) {
      out += ',';
      out += fmt_double(inst.values[t]);
      out += ',';
      out += inst.classes[t];
    }
    out += ',';
    if (inst.survived_5yr.has_value()) out += *inst.survived_5yr ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("write_csv: cannot open '" + path + "'");
  file << to_csv(dataset);
  if (!file) throw IoError("write_csv: failed writing '" + path + "'");
}

Dataset load_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(file, line)) throw ParseError("load_csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.empty() || header[0] != "id") {
    throw ParseError("load_csv: first column must be 'id'");
  }

  Dataset ds;
  ds.tasks = default_tasks();

  // Column roles, resolved by name.
  struct TaskCols {
    int value = -1, cls = -1, combined = -1;
  };
  std::vector<TaskCols> task_cols(kValueTasks.size());
  int survived_col = -1;
  std::vector<std::pair<std::size_t, std::size_t>> feature_cols;  // (csv index, schema index)

  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name.rfind("bank_", 0) == 0) {
      feature_cols.emplace_back(c, ds.schema.size());
      ds.schema.push_back({name, Provenance::bank});
      continue;
    }
    if (name.rfind("ext_", 0) == 0) {
      feature_cols.emplace_back(c, ds.schema.size());
      ds.schema.push_back({name, Provenance::external});
      continue;
    }
    if (name == "survived_5yr") {
      survived_col = static_cast<int>(c);
      continue;
    }
    bool matched = false;
    for (std::size_t t = 0; t < kValueTasks.size(); ++t) {
      if (name == kValueTasks[t] + "_value") {
        task_cols[t].value = static_cast<int>(c);
        matched = true;
      } else if (name == kValueTasks[t] + "_class") {
        task_cols[t].cls = static_cast<int>(c);
        matched = true;
      } else if (name == kValueTasks[t]) {
        task_cols[t].combined = static_cast<int>(c);
        matched = true;
      }
    }
    if (!matched) throw ParseError("load_csv: unexpected column '" + name + "'");
  }
  for (std::size_t t = 0; t < kValueTasks.size(); ++t) {
    const bool split_form = task_cols[t].value >= 0 && task_cols[t].cls >= 0;
    if (!split_form && task_cols[t].combined < 0) {
      const std::string missing =
          task_cols[t].value < 0 ? kValueTasks[t] + "_value" : kValueTasks[t] + "_class";
      throw ParseError("load_csv: missing column '" + missing + "'");
    }
  }
  if (survived_col < 0) throw ParseError("load_csv: missing column 'survived_5yr'");

  std::size_t row = 1;
  while (std::getline(file, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    const std::string where = "load_csv: row " + std::to_string(row);
    if (fields.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Instance inst;
    inst.id = fields[0];
    inst.features.resize(ds.schema.size());
    for (const auto& [csv_idx, schema_idx] : feature_cols) {
      inst.features[schema_idx] = parse_double(fields[csv_idx], where);
    }
    for (std::size_t t = 0; t < kValueTasks.size(); ++t) {
      if (task_cols[t].value >= 0 && task_cols[t].cls >= 0) {
        inst.values.push_back(parse_double(fields[task_cols[t].value], where));
        const std::string& cls = fields[task_cols[t].cls];
        if (class_index(cls) < 0) {
          throw ParseError(where + ": unknown class '" + cls + "' for task " + kValueTasks[t]);
        }
        inst.classes.push_back(cls);
      } else {
        try {
          auto [value, cls] = parse_labeled_value(fields[task_cols[t].combined]);
          inst.values.push_back(value);
          inst.classes.push_back(cls);
        } catch (const ParseError& e) {
          throw ParseError(where + ": " + e.what());
        }
      }
    }
    const std::string& surv = fields[survived_col];
    if (surv == "1") {
      inst.survived_5yr = true;
    } else if (surv == "0") {
      inst.survived_5yr = false;
    } else if (!surv.empty()) {
      throw ParseError(where + ": survived_5yr must be 0, 1 or empty, got '" + surv + "'");
    }
    if (!num::all_finite(inst.features)) {
      throw ParseError(where + ": non-finite feature value");
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

}  // namespace sme::data
