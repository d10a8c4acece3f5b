#include "sme/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sme/error.hpp"

namespace sme::num {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ContractViolation("Matrix: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " needs " + std::to_string(rows_ * cols_) + " entries, got " +
                            std::to_string(values_.size()));
  }
}

bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ContractViolation("matmul: dimension mismatch " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  if (!all_finite(out.values())) {
    throw ContractViolation("matmul: non-finite entry in product");
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) {
    throw ContractViolation("matvec: dimension mismatch " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " * " + std::to_string(x.size()));
  }
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    const double* row = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
  return out;
}

double sigmoid(double z) {
  // Branch on sign so exp never overflows for large |z|.
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector softmax(const Vector& v) {
  if (v.empty()) {
    throw ContractViolation("softmax: empty input");
  }
  const double m = *std::max_element(v.begin(), v.end());
  Vector out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

std::uint64_t SeededRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

std::size_t SeededRng::uniform_index(std::size_t n) {
  if (n == 0) throw ContractViolation("uniform_index: empty range");
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double SeededRng::gaussian(double mean, double stddev) {
  if (stddev < 0.0) {
    throw ContractViolation("gaussian: negative stddev " + std::to_string(stddev));
  }
  if (stddev == 0.0) return mean;
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return mean + stddev * r * std::cos(theta);
}

SeededRng SeededRng::derive(std::uint64_t stream) const {
  std::uint64_t z = seed_ ^ (0xD1B54A32D192ED03ull * (stream + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return SeededRng(z ^ (z >> 31));
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x,
                        double eps) {
  if (eps <= 0.0) {
    throw ContractViolation("finite_diff_grad: eps must be positive, got " + std::to_string(eps));
  }
  Vector grad(x.size());
  Vector probe = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + eps;
    const double hi = f(probe);
    probe[j] = x[j] - eps;
    const double lo = f(probe);
    probe[j] = x[j];
    if (!std::isfinite(hi) || !std::isfinite(lo)) {
      throw ContractViolation("finite_diff_grad: non-finite evaluation at coordinate " +
                              std::to_string(j));
    }
    grad[j] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

GradCheckReport grad_check(const std::function<double(const Vector&)>& f, const Vector& x,
                           const Vector& analytic, double eps) {
  if (analytic.size() != x.size()) {
    throw ContractViolation("grad_check: gradient size " + std::to_string(analytic.size()) +
                            " does not match parameter count " + std::to_string(x.size()));
  }
  const Vector numeric = finite_diff_grad(f, x, eps);
  GradCheckReport report;
  report.rel_errors.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double denom = std::max({std::abs(analytic[j]), std::abs(numeric[j]), 1e-8});
    report.rel_errors[j] = std::abs(analytic[j] - numeric[j]) / denom;
    report.max_rel_error = std::max(report.max_rel_error, report.rel_errors[j]);
  }
  return report;
}

}  // namespace sme::num
