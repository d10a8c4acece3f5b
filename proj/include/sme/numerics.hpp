#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace sme::num {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Values are immutable by convention once
// a model is trained; nothing here is thread-aware.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, Vector values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  const double* row(std::size_t r) const { return values_.data() + r * cols_; }
  double* row(std::size_t r) { return values_.data() + r * cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector values_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);

double sigmoid(double z);
Vector softmax(const Vector& v);

// Deterministic 64-bit generator (splitmix-style state advance). Identical
// seed gives an identical draw sequence on every platform. Single-owner:
// concurrent users must each hold their own instance, created via derive().
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();

  double uniform();                         // [0, 1)
  double uniform(double lo, double hi);     // [lo, hi)
  std::size_t uniform_index(std::size_t n); // {0, ..., n-1}
  double gaussian(double mean, double stddev);

  // Independent child stream, a pure function of (seed, stream): deriving is
  // unaffected by how many draws this instance has already produced.
  SeededRng derive(std::uint64_t stream) const;

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t state_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Central differences (f(x+eps*e_j) - f(x-eps*e_j)) / (2*eps) per coordinate.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x,
                        double eps);

struct GradCheckReport {
  Vector rel_errors;          // per parameter, always >= 0
  double max_rel_error = 0.0;
};

// Relative error uses denominator max(|analytic|, |numeric|, 1e-8).
GradCheckReport grad_check(const std::function<double(const Vector&)>& f, const Vector& x,
                           const Vector& analytic, double eps);

bool all_finite(const Vector& v);

}  // namespace sme::num
