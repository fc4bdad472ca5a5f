#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmse {

// Dense real tensor, row-major, double storage. Rank up to 4 in practice;
// rank 1 doubles as a vector, {1} as a scalar.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(count(shape_)), 0.0);
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = v;
    return t;
  }
  static Tensor scalar(double v) {
    Tensor t({1});
    t.data_[0] = v;
    return t;
  }

  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  const std::vector<int>& shape() const { return shape_; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // (c, f, k) access for rank-3 tensors
  double& at3(int c, int f, int k) {
    return data_[static_cast<size_t>((static_cast<int64_t>(c) * shape_[1] + f) * shape_[2] + k)];
  }
  double at3(int c, int f, int k) const {
    return data_[static_cast<size_t>((static_cast<int64_t>(c) * shape_[1] + f) * shape_[2] + k)];
  }
  double& at2(int r, int c) {
    return data_[static_cast<size_t>(static_cast<int64_t>(r) * shape_[1] + c)];
  }
  double at2(int r, int c) const {
    return data_[static_cast<size_t>(static_cast<int64_t>(r) * shape_[1] + c)];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static int64_t count(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("tensor dimension must be positive");
      n *= d;
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

inline std::string shape_str(const Tensor& t) {
  std::string s = "(";
  for (int i = 0; i < t.ndim(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.dim(i));
  }
  return s + ")";
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_str(a) +
                                " vs " + shape_str(b));
}

inline double l2_norm(const Tensor& t) {
  double s = 0;
  for (int64_t i = 0; i < t.size(); ++i) s += t[i] * t[i];
  return std::sqrt(s);
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0;
  for (int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double rel_l2_error(const Tensor& est, const Tensor& ref) {
  require_same_shape(est, ref, "rel_l2_error");
  double num = 0, den = 0;
  for (int64_t i = 0; i < est.size(); ++i) {
    double d = est[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace tmse
