#pragma once

#include <functional>
#include <vector>

#include "tmse/compress.hpp"
#include "tmse/stft.hpp"
#include "tmse/tensor.hpp"

namespace tmse::ad {

enum class Unary { Relu, Silu, Sigmoid, Tanh, Abs, Log, Square };

struct Conv2dSpec {
  int stride_h = 1;  // frequency axis
  int pad_h = 0;
  int pad_w = 0;
  int dil_w = 1;  // time axis dilation
};

// Reverse-mode tape over real tensors. Build a graph per step, call
// backward() once on a scalar node, read gradients back. Nodes are value
// snapshots; parameters are re-registered each step.
class Tape {
 public:
  int input(Tensor v, bool requires_grad = false);

  const Tensor& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Tensor& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
  bool requires_grad(int id) const { return nodes_[static_cast<size_t>(id)].needs_grad; }
  size_t size() const { return nodes_.size(); }

  // elementwise / scalar
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);  // same shape, or either side a {1} scalar node
  int div(int a, int b);  // same shape, or divisor a {1} scalar node
  int scale(int a, double c);
  int add_const(int a, double c);
  int unary(int a, Unary kind);
  int clamp_max(int a, double cap);

  // shape / linear algebra
  int matmul(int a, int b);  // (m,k)x(k,n) -> (m,n); (m,k)x(k) -> (m)
  int sum_all(int a);
  int mean_all(int a);
  int mean_axes12(int a);             // (C,F,K) -> (C)
  int concat_ch(int a, int b);        // rank-3, axis 0
  int slice1d(int a, int start, int len);
  int scale_axis(int x, int v, int axis);  // rank-3 x, broadcast vector multiply
  int bias_axis(int x, int v, int axis);   // rank-3 x, broadcast vector add

  // neural blocks
  int conv2d(int x, int w, int bias, const Conv2dSpec& spec);  // bias < 0: none
  int conv2d_transpose(int x, int w, int bias, int stride_h);  // kernel (stride_h, 1)
  int grouped_linear_freq(int x, int w, int bias, int groups); // w (G,F,F), bias (G,F)

  // spectral pipeline (linear or pointwise maps with hand adjoints)
  int magnitude_power(int x, double exponent, double scalef);  // (2,F,K) pair map
  int decompress(int x, const CompressionParams& p);
  int cmag(int x);                                             // (2,F,K) -> (F,K)
  int istft(int spec, const StftConfig& cfg, int64_t out_len);
  int stft(int wav, const StftConfig& cfg);

  void backward(int loss_id);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    std::function<void(Tape&)> back;
  };

  int push(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
  Tensor& grad_mut(int id) { return nodes_[static_cast<size_t>(id)].grad; }

  std::vector<Node> nodes_;
};

}  // namespace tmse::ad
