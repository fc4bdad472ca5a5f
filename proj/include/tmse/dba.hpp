#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tmse/predictor.hpp"
#include "tmse/rng.hpp"

namespace tmse {

// Reduced-scale dual-path backbone: U-Net with frequency-only strided
// resampling, a stack of TF blocks at the bottleneck (channel attention +
// squeezed time conv / grouped frequency linear, weighted residuals), all
// conditioned on a Fourier timestep embedding.
struct DbaLiteConfig {
  int n_freq = 32;       // input frequency bins; divisible by freq_stride^unet_depth
  int channels = 8;      // C
  int squeezed = 16;     // C'
  int tf_blocks = 2;     // L
  int unet_depth = 1;
  int freq_stride = 2;
  double alpha_t = 1.0;  // T-block residual weight
  double beta_f = 1.0;   // F-block residual weight
  int groups = 4;        // F-block grouped linear
  std::vector<int> dilations = {1, 2, 4};  // T-block time dilations, kernel 3
  int embed_dim = 64;
  double fourier_scale = 16.0;
  uint64_t seed = 11;

  void validate() const;
  int bottleneck_freq() const;
};

class DbaLite : public TrainablePredictor {
 public:
  explicit DbaLite(const DbaLiteConfig& cfg);

  std::vector<Tensor*> parameters() override;
  std::vector<std::pair<std::string, Tensor*>> named_parameters() override;
  std::pair<int, std::vector<int>> build(ad::Tape& tape, const Tensor& x_t, const Tensor& x1,
                                         double t) override;

  const DbaLiteConfig& config() const { return cfg_; }
  int64_t parameter_count();

 private:
  struct Param {
    std::string name;
    Tensor value;
  };
  int p(ad::Tape& tape, size_t idx) const;  // helper during build (set up in build())

  size_t add_param(const std::string& name, std::vector<int> shape, double init_scale, Pcg32& rng);

  DbaLiteConfig cfg_;
  FourierFeatures fourier_;
  std::vector<Param> params_;

  // parameter indices, grouped per module
  struct Attention {
    size_t w1, b1, w2, b2;
  };
  struct ResBlock {
    size_t conv1_w, conv1_b, conv2_w, conv2_b, skip_w, skip_b, adapter_w, adapter_b;
    int mode;  // 0 none, 1 down, 2 up
    int c_in;
  };
  struct TBlock {
    size_t in_w, in_b, out_w, out_b, adapter_w, adapter_b;
    std::vector<size_t> dil_w, dil_b;
  };
  struct FBlock {
    size_t in_w, in_b, out_w, out_b, adapter_w, adapter_b, lin_w, lin_b;
  };
  struct TfBlock {
    Attention att_t, att_f;
    TBlock tb;
    FBlock fb;
  };

  size_t emb_w_, emb_b_;
  size_t in_conv_w_, in_conv_b_, out_conv_w_, out_conv_b_;
  std::vector<ResBlock> down_, up_;
  std::vector<TfBlock> tf_;

  // build-time scratch
  std::vector<int> param_node_ids_;
};

std::unique_ptr<DbaLite> make_dba_lite(const DbaLiteConfig& cfg);

// Convenience wrapper matching the operation-style signature.
Tensor dba_forward(DbaLite& net, const Tensor& x_t, const Tensor& x1, double t);

}  // namespace tmse
