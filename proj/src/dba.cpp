#include "tmse/dba.hpp"

#include <cmath>
#include <stdexcept>

#include "tmse/rng.hpp"

namespace tmse {

void DbaLiteConfig::validate() const {
  if (channels < 1 || squeezed < 1 || tf_blocks < 1 || unet_depth < 0 || freq_stride < 1)
    throw std::invalid_argument("DbaLiteConfig: sizes must be positive (tf_blocks >= 1)");
  if (groups < 1 || squeezed % groups != 0)
    throw std::invalid_argument("DbaLiteConfig: squeezed channels must divide into groups");
  if (dilations.empty()) throw std::invalid_argument("DbaLiteConfig: need at least one dilation");
  int f = n_freq;
  for (int d = 0; d < unet_depth; ++d) {
    if (f % freq_stride != 0)
      throw std::invalid_argument("DbaLiteConfig: n_freq not divisible by freq_stride^unet_depth");
    f /= freq_stride;
  }
  if (f < 2) throw std::invalid_argument("DbaLiteConfig: bottleneck frequency too small");
  if (embed_dim < 2 || embed_dim % 2 != 0)
    throw std::invalid_argument("DbaLiteConfig: embed_dim must be even >= 2");
}

int DbaLiteConfig::bottleneck_freq() const {
  int f = n_freq;
  for (int d = 0; d < unet_depth; ++d) f /= freq_stride;
  return f;
}

size_t DbaLite::add_param(const std::string& name, std::vector<int> shape, double init_scale,
                          Pcg32& rng) {
  Param p;
  p.name = name;
  p.value = Tensor(std::move(shape));
  if (init_scale > 0)
    for (int64_t i = 0; i < p.value.size(); ++i) p.value[i] = rng.next_normal() * init_scale;
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

DbaLite::DbaLite(const DbaLiteConfig& cfg)
    : cfg_(cfg), fourier_(cfg.embed_dim, cfg.fourier_scale, cfg.seed) {
  cfg_.validate();
  Pcg32 rng(cfg.seed, 0xDBA);
  const int c = cfg.channels, cs = cfg.squeezed, d = cfg.embed_dim;
  const double s_emb = 1.0 / std::sqrt(static_cast<double>(d));

  emb_w_ = add_param("emb.w", {d, d}, s_emb, rng);
  emb_b_ = add_param("emb.b", {d}, 0, rng);

  in_conv_w_ = add_param("in_conv.w", {c, 4, 3, 3}, 1.0 / std::sqrt(4.0 * 9), rng);
  in_conv_b_ = add_param("in_conv.b", {c}, 0, rng);

  auto make_res = [&](const std::string& base, int mode, int c_in) {
    ResBlock rb;
    rb.mode = mode;
    rb.c_in = c_in;
    const double s_in = 1.0 / std::sqrt(static_cast<double>(c_in) * 9);
    if (mode == 2) {
      rb.conv1_w = add_param(base + ".conv1.w", {c_in, c, cfg_.freq_stride, 1},
                             1.0 / std::sqrt(static_cast<double>(c_in)), rng);
    } else {
      rb.conv1_w = add_param(base + ".conv1.w", {c, c_in, 3, 3}, s_in, rng);
    }
    rb.conv1_b = add_param(base + ".conv1.b", {c}, 0, rng);
    rb.conv2_w = add_param(base + ".conv2.w", {c, c, 3, 3}, 1.0 / std::sqrt(c * 9.0), rng);
    rb.conv2_b = add_param(base + ".conv2.b", {c}, 0, rng);
    if (mode == 2) {
      rb.skip_w = add_param(base + ".skip.w", {c_in, c, cfg_.freq_stride, 1},
                            1.0 / std::sqrt(static_cast<double>(c_in)), rng);
    } else {
      rb.skip_w = add_param(base + ".skip.w", {c, c_in, 1, 1},
                            1.0 / std::sqrt(static_cast<double>(c_in)), rng);
    }
    rb.skip_b = add_param(base + ".skip.b", {c}, 0, rng);
    rb.adapter_w = add_param(base + ".temb.w", {c, d}, s_emb, rng);
    rb.adapter_b = add_param(base + ".temb.b", {c}, 0, rng);
    return rb;
  };

  for (int i = 0; i < cfg.unet_depth; ++i)
    down_.push_back(make_res("down" + std::to_string(i), 1, c));
  for (int i = 0; i < cfg.unet_depth; ++i)
    up_.push_back(make_res("up" + std::to_string(i), 2, 2 * c));  // concat skip doubles channels

  const int fb_freq = cfg_.bottleneck_freq();
  for (int l = 0; l < cfg.tf_blocks; ++l) {
    const std::string base = "tf" + std::to_string(l);
    TfBlock blk;
    auto make_att = [&](const std::string& tag) {
      Attention a;
      const int mid = std::max(1, c / 2);
      a.w1 = add_param(base + tag + ".att.w1", {mid, c}, 1.0 / std::sqrt(static_cast<double>(c)), rng);
      a.b1 = add_param(base + tag + ".att.b1", {mid}, 0, rng);
      a.w2 = add_param(base + tag + ".att.w2", {c, mid}, 1.0 / std::sqrt(static_cast<double>(mid)), rng);
      a.b2 = add_param(base + tag + ".att.b2", {c}, 0, rng);
      return a;
    };
    blk.att_t = make_att(".t");
    blk.att_f = make_att(".f");

    blk.tb.in_w = add_param(base + ".t.in.w", {cs, c, 1, 1}, 1.0 / std::sqrt(static_cast<double>(c)), rng);
    blk.tb.in_b = add_param(base + ".t.in.b", {cs}, 0, rng);
    for (size_t di = 0; di < cfg.dilations.size(); ++di) {
      blk.tb.dil_w.push_back(add_param(base + ".t.dil" + std::to_string(di) + ".w", {cs, cs, 1, 3},
                                       1.0 / std::sqrt(cs * 3.0), rng));
      blk.tb.dil_b.push_back(add_param(base + ".t.dil" + std::to_string(di) + ".b", {cs}, 0, rng));
    }
    blk.tb.out_w = add_param(base + ".t.out.w", {c, cs, 1, 1}, 1.0 / std::sqrt(static_cast<double>(cs)), rng);
    blk.tb.out_b = add_param(base + ".t.out.b", {c}, 0, rng);
    blk.tb.adapter_w = add_param(base + ".t.temb.w", {cs, d}, s_emb, rng);
    blk.tb.adapter_b = add_param(base + ".t.temb.b", {cs}, 0, rng);

    blk.fb.in_w = add_param(base + ".f.in.w", {cs, c, 1, 1}, 1.0 / std::sqrt(static_cast<double>(c)), rng);
    blk.fb.in_b = add_param(base + ".f.in.b", {cs}, 0, rng);
    blk.fb.lin_w = add_param(base + ".f.lin.w", {cfg.groups, fb_freq, fb_freq},
                             1.0 / std::sqrt(static_cast<double>(fb_freq)), rng);
    blk.fb.lin_b = add_param(base + ".f.lin.b", {cfg.groups, fb_freq}, 0, rng);
    blk.fb.out_w = add_param(base + ".f.out.w", {c, cs, 1, 1}, 1.0 / std::sqrt(static_cast<double>(cs)), rng);
    blk.fb.out_b = add_param(base + ".f.out.b", {c}, 0, rng);
    blk.fb.adapter_w = add_param(base + ".f.temb.w", {cs, d}, s_emb, rng);
    blk.fb.adapter_b = add_param(base + ".f.temb.b", {cs}, 0, rng);
    tf_.push_back(blk);
  }

  out_conv_w_ = add_param("out_conv.w", {2, c, 3, 3}, 0.1 / std::sqrt(c * 9.0), rng);
  out_conv_b_ = add_param("out_conv.b", {2}, 0, rng);
}

std::vector<Tensor*> DbaLite::parameters() {
  std::vector<Tensor*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(&p.value);
  return out;
}

std::vector<std::pair<std::string, Tensor*>> DbaLite::named_parameters() {
  std::vector<std::pair<std::string, Tensor*>> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.emplace_back("dba." + p.name, &p.value);
  return out;
}

int64_t DbaLite::parameter_count() {
  int64_t n = 0;
  for (auto& p : params_) n += p.value.size();
  return n;
}

int DbaLite::p(ad::Tape&, size_t idx) const { return param_node_ids_[idx]; }

std::pair<int, std::vector<int>> DbaLite::build(ad::Tape& tape, const Tensor& x_t,
                                                const Tensor& x1, double t) {
  if (x_t.ndim() != 3 || x_t.dim(0) != 2 || x_t.dim(1) != cfg_.n_freq)
    throw std::invalid_argument("DbaLite: input must be (2, n_freq, K)");
  require_same_shape(x_t, x1, "DbaLite::build");

  param_node_ids_.clear();
  param_node_ids_.reserve(params_.size());
  for (auto& prm : params_) param_node_ids_.push_back(tape.input(prm.value, true));

  const int ixt = tape.input(x_t, false);
  const int ix1 = tape.input(x1, false);

  // timestep embedding: fourier features -> linear -> SiLU, on-tape
  const int ifeat = tape.input(fourier_.at(t), false);
  const int emb = tape.unary(
      tape.add(tape.matmul(p(tape, emb_w_), ifeat), p(tape, emb_b_)), ad::Unary::Silu);

  auto adapter_bias = [&](int x, size_t w_idx, size_t b_idx) {
    const int v = tape.add(tape.matmul(p(tape, w_idx), emb), p(tape, b_idx));
    return tape.bias_axis(x, v, 0);
  };

  auto res_block = [&](int x, const ResBlock& rb) {
    ad::Conv2dSpec sp;
    sp.pad_h = 1;
    sp.pad_w = 1;
    int h;
    int skip;
    if (rb.mode == 1) {
      ad::Conv2dSpec sdown = sp;
      sdown.stride_h = cfg_.freq_stride;
      h = tape.conv2d(tape.unary(x, ad::Unary::Silu), p(tape, rb.conv1_w), p(tape, rb.conv1_b), sdown);
      ad::Conv2dSpec sk;
      sk.stride_h = cfg_.freq_stride;
      skip = tape.conv2d(x, p(tape, rb.skip_w), p(tape, rb.skip_b), sk);
    } else if (rb.mode == 2) {
      h = tape.conv2d_transpose(tape.unary(x, ad::Unary::Silu), p(tape, rb.conv1_w),
                                p(tape, rb.conv1_b), cfg_.freq_stride);
      skip = tape.conv2d_transpose(x, p(tape, rb.skip_w), p(tape, rb.skip_b), cfg_.freq_stride);
    } else {
      h = tape.conv2d(tape.unary(x, ad::Unary::Silu), p(tape, rb.conv1_w), p(tape, rb.conv1_b), sp);
      skip = tape.conv2d(x, p(tape, rb.skip_w), p(tape, rb.skip_b), ad::Conv2dSpec{});
    }
    h = adapter_bias(h, rb.adapter_w, rb.adapter_b);
    h = tape.conv2d(tape.unary(h, ad::Unary::Silu), p(tape, rb.conv2_w), p(tape, rb.conv2_b), sp);
    return tape.add(skip, h);
  };

  auto channel_attention = [&](int x, const Attention& a) {
    const int s = tape.mean_axes12(x);
    const int h = tape.unary(tape.add(tape.matmul(p(tape, a.w1), s), p(tape, a.b1)), ad::Unary::Silu);
    const int gate =
        tape.unary(tape.add(tape.matmul(p(tape, a.w2), h), p(tape, a.b2)), ad::Unary::Sigmoid);
    return tape.scale_axis(x, gate, 0);
  };

  auto t_block = [&](int x, const TBlock& tb) {
    int h = tape.conv2d(x, p(tape, tb.in_w), p(tape, tb.in_b), ad::Conv2dSpec{});
    h = adapter_bias(h, tb.adapter_w, tb.adapter_b);
    h = tape.unary(h, ad::Unary::Silu);
    for (size_t di = 0; di < cfg_.dilations.size(); ++di) {
      ad::Conv2dSpec sp;
      sp.dil_w = cfg_.dilations[di];
      sp.pad_w = cfg_.dilations[di];  // kernel (1,3): same length along time
      h = tape.unary(tape.conv2d(h, p(tape, tb.dil_w[di]), p(tape, tb.dil_b[di]), sp),
                     ad::Unary::Silu);
    }
    return tape.conv2d(h, p(tape, tb.out_w), p(tape, tb.out_b), ad::Conv2dSpec{});
  };

  auto f_block = [&](int x, const FBlock& fb) {
    int h = tape.conv2d(x, p(tape, fb.in_w), p(tape, fb.in_b), ad::Conv2dSpec{});
    h = adapter_bias(h, fb.adapter_w, fb.adapter_b);
    h = tape.unary(h, ad::Unary::Silu);
    h = tape.grouped_linear_freq(h, p(tape, fb.lin_w), p(tape, fb.lin_b), cfg_.groups);
    h = tape.unary(h, ad::Unary::Silu);
    return tape.conv2d(h, p(tape, fb.out_w), p(tape, fb.out_b), ad::Conv2dSpec{});
  };

  // input conv over concatenated (x_t, x1)
  ad::Conv2dSpec sp33;
  sp33.pad_h = 1;
  sp33.pad_w = 1;
  int h = tape.conv2d(tape.concat_ch(ixt, ix1), p(tape, in_conv_w_), p(tape, in_conv_b_), sp33);

  std::vector<int> skips;
  for (auto& rb : down_) {
    skips.push_back(h);
    h = res_block(h, rb);
  }

  for (auto& blk : tf_) {
    if (cfg_.alpha_t != 0.0)
      h = tape.add(h, tape.scale(t_block(channel_attention(h, blk.att_t), blk.tb), cfg_.alpha_t));
    if (cfg_.beta_f != 0.0)
      h = tape.add(h, tape.scale(f_block(channel_attention(h, blk.att_f), blk.fb), cfg_.beta_f));
  }

  for (int i = static_cast<int>(up_.size()) - 1; i >= 0; --i) {
    h = tape.concat_ch(h, skips[static_cast<size_t>(i)]);
    h = res_block(h, up_[static_cast<size_t>(i)]);
  }

  const int out =
      tape.conv2d(tape.unary(h, ad::Unary::Silu), p(tape, out_conv_w_), p(tape, out_conv_b_), sp33);
  return {out, param_node_ids_};
}

std::unique_ptr<DbaLite> make_dba_lite(const DbaLiteConfig& cfg) {
  return std::make_unique<DbaLite>(cfg);
}

Tensor dba_forward(DbaLite& net, const Tensor& x_t, const Tensor& x1, double t) {
  return net.predict(x_t, x1, t);
}

}  // namespace tmse
