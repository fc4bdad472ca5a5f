#include "tmse/autodiff.hpp"

#include <cmath>
#include <stdexcept>

#include "tmse/fft.hpp"

namespace tmse::ad {

namespace {
constexpr double kEnvelopeFloor = 1e-12;

double unary_fwd(Unary k, double x) {
  switch (k) {
    case Unary::Relu: return x > 0 ? x : 0;
    case Unary::Silu: return x / (1.0 + std::exp(-x));
    case Unary::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Unary::Tanh: return std::tanh(x);
    case Unary::Abs: return std::fabs(x);
    case Unary::Log: return std::log(x);
    case Unary::Square: return x * x;
  }
  return 0;
}

double unary_bwd(Unary k, double x, double y) {
  switch (k) {
    case Unary::Relu: return x > 0 ? 1.0 : 0.0;
    case Unary::Silu: {
      double s = 1.0 / (1.0 + std::exp(-x));
      return s + x * s * (1.0 - s);
    }
    case Unary::Sigmoid: return y * (1.0 - y);
    case Unary::Tanh: return 1.0 - y * y;
    case Unary::Abs: return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    case Unary::Log: return 1.0 / x;
    case Unary::Square: return 2.0 * x;
  }
  return 0;
}
}  // namespace

int Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(Tensor v, bool requires_grad) { return push(std::move(v), requires_grad, nullptr); }

int Tape::add(int a, int b) {
  const Tensor &va = val(a), &vb = val(b);
  require_same_shape(va, vb, "tape add");
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] + vb[i];
  int id = push(std::move(out), requires_grad(a) || requires_grad(b), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_mut(a);
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_mut(b);
      for (int64_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    }
  };
  return id;
}

int Tape::sub(int a, int b) {
  const Tensor &va = val(a), &vb = val(b);
  require_same_shape(va, vb, "tape sub");
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] - vb[i];
  int id = push(std::move(out), requires_grad(a) || requires_grad(b), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_mut(a);
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_mut(b);
      for (int64_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  };
  return id;
}

int Tape::mul(int a, int b) {
  const Tensor &va = val(a), &vb = val(b);
  const bool a_scalar = va.size() == 1 && vb.size() > 1;
  const bool b_scalar = vb.size() == 1 && va.size() > 1;
  if (!a_scalar && !b_scalar) require_same_shape(va, vb, "tape mul");
  Tensor out(a_scalar ? vb.shape() : va.shape());
  for (int64_t i = 0; i < out.size(); ++i)
    out[i] = (a_scalar ? va[0] : va[i]) * (b_scalar ? vb[0] : vb[i]);
  int id = push(std::move(out), requires_grad(a) || requires_grad(b), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, b, id, a_scalar, b_scalar](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &va = t.val(a), &vb = t.val(b);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_mut(a);
      if (a_scalar) {
        double s = 0;
        for (int64_t i = 0; i < g.size(); ++i) s += g[i] * vb[i];
        ga[0] += s;
      } else {
        for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (b_scalar ? vb[0] : vb[i]);
      }
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_mut(b);
      if (b_scalar) {
        double s = 0;
        for (int64_t i = 0; i < g.size(); ++i) s += g[i] * va[i];
        gb[0] += s;
      } else {
        for (int64_t i = 0; i < g.size(); ++i) gb[i] += g[i] * (a_scalar ? va[0] : va[i]);
      }
    }
  };
  return id;
}

int Tape::div(int a, int b) {
  const Tensor &va = val(a), &vb = val(b);
  const bool b_scalar = vb.size() == 1 && va.size() > 1;
  if (!b_scalar) require_same_shape(va, vb, "tape div");
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] / (b_scalar ? vb[0] : vb[i]);
  int id = push(std::move(out), requires_grad(a) || requires_grad(b), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, b, id, b_scalar](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &va = t.val(a), &vb = t.val(b);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_mut(a);
      for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] / (b_scalar ? vb[0] : vb[i]);
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_mut(b);
      if (b_scalar) {
        double s = 0;
        for (int64_t i = 0; i < g.size(); ++i) s += g[i] * va[i];
        gb[0] -= s / (vb[0] * vb[0]);
      } else {
        for (int64_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * va[i] / (vb[i] * vb[i]);
      }
    }
  };
  return id;
}

int Tape::scale(int a, double c) {
  const Tensor& va = val(a);
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] * c;
  int id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, c, id](Tape& t) {
    if (!t.requires_grad(a)) return;
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_mut(a);
    for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
  };
  return id;
}

int Tape::add_const(int a, double c) {
  const Tensor& va = val(a);
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] + c;
  int id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id](Tape& t) {
    if (!t.requires_grad(a)) return;
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_mut(a);
    for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  };
  return id;
}

int Tape::unary(int a, Unary kind) {
  const Tensor& va = val(a);
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = unary_fwd(kind, va[i]);
  int id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, kind, id](Tape& t) {
    if (!t.requires_grad(a)) return;
    const Tensor& g = t.grad(id);
    const Tensor &x = t.val(a), &y = t.val(id);
    Tensor& ga = t.grad_mut(a);
    for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * unary_bwd(kind, x[i], y[i]);
  };
  return id;
}

int Tape::clamp_max(int a, double cap) {
  const Tensor& va = val(a);
  Tensor out(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = std::min(va[i], cap);
  int id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, cap, id](Tape& t) {
    if (!t.requires_grad(a)) return;
    const Tensor& g = t.grad(id);
    const Tensor& x = t.val(a);
    Tensor& ga = t.grad_mut(a);
    for (int64_t i = 0; i < g.size(); ++i)
      if (x[i] < cap) ga[i] += g[i];
  };
  return id;
}

int Tape::matmul(int a, int b) {
  const Tensor &va = val(a), &vb = val(b);
  if (va.ndim() != 2) throw std::invalid_argument("tape matmul: lhs must be rank 2");
  const bool vec = vb.ndim() == 1;
  const int m = va.dim(0), k = va.dim(1);
  const int n = vec ? 1 : vb.dim(1);
  if ((vec ? vb.dim(0) : vb.dim(0)) != k)
    throw std::invalid_argument("tape matmul: inner dimension mismatch");
  Tensor out(vec ? std::vector<int>{m} : std::vector<int>{m, n});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int p = 0; p < k; ++p)
        s += va[static_cast<int64_t>(i) * k + p] * vb[static_cast<int64_t>(p) * n + j];
      out[static_cast<int64_t>(i) * n + j] = s;
    }
  int id = push(std::move(out), requires_grad(a) || requires_grad(b), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, b, id, m, k, n](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &va = t.val(a), &vb = t.val(b);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_mut(a);
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
          double s = 0;
          for (int j = 0; j < n; ++j)
            s += g[static_cast<int64_t>(i) * n + j] * vb[static_cast<int64_t>(p) * n + j];
          ga[static_cast<int64_t>(i) * k + p] += s;
        }
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_mut(b);
      for (int p = 0; p < k; ++p)
        for (int j = 0; j < n; ++j) {
          double s = 0;
          for (int i = 0; i < m; ++i)
            s += va[static_cast<int64_t>(i) * k + p] * g[static_cast<int64_t>(i) * n + j];
          gb[static_cast<int64_t>(p) * n + j] += s;
        }
    }
  };
  return id;
}

int Tape::sum_all(int a) {
  const Tensor& va = val(a);
  double s = 0;
  for (int64_t i = 0; i < va.size(); ++i) s += va[i];
  int id = push(Tensor::scalar(s), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id](Tape& t) {
    if (!t.requires_grad(a)) return;
    const double g = t.grad(id)[0];
    Tensor& ga = t.grad_mut(a);
    for (int64_t i = 0; i < ga.size(); ++i) ga[i] += g;
  };
  return id;
}

int Tape::mean_all(int a) {
  const Tensor& va = val(a);
  double s = 0;
  for (int64_t i = 0; i < va.size(); ++i) s += va[i];
  const double inv = 1.0 / static_cast<double>(va.size());
  int id = push(Tensor::scalar(s * inv), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id, inv](Tape& t) {
    if (!t.requires_grad(a)) return;
    const double g = t.grad(id)[0] * inv;
    Tensor& ga = t.grad_mut(a);
    for (int64_t i = 0; i < ga.size(); ++i) ga[i] += g;
  };
  return id;
}

int Tape::mean_axes12(int a) {
  const Tensor& va = val(a);
  if (va.ndim() != 3) throw std::invalid_argument("tape mean_axes12: rank-3 input expected");
  const int c = va.dim(0), f = va.dim(1), k = va.dim(2);
  const double inv = 1.0 / (static_cast<double>(f) * k);
  Tensor out({c});
  for (int ci = 0; ci < c; ++ci) {
    double s = 0;
    for (int64_t i = 0; i < static_cast<int64_t>(f) * k; ++i)
      s += va[static_cast<int64_t>(ci) * f * k + i];
    out[ci] = s * inv;
  }
  int id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id, c, f, k, inv](Tape& t) {
    if (!t.requires_grad(a)) return;
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_mut(a);
    for (int ci = 0; ci < c; ++ci) {
      const double gv = g[ci] * inv;
      for (int64_t i = 0; i < static_cast<int64_t>(f) * k; ++i)
        ga[static_cast<int64_t>(ci) * f * k + i] += gv;
    }
  };
  return id;
}

int Tape::concat_ch(int a, int b) {
  const Tensor &va = val(a), &vb = val(b);
  if (va.ndim() != 3 || vb.ndim() != 3 || va.dim(1) != vb.dim(1) || va.dim(2) != vb.dim(2))
    throw std::invalid_argument("tape concat_ch: incompatible shapes");
  const int ca = va.dim(0), cb = vb.dim(0), f = va.dim(1), k = va.dim(2);
  Tensor out({ca + cb, f, k});
  for (int64_t i = 0; i < va.size(); ++i) out[i] = va[i];
  for (int64_t i = 0; i < vb.size(); ++i) out[va.size() + i] = vb[i];
  int id = push(std::move(out), requires_grad(a) || requires_grad(b), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const int64_t na = t.val(a).size();
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_mut(a);
      for (int64_t i = 0; i < na; ++i) ga[i] += g[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_mut(b);
      for (int64_t i = 0; i < gb.size(); ++i) gb[i] += g[na + i];
    }
  };
  return id;
}

int Tape::slice1d(int a, int start, int len) {
  const Tensor& va = val(a);
  if (va.ndim() != 1 || start < 0 || start + len > va.dim(0))
    throw std::invalid_argument("tape slice1d: bad range");
  Tensor out({len});
  for (int i = 0; i < len; ++i) out[i] = va[start + i];
  int id = push(std::move(out), requires_grad(a), nullptr);
  nodes_[static_cast<size_t>(id)].back = [a, id, start, len](Tape& t) {
    if (!t.requires_grad(a)) return;
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_mut(a);
    for (int i = 0; i < len; ++i) ga[start + i] += g[i];
  };
  return id;
}

int Tape::scale_axis(int x, int v, int axis) {
  const Tensor &vx = val(x), &vv = val(v);
  if (vx.ndim() != 3 || vv.ndim() != 1 || axis < 0 || axis > 2 || vv.dim(0) != vx.dim(axis))
    throw std::invalid_argument("tape scale_axis: bad shapes");
  const int c = vx.dim(0), f = vx.dim(1), k = vx.dim(2);
  Tensor out({c, f, k});
  for (int ci = 0; ci < c; ++ci)
    for (int fi = 0; fi < f; ++fi)
      for (int ki = 0; ki < k; ++ki) {
        const int j = axis == 0 ? ci : (axis == 1 ? fi : ki);
        out.at3(ci, fi, ki) = vx.at3(ci, fi, ki) * vv[j];
      }
  int id = push(std::move(out), requires_grad(x) || requires_grad(v), nullptr);
  nodes_[static_cast<size_t>(id)].back = [x, v, id, axis, c, f, k](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &vx = t.val(x), &vv = t.val(v);
    const bool gx = t.requires_grad(x), gv = t.requires_grad(v);
    Tensor* pgx = gx ? &t.grad_mut(x) : nullptr;
    Tensor* pgv = gv ? &t.grad_mut(v) : nullptr;
    for (int ci = 0; ci < c; ++ci)
      for (int fi = 0; fi < f; ++fi)
        for (int ki = 0; ki < k; ++ki) {
          const int j = axis == 0 ? ci : (axis == 1 ? fi : ki);
          const double gg = g.at3(ci, fi, ki);
          if (pgx) pgx->at3(ci, fi, ki) += gg * vv[j];
          if (pgv) (*pgv)[j] += gg * vx.at3(ci, fi, ki);
        }
  };
  return id;
}

int Tape::bias_axis(int x, int v, int axis) {
  const Tensor &vx = val(x), &vv = val(v);
  if (vx.ndim() != 3 || vv.ndim() != 1 || axis < 0 || axis > 2 || vv.dim(0) != vx.dim(axis))
    throw std::invalid_argument("tape bias_axis: bad shapes");
  const int c = vx.dim(0), f = vx.dim(1), k = vx.dim(2);
  Tensor out({c, f, k});
  for (int ci = 0; ci < c; ++ci)
    for (int fi = 0; fi < f; ++fi)
      for (int ki = 0; ki < k; ++ki) {
        const int j = axis == 0 ? ci : (axis == 1 ? fi : ki);
        out.at3(ci, fi, ki) = vx.at3(ci, fi, ki) + vv[j];
      }
  int id = push(std::move(out), requires_grad(x) || requires_grad(v), nullptr);
  nodes_[static_cast<size_t>(id)].back = [x, v, id, axis, c, f, k](Tape& t) {
    const Tensor& g = t.grad(id);
    const bool gx = t.requires_grad(x), gv = t.requires_grad(v);
    Tensor* pgx = gx ? &t.grad_mut(x) : nullptr;
    Tensor* pgv = gv ? &t.grad_mut(v) : nullptr;
    for (int ci = 0; ci < c; ++ci)
      for (int fi = 0; fi < f; ++fi)
        for (int ki = 0; ki < k; ++ki) {
          const int j = axis == 0 ? ci : (axis == 1 ? fi : ki);
          const double gg = g.at3(ci, fi, ki);
          if (pgx) pgx->at3(ci, fi, ki) += gg;
          if (pgv) (*pgv)[j] += gg;
        }
  };
  return id;
}

int Tape::conv2d(int x, int w, int bias, const Conv2dSpec& sp) {
  const Tensor &vx = val(x), &vw = val(w);
  if (vx.ndim() != 3 || vw.ndim() != 4) throw std::invalid_argument("tape conv2d: bad ranks");
  const int cin = vx.dim(0), h = vx.dim(1), wid = vx.dim(2);
  const int cout = vw.dim(0), kh = vw.dim(2), kw = vw.dim(3);
  if (vw.dim(1) != cin) throw std::invalid_argument("tape conv2d: channel mismatch");
  const int ho = (h + 2 * sp.pad_h - kh) / sp.stride_h + 1;
  const int wo = wid + 2 * sp.pad_w - sp.dil_w * (kw - 1);
  if (ho < 1 || wo < 1) throw std::invalid_argument("tape conv2d: output collapses");
  const Tensor* vb = bias >= 0 ? &val(bias) : nullptr;
  if (vb && (vb->ndim() != 1 || vb->dim(0) != cout))
    throw std::invalid_argument("tape conv2d: bias shape");

  Tensor out({cout, ho, wo});
  for (int co = 0; co < cout; ++co)
    for (int oh = 0; oh < ho; ++oh)
      for (int ow = 0; ow < wo; ++ow) {
        double s = vb ? (*vb)[co] : 0.0;
        for (int ci = 0; ci < cin; ++ci)
          for (int i = 0; i < kh; ++i) {
            const int ih = oh * sp.stride_h + i - sp.pad_h;
            if (ih < 0 || ih >= h) continue;
            for (int j = 0; j < kw; ++j) {
              const int iw = ow + j * sp.dil_w - sp.pad_w;
              if (iw < 0 || iw >= wid) continue;
              s += vw[((static_cast<int64_t>(co) * cin + ci) * kh + i) * kw + j] * vx.at3(ci, ih, iw);
            }
          }
        out.at3(co, oh, ow) = s;
      }

  bool ng = requires_grad(x) || requires_grad(w) || (bias >= 0 && requires_grad(bias));
  int id = push(std::move(out), ng, nullptr);
  const Conv2dSpec spc = sp;
  nodes_[static_cast<size_t>(id)].back = [x, w, bias, id, spc, cin, h, wid, cout, kh, kw, ho,
                                          wo](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &vx = t.val(x), &vw = t.val(w);
    const bool nx = t.requires_grad(x), nw = t.requires_grad(w);
    const bool nb = bias >= 0 && t.requires_grad(bias);
    Tensor* gx = nx ? &t.grad_mut(x) : nullptr;
    Tensor* gw = nw ? &t.grad_mut(w) : nullptr;
    Tensor* gb = nb ? &t.grad_mut(bias) : nullptr;
    for (int co = 0; co < cout; ++co)
      for (int oh = 0; oh < ho; ++oh)
        for (int ow = 0; ow < wo; ++ow) {
          const double gg = g.at3(co, oh, ow);
          if (gg == 0.0) continue;
          if (gb) (*gb)[co] += gg;
          for (int ci = 0; ci < cin; ++ci)
            for (int i = 0; i < kh; ++i) {
              const int ih = oh * spc.stride_h + i - spc.pad_h;
              if (ih < 0 || ih >= h) continue;
              for (int j = 0; j < kw; ++j) {
                const int iw = ow + j * spc.dil_w - spc.pad_w;
                if (iw < 0 || iw >= wid) continue;
                const int64_t wi = ((static_cast<int64_t>(co) * cin + ci) * kh + i) * kw + j;
                if (gx) gx->at3(ci, ih, iw) += vw[wi] * gg;
                if (gw) (*gw)[wi] += vx.at3(ci, ih, iw) * gg;
              }
            }
        }
  };
  return id;
}

int Tape::conv2d_transpose(int x, int w, int bias, int stride_h) {
  const Tensor &vx = val(x), &vw = val(w);
  if (vx.ndim() != 3 || vw.ndim() != 4) throw std::invalid_argument("tape conv2d_transpose: ranks");
  const int cin = vx.dim(0), h = vx.dim(1), wid = vx.dim(2);
  if (vw.dim(0) != cin || vw.dim(2) != stride_h || vw.dim(3) != 1)
    throw std::invalid_argument("tape conv2d_transpose: weight must be (Cin,Cout,stride,1)");
  const int cout = vw.dim(1);
  const int ho = h * stride_h;
  const Tensor* vb = bias >= 0 ? &val(bias) : nullptr;
  if (vb && (vb->ndim() != 1 || vb->dim(0) != cout))
    throw std::invalid_argument("tape conv2d_transpose: bias shape");

  Tensor out({cout, ho, wid});
  if (vb)
    for (int co = 0; co < cout; ++co)
      for (int oh = 0; oh < ho; ++oh)
        for (int ow = 0; ow < wid; ++ow) out.at3(co, oh, ow) = (*vb)[co];
  for (int ci = 0; ci < cin; ++ci)
    for (int ih = 0; ih < h; ++ih)
      for (int iw = 0; iw < wid; ++iw) {
        const double xv = vx.at3(ci, ih, iw);
        for (int co = 0; co < cout; ++co)
          for (int i = 0; i < stride_h; ++i)
            out.at3(co, ih * stride_h + i, iw) +=
                vw[((static_cast<int64_t>(ci) * cout + co) * stride_h + i)] * xv;
      }

  bool ng = requires_grad(x) || requires_grad(w) || (bias >= 0 && requires_grad(bias));
  int id = push(std::move(out), ng, nullptr);
  nodes_[static_cast<size_t>(id)].back = [x, w, bias, id, cin, h, wid, cout, stride_h](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &vx = t.val(x), &vw = t.val(w);
    const bool nx = t.requires_grad(x), nw = t.requires_grad(w);
    const bool nb = bias >= 0 && t.requires_grad(bias);
    Tensor* gx = nx ? &t.grad_mut(x) : nullptr;
    Tensor* gw = nw ? &t.grad_mut(w) : nullptr;
    if (nb) {
      Tensor& gb = t.grad_mut(bias);
      for (int co = 0; co < cout; ++co) {
        double s = 0;
        for (int oh = 0; oh < h * stride_h; ++oh)
          for (int ow = 0; ow < wid; ++ow) s += g.at3(co, oh, ow);
        gb[co] += s;
      }
    }
    for (int ci = 0; ci < cin; ++ci)
      for (int ih = 0; ih < h; ++ih)
        for (int iw = 0; iw < wid; ++iw) {
          const double xv = vx.at3(ci, ih, iw);
          double acc = 0;
          for (int co = 0; co < cout; ++co)
            for (int i = 0; i < stride_h; ++i) {
              const double gg = g.at3(co, ih * stride_h + i, iw);
              const int64_t widx = (static_cast<int64_t>(ci) * cout + co) * stride_h + i;
              if (gx) acc += vw[widx] * gg;
              if (gw) (*gw)[widx] += xv * gg;
            }
          if (gx) gx->at3(ci, ih, iw) += acc;
        }
  };
  return id;
}

int Tape::grouped_linear_freq(int x, int w, int bias, int groups) {
  const Tensor &vx = val(x), &vw = val(w);
  if (vx.ndim() != 3 || vw.ndim() != 3) throw std::invalid_argument("tape grouped_linear: ranks");
  const int c = vx.dim(0), f = vx.dim(1), k = vx.dim(2);
  if (c % groups != 0) throw std::invalid_argument("tape grouped_linear: channels % groups != 0");
  if (vw.dim(0) != groups || vw.dim(1) != f || vw.dim(2) != f)
    throw std::invalid_argument("tape grouped_linear: weight must be (G,F,F)");
  const Tensor* vb = bias >= 0 ? &val(bias) : nullptr;
  if (vb && (vb->ndim() != 2 || vb->dim(0) != groups || vb->dim(1) != f))
    throw std::invalid_argument("tape grouped_linear: bias must be (G,F)");
  const int per = c / groups;

  Tensor out({c, f, k});
  for (int ci = 0; ci < c; ++ci) {
    const int g = ci / per;
    for (int fo = 0; fo < f; ++fo) {
      const double b = vb ? vb->at2(g, fo) : 0.0;
      for (int ki = 0; ki < k; ++ki) {
        double s = b;
        for (int fi = 0; fi < f; ++fi)
          s += vw[(static_cast<int64_t>(g) * f + fo) * f + fi] * vx.at3(ci, fi, ki);
        out.at3(ci, fo, ki) = s;
      }
    }
  }

  bool ng = requires_grad(x) || requires_grad(w) || (bias >= 0 && requires_grad(bias));
  int id = push(std::move(out), ng, nullptr);
  nodes_[static_cast<size_t>(id)].back = [x, w, bias, id, c, f, k, per](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor &vx = t.val(x), &vw = t.val(w);
    const bool nx = t.requires_grad(x), nw = t.requires_grad(w);
    const bool nb = bias >= 0 && t.requires_grad(bias);
    Tensor* gx = nx ? &t.grad_mut(x) : nullptr;
    Tensor* gw = nw ? &t.grad_mut(w) : nullptr;
    Tensor* gb = nb ? &t.grad_mut(bias) : nullptr;
    for (int ci = 0; ci < c; ++ci) {
      const int gi = ci / per;
      for (int fo = 0; fo < f; ++fo)
        for (int ki = 0; ki < k; ++ki) {
          const double gg = g.at3(ci, fo, ki);
          if (gg == 0.0) continue;
          if (gb) gb->at2(gi, fo) += gg;
          for (int fi = 0; fi < f; ++fi) {
            const int64_t wi = (static_cast<int64_t>(gi) * f + fo) * f + fi;
            if (gx) gx->at3(ci, fi, ki) += vw[wi] * gg;
            if (gw) (*gw)[wi] += vx.at3(ci, fi, ki) * gg;
          }
        }
    }
  };
  return id;
}

int Tape::magnitude_power(int x, double exponent, double scalef) {
  const Tensor& vx = val(x);
  if (vx.ndim() != 3 || vx.dim(0) != 2)
    throw std::invalid_argument("tape magnitude_power: expected (2,F,K)");
  const int f = vx.dim(1), k = vx.dim(2);
  Tensor out({2, f, k});
  for (int fi = 0; fi < f; ++fi)
    for (int ki = 0; ki < k; ++ki) {
      const double re = vx.at3(0, fi, ki), im = vx.at3(1, fi, ki);
      const double m = std::hypot(re, im);
      if (m == 0.0) continue;
      const double s = scalef * std::pow(m, exponent - 1.0);
      out.at3(0, fi, ki) = s * re;
      out.at3(1, fi, ki) = s * im;
    }
  int id = push(std::move(out), requires_grad(x), nullptr);
  nodes_[static_cast<size_t>(id)].back = [x, id, exponent, scalef, f, k](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& g = t.grad(id);
    const Tensor& vx = t.val(x);
    Tensor& gx = t.grad_mut(x);
    for (int fi = 0; fi < f; ++fi)
      for (int ki = 0; ki < k; ++ki) {
        const double re = vx.at3(0, fi, ki), im = vx.at3(1, fi, ki);
        const double m = std::hypot(re, im);
        if (m < 1e-300) continue;
        const double s = scalef * std::pow(m, exponent - 1.0);
        const double dsdm = scalef * (exponent - 1.0) * std::pow(m, exponent - 2.0);
        const double gre = g.at3(0, fi, ki), gim = g.at3(1, fi, ki);
        // symmetric Jacobian of (re, im) -> s(m) * (re, im)
        const double j11 = s + dsdm * re * re / m;
        const double j12 = dsdm * re * im / m;
        const double j22 = s + dsdm * im * im / m;
        gx.at3(0, fi, ki) += j11 * gre + j12 * gim;
        gx.at3(1, fi, ki) += j12 * gre + j22 * gim;
      }
  };
  return id;
}

int Tape::decompress(int x, const CompressionParams& p) {
  p.validate();
  const double inv_a = 1.0 / p.exponent_a;
  return magnitude_power(x, inv_a, std::pow(1.0 / p.scale_b, inv_a));
}

int Tape::cmag(int x) {
  const Tensor& vx = val(x);
  if (vx.ndim() != 3 || vx.dim(0) != 2) throw std::invalid_argument("tape cmag: expected (2,F,K)");
  const int f = vx.dim(1), k = vx.dim(2);
  Tensor out({f, k});
  for (int fi = 0; fi < f; ++fi)
    for (int ki = 0; ki < k; ++ki)
      out.at2(fi, ki) = std::hypot(vx.at3(0, fi, ki), vx.at3(1, fi, ki));
  int id = push(std::move(out), requires_grad(x), nullptr);
  nodes_[static_cast<size_t>(id)].back = [x, id, f, k](Tape& t) {
    if (!t.requires_grad(x)) return;
    const Tensor& g = t.grad(id);
    const Tensor &vx = t.val(x), &vy = t.val(id);
    Tensor& gx = t.grad_mut(x);
    for (int fi = 0; fi < f; ++fi)
      for (int ki = 0; ki < k; ++ki) {
        const double m = vy.at2(fi, ki);
        if (m < 1e-300) continue;
        const double gg = g.at2(fi, ki) / m;
        gx.at3(0, fi, ki) += gg * vx.at3(0, fi, ki);
        gx.at3(1, fi, ki) += gg * vx.at3(1, fi, ki);
      }
  };
  return id;
}

int Tape::istft(int spec, const StftConfig& cfg, int64_t out_len) {
  cfg.validate();
  const Tensor& vs = val(spec);
  if (vs.ndim() != 3 || vs.dim(0) != 2 || vs.dim(1) != cfg.n_freq())
    throw std::invalid_argument("tape istft: spec shape does not match config");
  ComplexSpectrogram cs = tensor_to_spectrogram(vs, cfg);
  Waveform w = tmse::istft(cs, cfg, out_len);
  Tensor out({static_cast<int>(w.samples.size())});
  for (size_t i = 0; i < w.samples.size(); ++i) out[static_cast<int64_t>(i)] = w.samples[i];

  int id = push(std::move(out), requires_grad(spec), nullptr);
  const StftConfig cfgc = cfg;
  nodes_[static_cast<size_t>(id)].back = [spec, id, cfgc](Tape& t) {
    if (!t.requires_grad(spec)) return;
    const Tensor& g = t.grad(id);
    const Tensor& vs = t.val(spec);
    Tensor& gs = t.grad_mut(spec);
    const int n_frames = vs.dim(2);
    const int win = cfgc.window_len;
    const int pad = cfgc.center_pad ? cfgc.fft_len / 2 : 0;
    const std::vector<double> w = build_window(cfgc);
    const int64_t full_len = static_cast<int64_t>(n_frames - 1) * cfgc.hop + win;

    // rebuild the overlap envelope used by the forward pass
    std::vector<double> env(static_cast<size_t>(full_len), 0.0);
    for (int k = 0; k < n_frames; ++k)
      for (int i = 0; i < win; ++i)
        env[static_cast<size_t>(static_cast<int64_t>(k) * cfgc.hop + i)] +=
            w[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];

    std::vector<double> gfull(static_cast<size_t>(full_len), 0.0);
    for (int64_t i = 0; i < g.size(); ++i) {
      const int64_t p = i + pad;
      if (p < full_len && env[static_cast<size_t>(p)] > kEnvelopeFloor)
        gfull[static_cast<size_t>(p)] = g[i] / env[static_cast<size_t>(p)];
    }

    std::vector<double> gframe(static_cast<size_t>(cfgc.fft_len), 0.0);
    for (int k = 0; k < n_frames; ++k) {
      const int64_t start = static_cast<int64_t>(k) * cfgc.hop;
      for (int i = 0; i < win; ++i)
        gframe[static_cast<size_t>(i)] =
            w[static_cast<size_t>(i)] * gfull[static_cast<size_t>(start + i)];
      for (int i = win; i < cfgc.fft_len; ++i) gframe[static_cast<size_t>(i)] = 0.0;
      auto gbins = fft::irdft_onesided_adjoint(gframe.data(), cfgc.fft_len);
      for (int f = 0; f < static_cast<int>(gbins.size()); ++f) {
        gs.at3(0, f, k) += gbins[static_cast<size_t>(f)].real();
        gs.at3(1, f, k) += gbins[static_cast<size_t>(f)].imag();
      }
    }
  };
  return id;
}

int Tape::stft(int wav, const StftConfig& cfg) {
  cfg.validate();
  const Tensor& vw = val(wav);
  if (vw.ndim() != 1) throw std::invalid_argument("tape stft: expected rank-1 waveform");
  Waveform w;
  w.samples.assign(vw.data(), vw.data() + vw.size());
  ComplexSpectrogram cs = tmse::stft(w, cfg);
  Tensor out = spectrogram_to_tensor(cs);

  int id = push(std::move(out), requires_grad(wav), nullptr);
  const StftConfig cfgc = cfg;
  nodes_[static_cast<size_t>(id)].back = [wav, id, cfgc](Tape& t) {
    if (!t.requires_grad(wav)) return;
    const Tensor& g = t.grad(id);
    Tensor& gw = t.grad_mut(wav);
    const int n_freq = g.dim(1), n_frames = g.dim(2);
    const int win = cfgc.window_len;
    const int pad = cfgc.center_pad ? cfgc.fft_len / 2 : 0;
    const std::vector<double> wnd = build_window(cfgc);
    const int64_t n = gw.size();

    std::vector<fft::cplx> gbins(static_cast<size_t>(n_freq));
    for (int k = 0; k < n_frames; ++k) {
      for (int f = 0; f < n_freq; ++f)
        gbins[static_cast<size_t>(f)] = {g.at3(0, f, k), g.at3(1, f, k)};
      auto gframe = fft::rdft_onesided_adjoint(gbins.data(), cfgc.fft_len);
      const int64_t start = static_cast<int64_t>(k) * cfgc.hop - pad;
      for (int i = 0; i < win; ++i) {
        const int64_t p = start + i;
        if (p >= 0 && p < n)
          gw[p] += wnd[static_cast<size_t>(i)] * gframe[static_cast<size_t>(i)];
      }
    }
  };
  return id;
}

void Tape::backward(int loss_id) {
  if (val(loss_id).size() != 1) throw std::invalid_argument("tape backward: loss must be scalar");
  for (auto& n : nodes_)
    if (n.needs_grad) n.grad = Tensor(n.value.shape());
  if (!nodes_[static_cast<size_t>(loss_id)].needs_grad)
    throw std::invalid_argument("tape backward: loss does not depend on any parameter");
  grad_mut(loss_id)[0] = 1.0;
  for (int id = loss_id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.needs_grad && n.back) n.back(*this);
  }
}

}  // namespace tmse::ad
