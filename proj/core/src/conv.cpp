// Copyright (c) 2026 The trtkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trtkit/conv.hpp"

#include <Eigen/Core>
#include <algorithm>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Strided = Eigen::Map<MatRM, 0, Eigen::OuterStride<>>;
using CStrided = Eigen::Map<const MatRM, 0, Eigen::OuterStride<>>;
using CMapRM = Eigen::Map<const MatRM>;
using MapRM = Eigen::Map<MatRM>;

// A run of `n` rows pairing rows of the "gather" tensor (x for conv3d) with
// rows of the "scatter" tensor (output for conv3d). Row pitch is given in
// rows, so a pitch of 2 skips every other time step.
struct Run {
  int64_t tap;  // index of the kernel offset (i, j, k)
  int64_t a_row, a_pitch;
  int64_t b_row, b_pitch;
  int64_t n;
};

int64_t ceil_div(int64_t a, int64_t b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

// Enumerate runs for out = sum_tap in[o * s - p + tap * d] (conv3d).
std::vector<Run> conv_runs(const Shape& in, const std::array<int64_t, 3>& out, const std::array<int64_t, 3>& k,
                           const Conv3dSpec& spec) {
  std::vector<Run> runs;
  const int64_t h = in[0], w = in[1], t = in[2];
  const int64_t st = spec.stride[2], pt = spec.padding[2], dt = spec.dilation[2];
  for (int64_t i = 0; i < k[0]; ++i) {
    for (int64_t j = 0; j < k[1]; ++j) {
      for (int64_t l = 0; l < k[2]; ++l) {
        const int64_t tap = (i * k[1] + j) * k[2] + l;
        // valid output time range
        const int64_t shift = l * dt - pt;
        int64_t t0 = std::max<int64_t>(0, ceil_div(-shift, st));
        int64_t t1 = std::min<int64_t>(out[2], ceil_div(t - shift, st));
        if (t1 <= t0) continue;
        for (int64_t ho = 0; ho < out[0]; ++ho) {
          const int64_t hi = ho * spec.stride[0] - spec.padding[0] + i * spec.dilation[0];
          if (hi < 0 || hi >= h) continue;
          for (int64_t wo = 0; wo < out[1]; ++wo) {
            const int64_t wi = wo * spec.stride[1] - spec.padding[1] + j * spec.dilation[1];
            if (wi < 0 || wi >= w) continue;
            runs.push_back({tap, (hi * w + wi) * t + t0 * st + shift, st, (ho * out[1] + wo) * out[2] + t0, 1,
                            t1 - t0});
          }
        }
      }
    }
  }
  return runs;
}

// Enumerate runs for out[i * s - p + tap] += in[i] (transposed conv).
std::vector<Run> transpose_runs(const Shape& in, const std::array<int64_t, 3>& out,
                                const std::array<int64_t, 3>& k, const Conv3dSpec& spec) {
  std::vector<Run> runs;
  const int64_t h = in[0], w = in[1], t = in[2];
  const int64_t st = spec.stride[2], pt = spec.padding[2];
  for (int64_t i = 0; i < k[0]; ++i) {
    for (int64_t j = 0; j < k[1]; ++j) {
      for (int64_t l = 0; l < k[2]; ++l) {
        const int64_t tap = (i * k[1] + j) * k[2] + l;
        const int64_t shift = l - pt;
        int64_t t0 = std::max<int64_t>(0, ceil_div(-shift, st));
        int64_t t1 = std::min<int64_t>(t, ceil_div(out[2] - shift, st));
        if (t1 <= t0) continue;
        for (int64_t hi = 0; hi < h; ++hi) {
          const int64_t ho = hi * spec.stride[0] - spec.padding[0] + i;
          if (ho < 0 || ho >= out[0]) continue;
          for (int64_t wi = 0; wi < w; ++wi) {
            const int64_t wo = wi * spec.stride[1] - spec.padding[1] + j;
            if (wo < 0 || wo >= out[1]) continue;
            runs.push_back({tap, (hi * w + wi) * t + t0, 1, (ho * out[1] + wo) * out[2] + t0 * st + shift, st,
                            t1 - t0});
          }
        }
      }
    }
  }
  return runs;
}

struct GemmPlan {
  std::vector<Run> runs;
  int64_t ca, cb;  // channels of gather / scatter tensors
};

// b[run] += a[run] * W[tap]  where W[tap] is (ca x cb).
void forward_runs(const GemmPlan& plan, const double* a, double* b, const double* w) {
  const int64_t ca = plan.ca, cb = plan.cb;
  for (const Run& r : plan.runs) {
    CStrided A(a + r.a_row * ca, r.n, ca, Eigen::OuterStride<>(r.a_pitch * ca));
    Strided B(b + r.b_row * cb, r.n, cb, Eigen::OuterStride<>(r.b_pitch * cb));
    B.noalias() += A * CMapRM(w + r.tap * ca * cb, ca, cb);
  }
}

void backward_runs(const GemmPlan& plan, const double* a, const double* gb, double* ga, double* gw,
                   const double* w) {
  const int64_t ca = plan.ca, cb = plan.cb;
  for (const Run& r : plan.runs) {
    CStrided G(gb + r.b_row * cb, r.n, cb, Eigen::OuterStride<>(r.b_pitch * cb));
    if (ga) {
      Strided GA(ga + r.a_row * ca, r.n, ca, Eigen::OuterStride<>(r.a_pitch * ca));
      GA.noalias() += G * CMapRM(w + r.tap * ca * cb, ca, cb).transpose();
    }
    if (gw) {
      CStrided A(a + r.a_row * ca, r.n, ca, Eigen::OuterStride<>(r.a_pitch * ca));
      MapRM(gw + r.tap * ca * cb, ca, cb).noalias() += A.transpose() * G;
    }
  }
}

void check_spec(const Conv3dSpec& spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.stride[a] < 1 || spec.dilation[a] < 1 || spec.padding[a] < 0) {
      throw ConfigError("conv3d: invalid stride/dilation/padding");
    }
  }
}

void add_bias_rows(Tensor& y, const Var& bias, int64_t c) {
  if (!bias.defined()) return;
  if (bias.size() != c) throw ShapeError("conv3d: bias length mismatch");
  const int64_t rows = y.size() / c;
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t k = 0; k < c; ++k) y[r * c + k] += bias.value()[k];
  }
}

void bias_grad(detail::Node& self, size_t index, int64_t c) {
  if (self.inputs.size() <= index || !self.input(index).requires_grad) return;
  Tensor& g = self.input(index).grad_buffer();
  const int64_t rows = self.grad.size() / c;
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t k = 0; k < c; ++k) g[k] += self.grad[r * c + k];
  }
}

// Row of `in` read by each (output row, tap) pair, or -1 when the tap falls
// into padding. Lets conv3d run as one GEMM over an im2col matrix.
struct ColumnPlan {
  std::vector<int32_t> src;  // rows * taps
  int64_t rows, taps, cin, cout;
};

ColumnPlan column_plan(const Shape& in, const std::array<int64_t, 3>& out, const std::array<int64_t, 3>& k,
                       const Conv3dSpec& spec, int64_t cout) {
  ColumnPlan p{{}, out[0] * out[1] * out[2], k[0] * k[1] * k[2], in[3], cout};
  p.src.assign(static_cast<size_t>(p.rows * p.taps), -1);
  for (const Run& r : conv_runs(in, out, k, spec)) {
    for (int64_t n = 0; n < r.n; ++n) {
      p.src[static_cast<size_t>((r.b_row + n * r.b_pitch) * p.taps + r.tap)] =
          static_cast<int32_t>(r.a_row + n * r.a_pitch);
    }
  }
  return p;
}

// Rows [r0, r0 + col.rows()) of the im2col matrix.
void im2col(const ColumnPlan& p, const double* x, int64_t r0, MatRM& col) {
  for (int64_t r = 0; r < col.rows(); ++r) {
    double* dst = col.data() + r * p.taps * p.cin;
    const int32_t* src = p.src.data() + (r0 + r) * p.taps;
    for (int64_t t = 0; t < p.taps; ++t, dst += p.cin) {
      if (src[t] < 0) {
        std::fill(dst, dst + p.cin, 0.0);
      } else {
        std::copy(x + src[t] * p.cin, x + (src[t] + 1) * p.cin, dst);
      }
    }
  }
}

void col2im_add(const ColumnPlan& p, const MatRM& col, int64_t r0, double* gx) {
  for (int64_t r = 0; r < col.rows(); ++r) {
    const double* src = col.data() + r * p.taps * p.cin;
    const int32_t* idx = p.src.data() + (r0 + r) * p.taps;
    for (int64_t t = 0; t < p.taps; ++t, src += p.cin) {
      if (idx[t] < 0) continue;
      double* dst = gx + idx[t] * p.cin;
      for (int64_t c = 0; c < p.cin; ++c) dst[c] += src[c];
    }
  }
}

// Row blocks keep the column buffer cache-resident.
int64_t block_rows(const ColumnPlan& p) {
  return std::max<int64_t>(64, (int64_t{1} << 18) / std::max<int64_t>(1, p.taps * p.cin));
}

void column_forward(const ColumnPlan& p, const double* x, const double* w, double* y) {
  const int64_t kc = p.taps * p.cin, step = block_rows(p);
  MatRM col;
  for (int64_t r0 = 0; r0 < p.rows; r0 += step) {
    const int64_t n = std::min(step, p.rows - r0);
    col.resize(n, kc);
    im2col(p, x, r0, col);
    MapRM(y + r0 * p.cout, n, p.cout).noalias() = col * CMapRM(w, kc, p.cout);
  }
}

void column_backward(const ColumnPlan& p, const double* x, const double* w, const double* g, double* gx,
                     double* gw) {
  const int64_t kc = p.taps * p.cin, step = block_rows(p);
  MatRM col, gcol;
  for (int64_t r0 = 0; r0 < p.rows; r0 += step) {
    const int64_t n = std::min(step, p.rows - r0);
    const CMapRM gb(g + r0 * p.cout, n, p.cout);
    if (gw) {
      col.resize(n, kc);
      im2col(p, x, r0, col);
      MapRM(gw, kc, p.cout).noalias() += col.transpose() * gb;
    }
    if (gx) {
      gcol.noalias() = gb * CMapRM(w, kc, p.cout).transpose();
      col2im_add(p, gcol, r0, gx);
    }
  }
}

}  // namespace

Conv3dSpec Conv3dSpec::same(int kernel, int dilation) {
  Conv3dSpec s;
  const int pad = dilation * (kernel - 1) / 2;
  s.padding = {pad, pad, pad};
  s.dilation = {dilation, dilation, dilation};
  return s;
}

std::array<int64_t, 3> conv3d_output_dims(const Shape& input, const Shape& weight, const Conv3dSpec& spec) {
  std::array<int64_t, 3> out{};
  for (int a = 0; a < 3; ++a) {
    const int64_t span = static_cast<int64_t>(spec.dilation[a]) * (weight[a] - 1) + 1;
    const int64_t num = input[a] + 2 * spec.padding[a] - span;
    if (num < 0) throw ShapeError("conv3d: kernel larger than padded input");
    out[a] = num / spec.stride[a] + 1;
  }
  return out;
}

Var conv3d(const Var& x, const Var& weight, const Var& bias, const Conv3dSpec& spec) {
  check_spec(spec);
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 4 || ws.size() != 5 || ws[3] != xs[3]) {
    throw ShapeError("conv3d: input " + shape_string(xs) + " incompatible with weight " + shape_string(ws));
  }
  const auto od = conv3d_output_dims(xs, ws, spec);
  const int64_t cout = ws[4];
  auto plan = std::make_shared<ColumnPlan>(column_plan(xs, od, {ws[0], ws[1], ws[2]}, spec, cout));
  Tensor y({od[0], od[1], od[2], cout});
  column_forward(*plan, x.value().data(), weight.value().data(), y.data());
  add_bias_rows(y, bias, cout);
  std::vector<Var> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_op(std::move(y), std::move(inputs), [plan, cout](detail::Node& self) {
    auto& xi = self.input(0);
    auto& wi = self.input(1);
    column_backward(*plan, xi.value.data(), wi.value.data(), self.grad.data(),
                    xi.requires_grad ? xi.grad_buffer().data() : nullptr,
                    wi.requires_grad ? wi.grad_buffer().data() : nullptr);
    bias_grad(self, 2, cout);
  });
}

Var conv_transpose3d(const Var& x, const Var& weight, const Var& bias, const Conv3dSpec& spec) {
  check_spec(spec);
  if (spec.dilation != std::array<int, 3>{1, 1, 1}) throw ConfigError("conv_transpose3d: dilation unsupported");
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 4 || ws.size() != 5 || ws[3] != xs[3]) {
    throw ShapeError("conv_transpose3d: input " + shape_string(xs) + " incompatible with weight " +
                     shape_string(ws));
  }
  std::array<int64_t, 3> od{};
  for (int a = 0; a < 3; ++a) {
    od[a] = (xs[a] - 1) * spec.stride[a] - 2 * spec.padding[a] + ws[a];
    if (od[a] < 1) throw ShapeError("conv_transpose3d: empty output");
  }
  const int64_t cin = xs[3], cout = ws[4];
  auto plan =
      std::make_shared<GemmPlan>(GemmPlan{transpose_runs(xs, od, {ws[0], ws[1], ws[2]}, spec), cin, cout});
  Tensor y({od[0], od[1], od[2], cout});
  forward_runs(*plan, x.value().data(), y.data(), weight.value().data());
  add_bias_rows(y, bias, cout);
  std::vector<Var> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_op(std::move(y), std::move(inputs), [plan, cout](detail::Node& self) {
    auto& xi = self.input(0);
    auto& wi = self.input(1);
    backward_runs(*plan, xi.value.data(), self.grad.data(), xi.requires_grad ? xi.grad_buffer().data() : nullptr,
                  wi.requires_grad ? wi.grad_buffer().data() : nullptr, wi.value.data());
    bias_grad(self, 2, cout);
  });
}

Var depthwise_conv3d(const Var& x, const Var& weight, const Var& bias, const Conv3dSpec& spec) {
  check_spec(spec);
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 4 || ws.size() != 4 || ws[3] != xs[3]) {
    throw ShapeError("depthwise_conv3d: input " + shape_string(xs) + " incompatible with weight " +
                     shape_string(ws));
  }
  const auto od = conv3d_output_dims(xs, {ws[0], ws[1], ws[2]}, spec);
  const int64_t c = xs[3];
  auto runs = std::make_shared<std::vector<Run>>(conv_runs(xs, od, {ws[0], ws[1], ws[2]}, spec));
  Tensor y({od[0], od[1], od[2], c});
  const double* xd = x.value().data();
  const double* wd = weight.value().data();
  for (const Run& r : *runs) {
    for (int64_t n = 0; n < r.n; ++n) {
      const double* in = xd + (r.a_row + n * r.a_pitch) * c;
      double* out = y.data() + (r.b_row + n * r.b_pitch) * c;
      const double* wt = wd + r.tap * c;
      for (int64_t k = 0; k < c; ++k) out[k] += in[k] * wt[k];
    }
  }
  add_bias_rows(y, bias, c);
  std::vector<Var> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_op(std::move(y), std::move(inputs), [runs, c](detail::Node& self) {
    auto& xi = self.input(0);
    auto& wi = self.input(1);
    double* gx = xi.requires_grad ? xi.grad_buffer().data() : nullptr;
    double* gw = wi.requires_grad ? wi.grad_buffer().data() : nullptr;
    for (const Run& r : *runs) {
      for (int64_t n = 0; n < r.n; ++n) {
        const int64_t ia = (r.a_row + n * r.a_pitch) * c;
        const double* go = self.grad.data() + (r.b_row + n * r.b_pitch) * c;
        for (int64_t k = 0; k < c; ++k) {
          if (gx) gx[ia + k] += go[k] * wi.value[r.tap * c + k];
          if (gw) gw[r.tap * c + k] += go[k] * xi.value[ia + k];
        }
      }
    }
    bias_grad(self, 2, c);
  });
}

}  // namespace trtkit
