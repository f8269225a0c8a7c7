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

#include "trtkit/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

void require_same(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

int64_t last_dim(const Shape& s) { return s.empty() ? 1 : s.back(); }

template <typename F, typename D>
Var unary(const Var& x, F f, D df) {
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  for (int64_t i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
  return make_op(std::move(y), {x}, [df](detail::Node& self) {
    auto& in = self.input(0);
    if (!in.requires_grad) return;
    Tensor& g = in.grad_buffer();
    for (int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * df(in.value[i], self.value[i]);
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same(a, b, "add");
  Tensor y = a.value();
  y += b.value();
  return make_op(std::move(y), {a, b}, [](detail::Node& self) {
    for (size_t k = 0; k < 2; ++k) {
      if (self.input(k).requires_grad) self.input(k).grad_buffer() += self.grad;
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a, b, "sub");
  Tensor y = a.value();
  for (int64_t i = 0; i < y.size(); ++i) y[i] -= b.value()[i];
  return make_op(std::move(y), {a, b}, [](detail::Node& self) {
    if (self.input(0).requires_grad) self.input(0).grad_buffer() += self.grad;
    if (self.input(1).requires_grad) {
      Tensor& g = self.input(1).grad_buffer();
      for (int64_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same(a, b, "mul");
  Tensor y = a.value();
  for (int64_t i = 0; i < y.size(); ++i) y[i] *= b.value()[i];
  return make_op(std::move(y), {a, b}, [](detail::Node& self) {
    auto& a_in = self.input(0);
    auto& b_in = self.input(1);
    if (a_in.requires_grad) {
      Tensor& g = a_in.grad_buffer();
      for (int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * b_in.value[i];
    }
    if (b_in.requires_grad) {
      Tensor& g = b_in.grad_buffer();
      for (int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * a_in.value[i];
    }
  });
}

Var scale(const Var& x, double s) {
  return unary(x, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Var add_scalar(const Var& x, double s) {
  return unary(x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Var add_bias(const Var& x, const Var& bias) {
  const int64_t c = last_dim(x.shape());
  if (bias.size() != c) throw ShapeError("add_bias: bias length does not match last axis");
  Tensor y = x.value();
  const int64_t rows = y.size() / std::max<int64_t>(c, 1);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t j = 0; j < c; ++j) y[r * c + j] += bias.value()[j];
  }
  return make_op(std::move(y), {x, bias}, [c, rows](detail::Node& self) {
    if (self.input(0).requires_grad) self.input(0).grad_buffer() += self.grad;
    if (self.input(1).requires_grad) {
      Tensor& g = self.input(1).grad_buffer();
      for (int64_t r = 0; r < rows; ++r) {
        for (int64_t j = 0; j < c; ++j) g[j] += self.grad[r * c + j];
      }
    }
  });
}

Var relu(const Var& x) {
  return unary(x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& x, double slope) {
  return unary(x, [slope](double v) { return v > 0.0 ? v : slope * v; },
               [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Var gelu(const Var& x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [inv_sqrt_2pi](double v, double) {
        return 0.5 * (1.0 + std::erf(v * kInvSqrt2)) + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
      });
}

Var softplus(const Var& x) {
  return unary(
      x, [](double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); },
      [](double v, double) { return 1.0 / (1.0 + std::exp(-v)); });
}

Var reshape(const Var& x, Shape shape) {
  Tensor y = x.value().reshaped(std::move(shape));
  return make_op(std::move(y), {x}, [](detail::Node& self) {
    auto& in = self.input(0);
    if (!in.requires_grad) return;
    Tensor& g = in.grad_buffer();
    for (int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

namespace {

// Maps each output linear index to its input linear index.
std::vector<int64_t> permutation_map(const Shape& in_shape, const std::vector<int>& axes) {
  const int r = static_cast<int>(in_shape.size());
  std::vector<int64_t> in_strides(r, 1);
  for (int i = r - 2; i >= 0; --i) in_strides[i] = in_strides[i + 1] * in_shape[i + 1];
  Shape out_shape(r);
  std::vector<int64_t> strides(r);
  for (int i = 0; i < r; ++i) {
    out_shape[i] = in_shape[axes[i]];
    strides[i] = in_strides[axes[i]];
  }
  const int64_t n = numel(in_shape);
  std::vector<int64_t> map(static_cast<size_t>(n));
  std::vector<int64_t> idx(r, 0);
  int64_t src = 0;
  for (int64_t o = 0; o < n; ++o) {
    map[static_cast<size_t>(o)] = src;
    for (int k = r - 1; k >= 0; --k) {
      ++idx[k];
      src += strides[k];
      if (idx[k] < out_shape[k]) break;
      src -= strides[k] * out_shape[k];
      idx[k] = 0;
    }
  }
  return map;
}

}  // namespace

Var permute(const Var& x, const std::vector<int>& axes) {
  const Shape& in_shape = x.shape();
  if (axes.size() != in_shape.size()) throw ShapeError("permute: axis count mismatch");
  std::vector<int> check(axes);
  std::sort(check.begin(), check.end());
  for (size_t i = 0; i < check.size(); ++i) {
    if (check[i] != static_cast<int>(i)) throw ShapeError("permute: axes are not a permutation");
  }
  Shape out_shape(axes.size());
  for (size_t i = 0; i < axes.size(); ++i) out_shape[i] = in_shape[axes[i]];
  auto map = std::make_shared<std::vector<int64_t>>(permutation_map(in_shape, axes));
  Tensor y(out_shape);
  const Tensor& xv = x.value();
  for (int64_t o = 0; o < y.size(); ++o) y[o] = xv[(*map)[o]];
  return make_op(std::move(y), {x}, [map](detail::Node& self) {
    auto& in = self.input(0);
    if (!in.requires_grad) return;
    Tensor& g = in.grad_buffer();
    for (int64_t o = 0; o < self.grad.size(); ++o) g[(*map)[o]] += self.grad[o];
  });
}

Var concat_last(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_last: no inputs");
  Shape lead = parts[0].shape();
  lead.pop_back();
  std::vector<int64_t> widths;
  int64_t total = 0;
  for (const Var& p : parts) {
    Shape s = p.shape();
    const int64_t w = s.back();
    s.pop_back();
    if (s != lead) throw ShapeError("concat_last: leading dimensions differ");
    widths.push_back(w);
    total += w;
  }
  const int64_t rows = numel(lead);
  Shape out_shape = lead;
  out_shape.push_back(total);
  Tensor y(out_shape);
  int64_t off = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const Tensor& pv = parts[k].value();
    for (int64_t r = 0; r < rows; ++r) {
      std::copy_n(pv.data() + r * widths[k], widths[k], y.data() + r * total + off);
    }
    off += widths[k];
  }
  return make_op(std::move(y), parts, [widths, total, rows](detail::Node& self) {
    int64_t off = 0;
    for (size_t k = 0; k < widths.size(); ++k) {
      auto& in = self.input(k);
      if (in.requires_grad) {
        Tensor& g = in.grad_buffer();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t j = 0; j < widths[k]; ++j) g[r * widths[k] + j] += self.grad[r * total + off + j];
        }
      }
      off += widths[k];
    }
  });
}

Var matmul(const Var& a, const Var& b) {
  if (a.value().rank() != 2 || b.value().rank() != 2 || a.shape()[1] != b.shape()[0]) {
    throw ShapeError("matmul: incompatible shapes " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor y({m, n});
  MapRM(y.data(), m, n).noalias() = CMapRM(a.value().data(), m, k) * CMapRM(b.value().data(), k, n);
  return make_op(std::move(y), {a, b}, [m, k, n](detail::Node& self) {
    CMapRM g(self.grad.data(), m, n);
    auto& a_in = self.input(0);
    auto& b_in = self.input(1);
    if (a_in.requires_grad) {
      MapRM(a_in.grad_buffer().data(), m, k).noalias() += g * CMapRM(b_in.value.data(), k, n).transpose();
    }
    if (b_in.requires_grad) {
      MapRM(b_in.grad_buffer().data(), k, n).noalias() += CMapRM(a_in.value.data(), m, k).transpose() * g;
    }
  });
}

Var bmm(const Var& a, const Var& b, bool transpose_b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() != 3 || bs.size() != 3 || as[0] != bs[0]) throw ShapeError("bmm: expected rank-3 operands");
  const int64_t batch = as[0], m = as[1], k = as[2];
  const int64_t n = transpose_b ? bs[1] : bs[2];
  if ((transpose_b ? bs[2] : bs[1]) != k) {
    throw ShapeError("bmm: inner dimensions differ " + shape_string(as) + " x " + shape_string(bs));
  }
  Tensor y({batch, m, n});
  for (int64_t i = 0; i < batch; ++i) {
    CMapRM A(a.value().data() + i * m * k, m, k);
    MapRM Y(y.data() + i * m * n, m, n);
    if (transpose_b) {
      Y.noalias() = A * CMapRM(b.value().data() + i * n * k, n, k).transpose();
    } else {
      Y.noalias() = A * CMapRM(b.value().data() + i * k * n, k, n);
    }
  }
  return make_op(std::move(y), {a, b}, [batch, m, k, n, transpose_b](detail::Node& self) {
    auto& a_in = self.input(0);
    auto& b_in = self.input(1);
    double* ga = a_in.requires_grad ? a_in.grad_buffer().data() : nullptr;
    double* gb = b_in.requires_grad ? b_in.grad_buffer().data() : nullptr;
    for (int64_t i = 0; i < batch; ++i) {
      CMapRM G(self.grad.data() + i * m * n, m, n);
      CMapRM A(a_in.value.data() + i * m * k, m, k);
      if (transpose_b) {
        CMapRM B(b_in.value.data() + i * n * k, n, k);
        if (ga) MapRM(ga + i * m * k, m, k).noalias() += G * B;
        if (gb) MapRM(gb + i * n * k, n, k).noalias() += G.transpose() * A;
      } else {
        CMapRM B(b_in.value.data() + i * k * n, k, n);
        if (ga) MapRM(ga + i * m * k, m, k).noalias() += G * B.transpose();
        if (gb) MapRM(gb + i * k * n, k, n).noalias() += A.transpose() * G;
      }
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  const Shape& xs = x.shape();
  if (w.value().rank() != 2 || xs.empty() || xs.back() != w.shape()[0]) {
    throw ShapeError("linear: input " + shape_string(xs) + " incompatible with weight " +
                     shape_string(w.shape()));
  }
  const int64_t in = w.shape()[0], out = w.shape()[1];
  const int64_t rows = x.size() / in;
  Shape ys = xs;
  ys.back() = out;
  Tensor y(ys);
  MapRM Y(y.data(), rows, out);
  Y.noalias() = CMapRM(x.value().data(), rows, in) * CMapRM(w.value().data(), in, out);
  const bool has_bias = b.defined();
  if (has_bias) {
    if (b.size() != out) throw ShapeError("linear: bias length mismatch");
    Y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.value().data(), out);
  }
  std::vector<Var> inputs{x, w};
  if (has_bias) inputs.push_back(b);
  return make_op(std::move(y), std::move(inputs), [rows, in, out, has_bias](detail::Node& self) {
    CMapRM G(self.grad.data(), rows, out);
    auto& x_in = self.input(0);
    auto& w_in = self.input(1);
    if (x_in.requires_grad) {
      MapRM(x_in.grad_buffer().data(), rows, in).noalias() += G * CMapRM(w_in.value.data(), in, out).transpose();
    }
    if (w_in.requires_grad) {
      MapRM(w_in.grad_buffer().data(), in, out).noalias() += CMapRM(x_in.value.data(), rows, in).transpose() * G;
    }
    if (has_bias && self.input(2).requires_grad) {
      Eigen::Map<Eigen::RowVectorXd>(self.input(2).grad_buffer().data(), out) += G.colwise().sum();
    }
  });
}

Var softmax_last(const Var& x) {
  const int64_t c = last_dim(x.shape());
  const int64_t rows = x.size() / c;
  Tensor y(x.shape());
  const Tensor& xv = x.value();
  for (int64_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * c;
    double* out = y.data() + r * c;
    const double mx = *std::max_element(in, in + c);
    double s = 0.0;
    for (int64_t j = 0; j < c; ++j) s += (out[j] = std::exp(in[j] - mx));
    for (int64_t j = 0; j < c; ++j) out[j] /= s;
  }
  return make_op(std::move(y), {x}, [c, rows](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t r = 0; r < rows; ++r) {
      const double* yr = self.value.data() + r * c;
      const double* gr = self.grad.data() + r * c;
      double dot = 0.0;
      for (int64_t j = 0; j < c; ++j) dot += gr[j] * yr[j];
      for (int64_t j = 0; j < c; ++j) g[r * c + j] += yr[j] * (gr[j] - dot);
    }
  });
}

Var layer_norm_last(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const int64_t c = last_dim(x.shape());
  if (gamma.size() != c || beta.size() != c) throw ShapeError("layer_norm: affine size mismatch");
  const int64_t rows = x.size() / c;
  Tensor y(x.shape());
  auto xhat = std::make_shared<Tensor>(x.shape());
  auto inv_std = std::make_shared<std::vector<double>>(static_cast<size_t>(rows));
  const Tensor& xv = x.value();
  for (int64_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * c;
    double mean = 0.0;
    for (int64_t j = 0; j < c; ++j) mean += in[j];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (int64_t j = 0; j < c; ++j) var += (in[j] - mean) * (in[j] - mean);
    var /= static_cast<double>(c);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (int64_t j = 0; j < c; ++j) {
      const double h = (in[j] - mean) * is;
      (*xhat)[r * c + j] = h;
      y[r * c + j] = gamma.value()[j] * h + beta.value()[j];
    }
  }
  return make_op(std::move(y), {x, gamma, beta}, [c, rows, xhat, inv_std](detail::Node& self) {
    auto& x_in = self.input(0);
    auto& g_in = self.input(1);
    auto& b_in = self.input(2);
    if (g_in.requires_grad) {
      Tensor& gg = g_in.grad_buffer();
      for (int64_t i = 0; i < self.grad.size(); ++i) gg[i % c] += self.grad[i] * (*xhat)[i];
    }
    if (b_in.requires_grad) {
      Tensor& gb = b_in.grad_buffer();
      for (int64_t i = 0; i < self.grad.size(); ++i) gb[i % c] += self.grad[i];
    }
    if (x_in.requires_grad) {
      Tensor& gx = x_in.grad_buffer();
      std::vector<double> gh(static_cast<size_t>(c));
      for (int64_t r = 0; r < rows; ++r) {
        double m1 = 0.0, m2 = 0.0;
        for (int64_t j = 0; j < c; ++j) {
          gh[j] = self.grad[r * c + j] * g_in.value[j];
          m1 += gh[j];
          m2 += gh[j] * (*xhat)[r * c + j];
        }
        m1 /= static_cast<double>(c);
        m2 /= static_cast<double>(c);
        for (int64_t j = 0; j < c; ++j) {
          gx[r * c + j] += (*inv_std)[r] * (gh[j] - m1 - (*xhat)[r * c + j] * m2);
        }
      }
    }
  });
}

Var normalize_last(const Var& x) {
  const int64_t c = last_dim(x.shape());
  const int64_t rows = x.size() / c;
  Tensor y(x.shape());
  auto sums = std::make_shared<std::vector<double>>(static_cast<size_t>(rows));
  for (int64_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int64_t j = 0; j < c; ++j) s += x.value()[r * c + j];
    if (!(s > 0.0)) throw NumericalError("normalize_last: nonpositive row sum");
    (*sums)[r] = s;
    for (int64_t j = 0; j < c; ++j) y[r * c + j] = x.value()[r * c + j] / s;
  }
  return make_op(std::move(y), {x}, [c, rows, sums](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (int64_t j = 0; j < c; ++j) dot += self.grad[r * c + j] * self.value[r * c + j];
      for (int64_t j = 0; j < c; ++j) g[r * c + j] += (self.grad[r * c + j] - dot) / (*sums)[r];
    }
  });
}

Var avg_pool_spatial(const Var& x, int factor) {
  const Shape& s = x.shape();
  if (s.size() != 4) throw ShapeError("avg_pool_spatial: expected (H, W, T, C)");
  const int64_t h = s[0], w = s[1], tc = s[2] * s[3];
  if (factor < 1 || h % factor || w % factor) throw ShapeError("avg_pool_spatial: indivisible spatial dims");
  const int64_t ho = h / factor, wo = w / factor;
  const double inv = 1.0 / (factor * factor);
  Tensor y({ho, wo, s[2], s[3]});
  const Tensor& xv = x.value();
  for (int64_t i = 0; i < h; ++i) {
    for (int64_t j = 0; j < w; ++j) {
      const double* in = xv.data() + (i * w + j) * tc;
      double* out = y.data() + ((i / factor) * wo + j / factor) * tc;
      for (int64_t k = 0; k < tc; ++k) out[k] += inv * in[k];
    }
  }
  return make_op(std::move(y), {x}, [h, w, wo, tc, factor, inv](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t i = 0; i < h; ++i) {
      for (int64_t j = 0; j < w; ++j) {
        const double* go = self.grad.data() + ((i / factor) * wo + j / factor) * tc;
        double* gi = g.data() + (i * w + j) * tc;
        for (int64_t k = 0; k < tc; ++k) gi[k] += inv * go[k];
      }
    }
  });
}

Var upsample_nearest_spatial(const Var& x, int factor) {
  const Shape& s = x.shape();
  if (s.size() != 4) throw ShapeError("upsample_nearest_spatial: expected (H, W, T, C)");
  if (factor < 1) throw ShapeError("upsample_nearest_spatial: factor must be >= 1");
  const int64_t h = s[0] * factor, w = s[1] * factor, wi = s[1], tc = s[2] * s[3];
  Tensor y({h, w, s[2], s[3]});
  const Tensor& xv = x.value();
  for (int64_t i = 0; i < h; ++i) {
    for (int64_t j = 0; j < w; ++j) {
      std::copy_n(xv.data() + ((i / factor) * wi + j / factor) * tc, tc, y.data() + (i * w + j) * tc);
    }
  }
  return make_op(std::move(y), {x}, [h, w, wi, tc, factor](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t i = 0; i < h; ++i) {
      for (int64_t j = 0; j < w; ++j) {
        const double* go = self.grad.data() + (i * w + j) * tc;
        double* gi = g.data() + ((i / factor) * wi + j / factor) * tc;
        for (int64_t k = 0; k < tc; ++k) gi[k] += go[k];
      }
    }
  });
}

Var sum_all(const Var& x) {
  Tensor y({1}, x.value().sum());
  return make_op(std::move(y), {x}, [](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
  });
}

Var mean_all(const Var& x) {
  if (x.size() == 0) throw ShapeError("mean_all: empty tensor");
  return scale(sum_all(x), 1.0 / static_cast<double>(x.size()));
}

Var dot_const(const Var& x, const Tensor& w) {
  if (x.value().size() != w.size()) throw ShapeError("dot_const: size mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < w.size(); ++i) s += x.value()[i] * w[i];
  auto weights = std::make_shared<Tensor>(w);
  return make_op(Tensor({1}, s), {x}, [weights](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[0] * (*weights)[i];
  });
}

Tensor argmax_last(const Tensor& x) {
  const int64_t c = last_dim(x.shape());
  const int64_t rows = x.size() / c;
  Shape s = x.shape();
  s.pop_back();
  Tensor idx(s);
  for (int64_t r = 0; r < rows; ++r) {
    const double* row = x.data() + r * c;
    idx[r] = static_cast<double>(std::max_element(row, row + c) - row);
  }
  return idx;
}

Var max_last(const Var& x) {
  const int64_t c = last_dim(x.shape());
  const int64_t rows = x.size() / c;
  auto idx = std::make_shared<Tensor>(argmax_last(x.value()));
  Tensor y(idx->shape());
  for (int64_t r = 0; r < rows; ++r) y[r] = x.value()[r * c + static_cast<int64_t>((*idx)[r])];
  return make_op(std::move(y), {x}, [c, rows, idx](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t r = 0; r < rows; ++r) g[r * c + static_cast<int64_t>((*idx)[r])] += self.grad[r];
  });
}

Var soft_argmax_last(const Var& x, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("soft_argmax: temperature must be positive");
  const int64_t c = last_dim(x.shape());
  const int64_t rows = x.size() / c;
  Shape s = x.shape();
  s.pop_back();
  Tensor y(s);
  auto probs = std::make_shared<Tensor>(x.shape());
  for (int64_t r = 0; r < rows; ++r) {
    const double* in = x.value().data() + r * c;
    double* p = probs->data() + r * c;
    const double mx = *std::max_element(in, in + c);
    double z = 0.0;
    for (int64_t j = 0; j < c; ++j) z += (p[j] = std::exp((in[j] - mx) / temperature));
    double d = 0.0;
    for (int64_t j = 0; j < c; ++j) {
      p[j] /= z;
      d += static_cast<double>(j) * p[j];
    }
    y[r] = d;
  }
  return make_op(std::move(y), {x}, [c, rows, probs, temperature](detail::Node& self) {
    Tensor& g = self.input(0).grad_buffer();
    for (int64_t r = 0; r < rows; ++r) {
      const double d = self.value[r];
      const double go = self.grad[r] / temperature;
      for (int64_t j = 0; j < c; ++j) {
        g[r * c + j] += go * (*probs)[r * c + j] * (static_cast<double>(j) - d);
      }
    }
  });
}

Var kl_divergence(const Var& p, const Tensor& q, double eps) {
  if (p.shape() != q.shape()) throw ShapeError("kl_divergence: shape mismatch");
  const int64_t c = last_dim(q.shape());
  const int64_t rows = q.size() / c;
  const Tensor& pv = p.value();
  for (int64_t r = 0; r < rows; ++r) {
    double sp = 0.0, sq = 0.0;
    for (int64_t j = 0; j < c; ++j) {
      sp += pv[r * c + j];
      sq += q[r * c + j];
    }
    if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6) {
      throw NumericalError("kl_divergence: inputs must be normalised along the last axis");
    }
  }
  double total = 0.0;
  auto logs = std::make_shared<Tensor>(q.shape());
  for (int64_t i = 0; i < q.size(); ++i) {
    (*logs)[i] = std::log((pv[i] + eps) / (q[i] + eps));
    total += pv[i] * (*logs)[i];
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);
  return make_op(Tensor({1}, total * inv_rows), {p}, [logs, eps, inv_rows](detail::Node& self) {
    auto& in = self.input(0);
    Tensor& g = in.grad_buffer();
    const double go = self.grad[0] * inv_rows;
    for (int64_t i = 0; i < g.size(); ++i) {
      g[i] += go * ((*logs)[i] + in.value[i] / (in.value[i] + eps));
    }
  });
}

Var tv_loss(const Var& d) {
  const Shape& s = d.shape();
  if (s.size() != 2) throw ShapeError("tv_loss: expected a 2-D map");
  const int64_t h = s[0], w = s[1];
  const int64_t pairs = (h - 1) * w + h * (w - 1);
  const Tensor& v = d.value();
  double total = 0.0;
  for (int64_t i = 0; i < h; ++i) {
    for (int64_t j = 0; j < w; ++j) {
      if (i + 1 < h) total += std::abs(v[(i + 1) * w + j] - v[i * w + j]);
      if (j + 1 < w) total += std::abs(v[i * w + j + 1] - v[i * w + j]);
    }
  }
  const double inv = pairs > 0 ? 1.0 / static_cast<double>(pairs) : 0.0;
  return make_op(Tensor({1}, total * inv), {d}, [h, w, inv](detail::Node& self) {
    auto& in = self.input(0);
    Tensor& g = in.grad_buffer();
    const double go = self.grad[0] * inv;
    auto sign = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    for (int64_t i = 0; i < h; ++i) {
      for (int64_t j = 0; j < w; ++j) {
        if (i + 1 < h) {
          const double sg = go * sign(in.value[(i + 1) * w + j] - in.value[i * w + j]);
          g[(i + 1) * w + j] += sg;
          g[i * w + j] -= sg;
        }
        if (j + 1 < w) {
          const double sg = go * sign(in.value[i * w + j + 1] - in.value[i * w + j]);
          g[i * w + j + 1] += sg;
          g[i * w + j] -= sg;
        }
      }
    }
  });
}

Var l1_mean(const Var& a, const Tensor& b) {
  return masked_l1_mean(a, b, Tensor(b.shape(), 1.0));
}

Var masked_l1_mean(const Var& a, const Tensor& b, const Tensor& mask) {
  if (a.shape() != b.shape() || b.shape() != mask.shape()) throw ShapeError("l1 loss: shape mismatch");
  double total = 0.0;
  int64_t count = 0;
  for (int64_t i = 0; i < b.size(); ++i) {
    if (mask[i] == 0.0) continue;
    total += std::abs(a.value()[i] - b[i]);
    ++count;
  }
  const double inv = count > 0 ? 1.0 / static_cast<double>(count) : 0.0;
  auto target = std::make_shared<Tensor>(b);
  auto m = std::make_shared<Tensor>(mask);
  return make_op(Tensor({1}, total * inv), {a}, [target, m, inv](detail::Node& self) {
    auto& in = self.input(0);
    Tensor& g = in.grad_buffer();
    const double go = self.grad[0] * inv;
    for (int64_t i = 0; i < g.size(); ++i) {
      if ((*m)[i] == 0.0) continue;
      const double diff = in.value[i] - (*target)[i];
      g[i] += diff > 0.0 ? go : (diff < 0.0 ? -go : 0.0);
    }
  });
}

}  // namespace trtkit
