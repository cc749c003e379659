// Copyright 2026 The pmae Authors
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

#include "pmae/numcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pmae/numcore/kernels.hpp"

namespace pmae::ops {
namespace {

[[noreturn]] void shape_fail(const char* op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": " + detail);
}

std::string two(const Shape& a, const Shape& b) { return shape_str(a) + " vs " + shape_str(b); }

void require_matrix(const char* op, const Tensor& t) {
  if (t.rank() != 2) shape_fail(op, "expected a matrix, got " + shape_str(t.shape()));
}

void add_into(Tensor& dst, const Tensor& src) {
  double* d = dst.data();
  const double* s = src.data();
  for (std::size_t i = 0; i < src.numel(); ++i) d[i] += s[i];
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_matrix("matmul", A);
  require_matrix("matmul", B);
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
  if (B.dim(0) != k) shape_fail("matmul", "inner dimensions differ " + two(A.shape(), B.shape()));
  Tensor out(Shape{m, n});
  kernels::matmul(A.values(), B.values(), out.values(), m, k, n);
  const Tensor* pa = &A;
  const Tensor* pb = &B;
  return a.graph().record(
      std::move(out), {a, b},
      [pa, pb, m, k, n](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        if (in[0]) kernels::matmul_nt(g.values(), pb->values(), in[0]->values(), m, n, k, true);
        if (in[1]) kernels::matmul_tn(pa->values(), g.values(), in[1]->values(), k, m, n, true);
      },
      "matmul");
}

Var add(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() == B.shape()) {
    Tensor out = A;
    add_into(out, B);
    return a.graph().record(
        std::move(out), {a, b},
        [](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
          if (in[0]) add_into(*in[0], g);
          if (in[1]) add_into(*in[1], g);
        },
        "add");
  }
  const std::size_t c = A.cols();
  if (B.numel() != c || B.rows() != 1) shape_fail("add", "cannot broadcast " + two(A.shape(), B.shape()));
  Tensor out = A;
  const std::size_t r = A.rows();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] += B[j];
  return a.graph().record(
      std::move(out), {a, b},
      [r, c](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        if (in[0]) add_into(*in[0], g);
        if (in[1])
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) (*in[1])[j] += g[i * c + j];
      },
      "add");
}

Var sub(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) shape_fail("sub", "shape mismatch " + two(A.shape(), B.shape()));
  Tensor out = A;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= B[i];
  return a.graph().record(
      std::move(out), {a, b},
      [](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        if (in[0]) add_into(*in[0], g);
        if (in[1])
          for (std::size_t i = 0; i < g.numel(); ++i) (*in[1])[i] -= g[i];
      },
      "sub");
}

Var mul(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) shape_fail("mul", "shape mismatch " + two(A.shape(), B.shape()));
  Tensor out = A;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= B[i];
  const Tensor* pa = &A;
  const Tensor* pb = &B;
  return a.graph().record(
      std::move(out), {a, b},
      [pa, pb](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        if (in[0])
          for (std::size_t i = 0; i < g.numel(); ++i) (*in[0])[i] += g[i] * (*pb)[i];
        if (in[1])
          for (std::size_t i = 0; i < g.numel(); ++i) (*in[1])[i] += g[i] * (*pa)[i];
      },
      "mul");
}

Var scale(const Var& a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return a.graph().record(
      std::move(out), {a},
      [factor](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < g.numel(); ++i) (*in[0])[i] += factor * g[i];
      },
      "scale");
}

Var add_scalar(const Var& a, double value) {
  Tensor out = a.value();
  for (double& v : out.values()) v += value;
  return a.graph().record(
      std::move(out), {a}, [](const Tensor&, const Tensor& g, std::span<Tensor* const> in) { add_into(*in[0], g); },
      "add_scalar");
}

Var reshape(const Var& a, Shape shape) {
  if (shape_numel(shape) != a.value().numel()) {
    shape_fail("reshape", "cannot view " + two(a.shape(), shape));
  }
  Tensor out = a.value().reshaped(std::move(shape));
  return a.graph().record(
      std::move(out), {a}, [](const Tensor&, const Tensor& g, std::span<Tensor* const> in) { add_into(*in[0], g); },
      "reshape");
}

Var transpose(const Var& a) {
  const Tensor& A = a.value();
  require_matrix("transpose", A);
  const std::size_t r = A.dim(0), c = A.dim(1);
  Tensor out(Shape{c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = A[i * c + j];
  return a.graph().record(
      std::move(out), {a},
      [r, c](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) (*in[0])[i * c + j] += g[j * r + i];
      },
      "transpose");
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) shape_fail("concat_rows", "no inputs");
  const std::size_t c = parts[0].value().cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    require_matrix("concat_rows", p.value());
    if (p.value().cols() != c) shape_fail("concat_rows", "column mismatch " + two(parts[0].shape(), p.shape()));
    rows += p.value().rows();
  }
  Tensor out(Shape{rows, c});
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    offsets.push_back(off);
    std::copy(p.value().data(), p.value().data() + p.value().numel(), out.data() + off);
    off += p.value().numel();
  }
  return parts[0].graph().record(
      std::move(out), std::vector<Var>(parts.begin(), parts.end()),
      [offsets](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (!in[k]) continue;
          for (std::size_t i = 0; i < in[k]->numel(); ++i) (*in[k])[i] += g[offsets[k] + i];
        }
      },
      "concat_rows");
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) shape_fail("concat_cols", "no inputs");
  const std::size_t r = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    require_matrix("concat_cols", p.value());
    if (p.value().rows() != r) shape_fail("concat_cols", "row mismatch " + two(parts[0].shape(), p.shape()));
    widths.push_back(p.value().cols());
    total += p.value().cols();
  }
  Tensor out(Shape{r, total});
  std::size_t col = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& P = parts[k].value();
    for (std::size_t i = 0; i < r; ++i)
      std::copy(P.data() + i * widths[k], P.data() + (i + 1) * widths[k], out.data() + i * total + col);
    col += widths[k];
  }
  return parts[0].graph().record(
      std::move(out), std::vector<Var>(parts.begin(), parts.end()),
      [widths, r, total](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        std::size_t col = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (in[k])
            for (std::size_t i = 0; i < r; ++i)
              for (std::size_t j = 0; j < widths[k]; ++j) (*in[k])[i * widths[k] + j] += g[i * total + col + j];
          col += widths[k];
        }
      },
      "concat_cols");
}

Var gather_rows(const Var& a, std::span<const std::size_t> indices) {
  const Tensor& A = a.value();
  const std::size_t r = A.rows(), c = A.cols();
  for (std::size_t idx : indices) {
    if (idx >= r) shape_fail("gather_rows", "index " + std::to_string(idx) + " out of range for " + shape_str(A.shape()));
  }
  Tensor out(Shape{indices.size(), c});
  for (std::size_t i = 0; i < indices.size(); ++i)
    std::copy(A.data() + indices[i] * c, A.data() + (indices[i] + 1) * c, out.data() + i * c);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return a.graph().record(
      std::move(out), {a},
      [idx, c](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < idx.size(); ++i)
          for (std::size_t j = 0; j < c; ++j) (*in[0])[idx[i] * c + j] += g[i * c + j];
      },
      "gather_rows");
}

Var slice_cols(const Var& a, std::size_t start, std::size_t count) {
  const Tensor& A = a.value();
  require_matrix("slice_cols", A);
  const std::size_t r = A.dim(0), c = A.dim(1);
  if (start + count > c) shape_fail("slice_cols", "columns [" + std::to_string(start) + ", " +
                                                      std::to_string(start + count) + ") exceed " + shape_str(A.shape()));
  Tensor out(Shape{r, count});
  for (std::size_t i = 0; i < r; ++i)
    std::copy(A.data() + i * c + start, A.data() + i * c + start + count, out.data() + i * count);
  return a.graph().record(
      std::move(out), {a},
      [r, c, start, count](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < count; ++j) (*in[0])[i * c + start + j] += g[i * count + j];
      },
      "slice_cols");
}

Var softmax(const Var& a) {
  const Tensor& A = a.value();
  const std::size_t r = A.rows(), c = A.cols();
  Tensor out(A.shape());
  for (std::size_t i = 0; i < r; ++i) {
    const double* x = A.data() + i * c;
    double* y = out.data() + i * c;
    const double mx = *std::max_element(x, x + c);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      y[j] = std::exp(x[j] - mx);
      s += y[j];
    }
    for (std::size_t j = 0; j < c; ++j) y[j] /= s;
  }
  return a.graph().record(
      std::move(out), {a},
      [r, c](const Tensor& y, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < r; ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
          for (std::size_t j = 0; j < c; ++j) (*in[0])[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
        }
      },
      "softmax");
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Tensor& X = x.value();
  const std::size_t r = X.rows(), c = X.cols();
  if (gain.value().numel() != c || bias.value().numel() != c) {
    shape_fail("layer_norm", "gain/bias " + two(gain.shape(), bias.shape()) + " for input " + shape_str(X.shape()));
  }
  const Tensor& G = gain.value();
  const Tensor& B = bias.value();
  Tensor out(X.shape());
  Tensor xhat(X.shape());
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double* xi = X.data() + i * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += xi[j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (xi[j] - mu) * (xi[j] - mu);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (xi[j] - mu) * inv_std[i];
      out[i * c + j] = G[j] * xhat[i * c + j] + B[j];
    }
  }
  const Tensor* pg = &G;
  return x.graph().record(
      std::move(out), {x, gain, bias},
      [r, c, pg, xhat = std::move(xhat), inv_std = std::move(inv_std)](const Tensor&, const Tensor& g,
                                                                         std::span<Tensor* const> in) {
        const double inv_c = 1.0 / static_cast<double>(c);
        std::vector<double> dxhat(c);
        for (std::size_t i = 0; i < r; ++i) {
          const double* gi = g.data() + i * c;
          const double* xh = xhat.data() + i * c;
          if (in[1])
            for (std::size_t j = 0; j < c; ++j) (*in[1])[j] += gi[j] * xh[j];
          if (in[2])
            for (std::size_t j = 0; j < c; ++j) (*in[2])[j] += gi[j];
          if (!in[0]) continue;
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t j = 0; j < c; ++j) {
            dxhat[j] = gi[j] * (*pg)[j];
            mean_d += dxhat[j];
            mean_dx += dxhat[j] * xh[j];
          }
          mean_d *= inv_c;
          mean_dx *= inv_c;
          for (std::size_t j = 0; j < c; ++j) (*in[0])[i * c + j] += inv_std[i] * (dxhat[j] - mean_d - xh[j] * mean_dx);
        }
      },
      "layer_norm");
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

Var gelu(const Var& a) {
  const Tensor& A = a.value();
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.numel(); ++i) out[i] = 0.5 * A[i] * (1.0 + std::erf(A[i] * kInvSqrt2));
  const Tensor* pa = &A;
  return a.graph().record(
      std::move(out), {a},
      [pa](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        constexpr double kInvSqrt2Pi = 0.3989422804014327;
        for (std::size_t i = 0; i < g.numel(); ++i) {
          const double x = (*pa)[i];
          const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
          const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
          (*in[0])[i] += g[i] * (cdf + x * pdf);
        }
      },
      "gelu");
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  const Tensor& X = x.value();
  const Tensor& W = weight.value();
  require_matrix("linear", W);
  const std::size_t r = X.rows(), in_dim = X.cols(), out_dim = W.dim(1);
  if (W.dim(0) != in_dim || bias.value().numel() != out_dim) {
    shape_fail("linear", "input " + shape_str(X.shape()) + " weight " + shape_str(W.shape()) + " bias " +
                             shape_str(bias.shape()));
  }
  const Tensor& B = bias.value();
  Tensor out(Shape{r, out_dim});
  for (std::size_t i = 0; i < r; ++i) std::copy(B.data(), B.data() + out_dim, out.data() + i * out_dim);
  kernels::matmul(X.values(), W.values(), out.values(), r, in_dim, out_dim, true);
  const Tensor* px = &X;
  const Tensor* pw = &W;
  return x.graph().record(
      std::move(out), {x, weight, bias},
      [px, pw, r, in_dim, out_dim](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        if (in[0]) kernels::matmul_nt(g.values(), pw->values(), in[0]->values(), r, out_dim, in_dim, true);
        if (in[1]) kernels::matmul_tn(px->values(), g.values(), in[1]->values(), in_dim, r, out_dim, true);
        if (in[2])
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < out_dim; ++j) (*in[2])[j] += g[i * out_dim + j];
      },
      "linear");
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.graph().record(
      Tensor::scalar(s), {a},
      [](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (double& v : in[0]->values()) v += g[0];
      },
      "sum");
}

Var mean(const Var& a) {
  const std::size_t n = a.value().numel();
  if (n == 0) shape_fail("mean", "empty input");
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const double inv = 1.0 / static_cast<double>(n);
  return a.graph().record(
      Tensor::scalar(s * inv), {a},
      [inv](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (double& v : in[0]->values()) v += g[0] * inv;
      },
      "mean");
}

Var mean_rows(const Var& a) {
  const Tensor& A = a.value();
  const std::size_t r = A.rows(), c = A.cols();
  if (r == 0) shape_fail("mean_rows", "empty input " + shape_str(A.shape()));
  Tensor out(Shape{1, c});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += A[i * c + j];
  const double inv = 1.0 / static_cast<double>(r);
  for (double& v : out.values()) v *= inv;
  return a.graph().record(
      std::move(out), {a},
      [r, c, inv](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) (*in[0])[i * c + j] += g[j] * inv;
      },
      "mean_rows");
}

Var max_pool_rows(const Var& a, std::size_t group) {
  const Tensor& A = a.value();
  const std::size_t r = A.rows(), c = A.cols();
  if (group == 0 || r % group != 0) {
    shape_fail("max_pool_rows", "group " + std::to_string(group) + " does not divide rows of " + shape_str(A.shape()));
  }
  const std::size_t groups = r / group;
  Tensor out(Shape{groups, c});
  std::vector<std::size_t> arg(groups * c);
  for (std::size_t gi = 0; gi < groups; ++gi) {
    for (std::size_t j = 0; j < c; ++j) {
      std::size_t best = gi * group;
      double bv = A[best * c + j];
      for (std::size_t t = 1; t < group; ++t) {
        const std::size_t row = gi * group + t;
        if (A[row * c + j] > bv) {
          bv = A[row * c + j];
          best = row;
        }
      }
      out[gi * c + j] = bv;
      arg[gi * c + j] = best;
    }
  }
  return a.graph().record(
      std::move(out), {a},
      [arg = std::move(arg), c](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < arg.size(); ++i) (*in[0])[arg[i] * c + i % c] += g[i];
      },
      "max_pool_rows");
}

Var minimum(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) shape_fail("minimum", "shape mismatch " + two(A.shape(), B.shape()));
  Tensor out(A.shape());
  std::vector<bool> from_a(A.numel());
  for (std::size_t i = 0; i < A.numel(); ++i) {
    from_a[i] = A[i] <= B[i];
    out[i] = from_a[i] ? A[i] : B[i];
  }
  return a.graph().record(
      std::move(out), {a, b},
      [from_a = std::move(from_a)](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < g.numel(); ++i) {
          Tensor* dst = from_a[i] ? in[0] : in[1];
          if (dst) (*dst)[i] += g[i];
        }
      },
      "minimum");
}

Var squared_distances(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.cols()) shape_fail("squared_distances", "dimension mismatch " + two(A.shape(), B.shape()));
  const std::size_t ra = A.rows(), rb = B.rows(), d = A.cols();
  Tensor out(Shape{ra, rb});
  kernels::squared_distances(A.values(), B.values(), out.values(), ra, rb, d);
  const Tensor* pa = &A;
  const Tensor* pb = &B;
  return a.graph().record(
      std::move(out), {a, b},
      [pa, pb, ra, rb, d](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < ra; ++i) {
          for (std::size_t j = 0; j < rb; ++j) {
            const double w = 2.0 * g[i * rb + j];
            for (std::size_t t = 0; t < d; ++t) {
              const double diff = (*pa)[i * d + t] - (*pb)[j * d + t];
              if (in[0]) (*in[0])[i * d + t] += w * diff;
              if (in[1]) (*in[1])[j * d + t] -= w * diff;
            }
          }
        }
      },
      "squared_distances");
}

Var dropout(const Var& a, double p, bool training, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("dropout: probability must be in [0, 1)");
  const Tensor& A = a.value();
  Tensor mask(A.shape(), 1.0);
  if (training && p > 0.0) {
    const double keep = 1.0 / (1.0 - p);
    for (double& m : mask.values()) m = rng.uniform() < p ? 0.0 : keep;
  }
  Tensor out = A;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= mask[i];
  return a.graph().record(
      std::move(out), {a},
      [mask = std::move(mask)](const Tensor&, const Tensor& g, std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < g.numel(); ++i) (*in[0])[i] += g[i] * mask[i];
      },
      "dropout");
}

Var cross_entropy(const Var& logits, std::span<const std::size_t> labels) {
  const Tensor& L = logits.value();
  require_matrix("cross_entropy", L);
  const std::size_t r = L.dim(0), k = L.dim(1);
  if (labels.size() != r || r == 0) {
    shape_fail("cross_entropy", std::to_string(labels.size()) + " labels for logits " + shape_str(L.shape()));
  }
  Tensor probs(L.shape());
  double loss = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (labels[i] >= k) shape_fail("cross_entropy", "label " + std::to_string(labels[i]) + " out of range");
    const double* x = L.data() + i * k;
    const double mx = *std::max_element(x, x + k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(x[j] - mx);
    const double log_z = mx + std::log(s);
    for (std::size_t j = 0; j < k; ++j) probs[i * k + j] = std::exp(x[j] - log_z);
    loss += log_z - x[labels[i]];
  }
  const double inv = 1.0 / static_cast<double>(r);
  std::vector<std::size_t> lab(labels.begin(), labels.end());
  return logits.graph().record(
      Tensor::scalar(loss * inv), {logits},
      [probs = std::move(probs), lab = std::move(lab), k, inv](const Tensor&, const Tensor& g,
                                                                std::span<Tensor* const> in) {
        for (std::size_t i = 0; i < lab.size(); ++i) {
          for (std::size_t j = 0; j < k; ++j) {
            const double onehot = j == lab[i] ? 1.0 : 0.0;
            (*in[0])[i * k + j] += g[0] * inv * (probs[i * k + j] - onehot);
          }
        }
      },
      "cross_entropy");
}

}  // namespace pmae::ops
