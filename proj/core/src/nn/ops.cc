// Copyright 2026 The RAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rap/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigen_map.h"
#include "rap/errors.h"

namespace rap::nn {

using internal::AsMatrix;
using internal::AsVector;

namespace {

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + ShapeString(a.shape()) +
                     " and " + ShapeString(b.shape()) + " differ");
  }
}

// Elementwise unary op given f(x) and f'(x, f(x)).
template <typename F, typename DF>
Var Unary(Var x, F f, DF df) {
  const Tensor& xv = x.value();
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  const std::size_t xi = x.id();
  return x.tape()->Record(std::move(out), {x}, [xi, df](Tape& t, std::size_t self) {
    const Tensor& in = t.ValueOf(xi);
    const Tensor& y = t.ValueOf(self);
    auto g = t.GradIfAny(self);
    auto gx = t.GradOf(xi);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(in[i], y[i]);
  });
}

Shape RowShape(const Tensor& like, std::size_t cols) {
  return like.rank() == 2 ? Shape{like.rows(), cols} : Shape{cols};
}

}  // namespace

double StableSigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double StableLogSigmoid(double x) {
  return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x)));
}

Var Affine(Var x, Var w, Var b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (wv.rank() != 2 || xv.rank() == 0 || xv.rank() > 2 || xv.cols() != wv.cols() ||
      bv.size() != wv.rows()) {
    throw ShapeError("affine: x " + ShapeString(xv.shape()) + ", W " +
                     ShapeString(wv.shape()) + ", b " + ShapeString(bv.shape()));
  }
  Tensor out(RowShape(xv, wv.rows()));
  auto y = AsMatrix(out);
  y.noalias() = AsMatrix(xv) * AsMatrix(wv).transpose();
  y.rowwise() += AsVector(bv).transpose();
  const std::size_t xi = x.id(), wi = w.id(), bi = b.id();
  return x.tape()->Record(std::move(out), {x, w, b}, [xi, wi, bi](Tape& t, std::size_t self) {
    const Tensor& xv = t.ValueOf(xi);
    const Tensor& wv = t.ValueOf(wi);
    auto gs = t.GradIfAny(self);
    internal::ConstMatrixMap g(gs.data(), static_cast<Eigen::Index>(xv.rows()),
                               static_cast<Eigen::Index>(wv.rows()));
    if (t.RequiresGrad(xi)) {
      AsMatrix(t.GradOf(xi), xv.rows(), xv.cols()).noalias() += g * AsMatrix(wv);
    }
    if (t.RequiresGrad(wi)) {
      AsMatrix(t.GradOf(wi), wv.rows(), wv.cols()).noalias() += g.transpose() * AsMatrix(xv);
    }
    if (t.RequiresGrad(bi)) {
      AsVector(t.GradOf(bi)) += g.colwise().sum().transpose();
    }
  });
}

Var MatMul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.cols() != bv.rows()) {
    throw ShapeError("matmul: " + ShapeString(av.shape()) + " x " + ShapeString(bv.shape()));
  }
  Tensor out(Shape{av.rows(), bv.cols()});
  AsMatrix(out).noalias() = AsMatrix(av) * AsMatrix(bv);
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape()->Record(std::move(out), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    const Tensor& av = t.ValueOf(ai);
    const Tensor& bv = t.ValueOf(bi);
    auto gs = t.GradIfAny(self);
    internal::ConstMatrixMap g(gs.data(), static_cast<Eigen::Index>(av.rows()),
                               static_cast<Eigen::Index>(bv.cols()));
    if (t.RequiresGrad(ai)) {
      AsMatrix(t.GradOf(ai), av.rows(), av.cols()).noalias() += g * AsMatrix(bv).transpose();
    }
    if (t.RequiresGrad(bi)) {
      AsMatrix(t.GradOf(bi), bv.rows(), bv.cols()).noalias() += AsMatrix(av).transpose() * g;
    }
  });
}

Var Add(Var a, Var b) {
  RequireSameShape("add", a.value(), b.value());
  Tensor out = a.value();
  out.DropGrad();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape()->Record(std::move(out), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    auto g = t.GradIfAny(self);
    for (std::size_t id : {ai, bi}) {
      if (!t.RequiresGrad(id)) continue;
      auto gx = t.GradOf(id);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
  });
}

Var Sub(Var a, Var b) {
  RequireSameShape("sub", a.value(), b.value());
  Tensor out = a.value();
  out.DropGrad();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape()->Record(std::move(out), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    auto g = t.GradIfAny(self);
    if (t.RequiresGrad(ai)) {
      auto ga = t.GradOf(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.RequiresGrad(bi)) {
      auto gb = t.GradOf(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var Mul(Var a, Var b) {
  RequireSameShape("mul", a.value(), b.value());
  Tensor out = a.value();
  out.DropGrad();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape()->Record(std::move(out), {a, b}, [ai, bi](Tape& t, std::size_t self) {
    auto g = t.GradIfAny(self);
    const Tensor& av = t.ValueOf(ai);
    const Tensor& bv = t.ValueOf(bi);
    if (t.RequiresGrad(ai)) {
      auto ga = t.GradOf(ai);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.RequiresGrad(bi)) {
      auto gb = t.GradOf(bi);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var Scale(Var x, double factor) {
  return Unary(
      x, [factor](double v) { return factor * v; },
      [factor](double, double) { return factor; });
}

Var Relu(Var x) {
  return Unary(
      x, [](double v) { return v > 0 ? v : 0.0; },
      [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

Var Tanh(Var x) {
  return Unary(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(Var x) {
  return Unary(
      x, [](double v) { return StableSigmoid(v); },
      [](double, double y) { return y * (1.0 - y); });
}

Var LogSigmoid(Var x) {
  return Unary(
      x, [](double v) { return StableLogSigmoid(v); },
      [](double v, double) { return StableSigmoid(-v); });
}

Var Softmax(Var x) {
  const Tensor& xv = x.value();
  if (xv.size() == 0 || xv.rank() == 0 || xv.rank() > 2) {
    throw ValidationError("softmax needs a non-empty vector or matrix, got " +
                          ShapeString(xv.shape()));
  }
  Tensor out(xv.shape());
  const std::size_t rows = xv.rows(), cols = xv.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * cols;
    double* y = out.data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double total = 0;
    for (std::size_t c = 0; c < cols; ++c) total += (y[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  const std::size_t xi = x.id();
  return x.tape()->Record(std::move(out), {x}, [xi, rows, cols](Tape& t, std::size_t self) {
    const Tensor& y = t.ValueOf(self);
    auto g = t.GradIfAny(self);
    auto gx = t.GradOf(xi);
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0;
      for (std::size_t c = 0; c < cols; ++c) dot += g[r * cols + c] * y[r * cols + c];
      for (std::size_t c = 0; c < cols; ++c) {
        gx[r * cols + c] += y[r * cols + c] * (g[r * cols + c] - dot);
      }
    }
  });
}

Var CrossEntropy(Var probs, std::span<const int> labels) {
  const Tensor& p = probs.value();
  if (p.rank() == 0 || p.rank() > 2 || labels.size() != p.rows()) {
    throw ShapeError("cross_entropy: probs " + ShapeString(p.shape()) + " with " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t cols = p.cols();
  std::vector<int> owned(labels.begin(), labels.end());
  Tensor out(p.rank() == 2 ? Shape{p.rows()} : Shape{});
  for (std::size_t r = 0; r < p.rows(); ++r) {
    if (owned[r] < 0 || static_cast<std::size_t>(owned[r]) >= cols) {
      throw ValidationError("label " + std::to_string(owned[r]) + " out of range for " +
                            std::to_string(cols) + " classes");
    }
    out[r] = -std::log(std::max(p.at(r, static_cast<std::size_t>(owned[r])),
                                kProbabilityFloor));
  }
  const std::size_t pi = probs.id();
  return probs.tape()->Record(
      std::move(out), {probs}, [pi, cols, owned = std::move(owned)](Tape& t, std::size_t self) {
        const Tensor& p = t.ValueOf(pi);
        auto g = t.GradIfAny(self);
        auto gp = t.GradOf(pi);
        for (std::size_t r = 0; r < owned.size(); ++r) {
          const std::size_t k = r * cols + static_cast<std::size_t>(owned[r]);
          if (p[k] > kProbabilityFloor) gp[k] -= g[r] / p[k];
        }
      });
}

Var Concat(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != bv.rank() || av.rank() == 0 || av.rows() != bv.rows()) {
    throw ShapeError("concat: " + ShapeString(av.shape()) + " and " + ShapeString(bv.shape()));
  }
  const std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
  Tensor out(RowShape(av, ca + cb));
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(av.data() + r * ca, ca, out.data() + r * (ca + cb));
    std::copy_n(bv.data() + r * cb, cb, out.data() + r * (ca + cb) + ca);
  }
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape()->Record(std::move(out), {a, b}, [=](Tape& t, std::size_t self) {
    auto g = t.GradIfAny(self);
    if (t.RequiresGrad(ai)) {
      auto ga = t.GradOf(ai);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < ca; ++c) ga[r * ca + c] += g[r * (ca + cb) + c];
    }
    if (t.RequiresGrad(bi)) {
      auto gb = t.GradOf(bi);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cb; ++c) gb[r * cb + c] += g[r * (ca + cb) + ca + c];
    }
  });
}

Var GatherRows(Var table, std::span<const std::int32_t> rows) {
  const Tensor& tv = table.value();
  if (tv.rank() != 2) throw ShapeError("gather_rows: table " + ShapeString(tv.shape()));
  const std::size_t cols = tv.cols();
  std::vector<std::int32_t> idx(rows.begin(), rows.end());
  Tensor out(Shape{idx.size(), cols});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || static_cast<std::size_t>(idx[r]) >= tv.rows()) {
      throw ValidationError("gather_rows: index " + std::to_string(idx[r]) +
                            " out of range for " + std::to_string(tv.rows()) + " rows");
    }
    std::copy_n(tv.data() + static_cast<std::size_t>(idx[r]) * cols, cols,
                out.data() + r * cols);
  }
  const std::size_t ti = table.id();
  return table.tape()->Record(std::move(out), {table},
                              [ti, cols, idx = std::move(idx)](Tape& t, std::size_t self) {
                                auto g = t.GradIfAny(self);
                                auto gt = t.GradOf(ti);
                                for (std::size_t r = 0; r < idx.size(); ++r) {
                                  double* dst = gt.data() + static_cast<std::size_t>(idx[r]) * cols;
                                  const double* src = g.data() + r * cols;
                                  for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
                                }
                              });
}

Var Sum(Var x) {
  double total = 0;
  for (double v : x.value().values()) total += v;
  const std::size_t xi = x.id();
  return x.tape()->Record(Tensor::Scalar(total), {x}, [xi](Tape& t, std::size_t self) {
    const double g = t.GradIfAny(self)[0];
    for (double& v : t.GradOf(xi)) v += g;
  });
}

Var Mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw ValidationError("mean of an empty tensor");
  return Scale(Sum(x), 1.0 / static_cast<double>(n));
}

Var SquaredNorm(Var x) {
  double total = 0;
  for (double v : x.value().values()) total += v * v;
  const std::size_t xi = x.id();
  return x.tape()->Record(Tensor::Scalar(total), {x}, [xi](Tape& t, std::size_t self) {
    const double g = t.GradIfAny(self)[0];
    const Tensor& xv = t.ValueOf(xi);
    auto gx = t.GradOf(xi);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += 2.0 * g * xv[i];
  });
}

Var RnnStep(Var x, Var h, Var w_in, Var w_hh, Var b) {
  const Tensor& hv = h.value();
  const Tensor& whh = w_hh.value();
  if (whh.rank() != 2 || whh.rows() != whh.cols() || hv.cols() != whh.cols() ||
      hv.rank() != x.value().rank() || hv.rows() != x.value().rows()) {
    throw ShapeError("rnn_step: x " + ShapeString(x.value().shape()) + ", h " +
                     ShapeString(hv.shape()) + ", W_hh " + ShapeString(whh.shape()));
  }
  Tape& tape = *x.tape();
  Var zero_bias = tape.Constant(Tensor(Shape{whh.rows()}));
  return Tanh(Add(Affine(x, w_in, b), Affine(h, w_hh, zero_bias)));
}

}  // namespace rap::nn
