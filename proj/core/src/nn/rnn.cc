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

#include <algorithm>
#include <memory>
#include <numeric>

#include "eigen_map.h"
#include "rap/errors.h"
#include "rap/nn/ops.h"

namespace rap::nn {

using internal::AsMatrix;
using internal::AsVector;
using internal::RowMatrix;

// Sequences are sorted by decreasing length and right-aligned on a common
// clock of T = max length steps, so at every step the active sequences form a
// prefix of the sorted order and each step is one dense GEMM over that prefix.
// A sequence of length n is active for the last n steps; before that its
// state is the zero vector, which matches starting it from h_0 = 0.
namespace {

struct UnrollPlan {
  std::vector<std::size_t> order;   // sorted position -> original index
  std::vector<std::size_t> active;  // active[t] = sequences alive at step t
  std::size_t steps = 0;
};

UnrollPlan PlanUnroll(const std::vector<std::vector<std::int32_t>>& seqs) {
  UnrollPlan plan;
  plan.order.resize(seqs.size());
  std::iota(plan.order.begin(), plan.order.end(), 0);
  std::stable_sort(plan.order.begin(), plan.order.end(), [&](std::size_t a, std::size_t b) {
    return seqs[a].size() > seqs[b].size();
  });
  plan.steps = seqs.empty() ? 0 : seqs[plan.order[0]].size();
  plan.active.assign(plan.steps, 0);
  for (std::size_t t = 0; t < plan.steps; ++t) {
    std::size_t n = 0;
    while (n < plan.order.size() && seqs[plan.order[n]].size() >= plan.steps - t) ++n;
    plan.active[t] = n;
  }
  return plan;
}

// Item consumed at step t by sorted row r (r < active[t]).
std::int32_t ItemAt(const std::vector<std::vector<std::int32_t>>& seqs,
                    const UnrollPlan& plan, std::size_t r, std::size_t t) {
  const auto& s = seqs[plan.order[r]];
  return s[t - (plan.steps - s.size())];
}

}  // namespace

Var RnnFinalStates(Var table, const std::vector<std::vector<std::int32_t>>& sequences,
                   Var w_in, Var w_hh, Var b) {
  const Tensor& tv = table.value();
  const Tensor& win = w_in.value();
  const Tensor& whh = w_hh.value();
  const Tensor& bv = b.value();
  if (tv.rank() != 2 || win.rank() != 2 || whh.rank() != 2 || win.cols() != tv.cols() ||
      whh.rows() != win.rows() || whh.cols() != win.rows() || bv.size() != win.rows()) {
    throw ShapeError("rnn: table " + ShapeString(tv.shape()) + ", W_in " +
                     ShapeString(win.shape()) + ", W_hh " + ShapeString(whh.shape()) +
                     ", b " + ShapeString(bv.shape()));
  }
  for (const auto& s : sequences) {
    for (std::int32_t item : s) {
      if (item < 0 || static_cast<std::size_t>(item) >= tv.rows()) {
        throw ValidationError("rnn: item " + std::to_string(item) + " out of range");
      }
    }
  }
  const std::size_t hidden = win.rows();
  const std::size_t dim = win.cols();
  const std::size_t batch = sequences.size();
  auto seqs = std::make_shared<const std::vector<std::vector<std::int32_t>>>(sequences);
  auto plan = std::make_shared<const UnrollPlan>(PlanUnroll(*seqs));

  // states[t] holds the state after step t for the active prefix.
  auto states = std::make_shared<std::vector<RowMatrix>>(plan->steps);
  RowMatrix x;
  for (std::size_t t = 0; t < plan->steps; ++t) {
    const auto n = static_cast<Eigen::Index>(plan->active[t]);
    x.resize(n, static_cast<Eigen::Index>(dim));
    for (Eigen::Index r = 0; r < n; ++r) {
      x.row(r) = AsMatrix(tv).row(ItemAt(*seqs, *plan, static_cast<std::size_t>(r), t));
    }
    RowMatrix pre = x * AsMatrix(win).transpose();
    if (t > 0) {
      const auto& prev = (*states)[t - 1];
      pre.topRows(prev.rows()).noalias() += prev * AsMatrix(whh).transpose();
    }
    pre.rowwise() += AsVector(bv).transpose();
    (*states)[t] = pre.array().tanh().matrix();
  }

  Tensor out(Shape{batch, hidden});
  if (plan->steps > 0) {
    const auto& last = states->back();
    for (Eigen::Index r = 0; r < last.rows(); ++r) {
      AsMatrix(out).row(static_cast<Eigen::Index>(plan->order[static_cast<std::size_t>(r)])) =
          last.row(r);
    }
  }

  const std::size_t ti = table.id(), wi = w_in.id(), hi = w_hh.id(), bi = b.id();
  return table.tape()->Record(
      std::move(out), {table, w_in, w_hh, b},
      [=](Tape& t, std::size_t self) {
        if (plan->steps == 0) return;
        const Tensor& tv = t.ValueOf(ti);
        const Tensor& win = t.ValueOf(wi);
        const Tensor& whh = t.ValueOf(hi);
        auto gout = t.GradIfAny(self);
        const bool need_table = t.RequiresGrad(ti);
        const bool need_win = t.RequiresGrad(wi);
        const bool need_whh = t.RequiresGrad(hi);
        const bool need_b = t.RequiresGrad(bi);

        RowMatrix dh(static_cast<Eigen::Index>(plan->active.back()),
                     static_cast<Eigen::Index>(hidden));
        for (Eigen::Index r = 0; r < dh.rows(); ++r) {
          const std::size_t orig = plan->order[static_cast<std::size_t>(r)];
          for (std::size_t c = 0; c < hidden; ++c) {
            dh(r, static_cast<Eigen::Index>(c)) = gout[orig * hidden + c];
          }
        }
        RowMatrix x, dpre, dx;
        for (std::size_t step = plan->steps; step-- > 0;) {
          const auto n = static_cast<Eigen::Index>(plan->active[step]);
          const RowMatrix& h = (*states)[step];
          dpre = dh.array() * (1.0 - h.array().square());
          x.resize(n, static_cast<Eigen::Index>(dim));
          for (Eigen::Index r = 0; r < n; ++r) {
            x.row(r) = AsMatrix(tv).row(ItemAt(*seqs, *plan, static_cast<std::size_t>(r), step));
          }
          if (need_win) AsMatrix(t.GradOf(wi), hidden, dim).noalias() += dpre.transpose() * x;
          if (need_b) AsVector(t.GradOf(bi)) += dpre.colwise().sum().transpose();
          if (need_table) {
            dx.noalias() = dpre * AsMatrix(win);
            auto gt = AsMatrix(t.GradOf(ti), tv.rows(), dim);
            for (Eigen::Index r = 0; r < n; ++r) {
              gt.row(ItemAt(*seqs, *plan, static_cast<std::size_t>(r), step)) += dx.row(r);
            }
          }
          if (step == 0) break;
          const RowMatrix& prev = (*states)[step - 1];
          const Eigen::Index m = prev.rows();
          if (need_whh) {
            AsMatrix(t.GradOf(hi), hidden, hidden).noalias() +=
                dpre.topRows(m).transpose() * prev;
          }
          RowMatrix next = dpre.topRows(m) * AsMatrix(whh);
          dh.swap(next);
        }
      });
}

}  // namespace rap::nn
