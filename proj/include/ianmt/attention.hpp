#pragma once

#include <string>
#include <vector>

#include "ianmt/tensor.hpp"

namespace ianmt {

/// Normalized per-cell weights: nonnegative, summing to 1. Produced by
/// normalize() and consumed by both the attentive read and the write.
using ReadWeights = Tensor;

struct AttentionParams {
  Tensor v_a;  // {d_a}
  Tensor W_a;  // {d_a, d_s}
  Tensor U_a;  // {d_a, m}

  AttentionParams() = default;
  AttentionParams(int d_a, int d_s, int m, const std::string& prefix);

  std::vector<Tensor> tensors() const { return {v_a, W_a, U_a}; }
};

/// e_j = v_a^T tanh(W_a query + U_a cell_j). The query is s_{t-1} for the
/// conventional variant and the intermediate state otherwise.
Tensor align_scores(Tape& tape, const AttentionParams& p, const Tensor& query, const Tensor& cells);

/// Softmax over alignment scores.
ReadWeights normalize(Tape& tape, const Tensor& scores);

/// c = sum_j w(j) cell_j
Tensor context(Tape& tape, const ReadWeights& weights, const Tensor& cells);

}  // namespace ianmt
