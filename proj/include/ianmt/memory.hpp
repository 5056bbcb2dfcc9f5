#pragma once

#include <string>
#include <vector>

#include "ianmt/attention.hpp"
#include "ianmt/tensor.hpp"

namespace ianmt {

/// Time-stamped source memory H^(t): n annotation cells of width m. Writes are
/// functional (a new cell tensor per step), so hypotheses holding older
/// handles are unaffected by later writes.
struct SourceMemory {
  Tensor cells;  // {n, m}
  int timestep = 0;

  int n() const { return cells.rows(); }
  int m() const { return cells.cols(); }
};

/// Gate projections for the attentive write: F_t = sigmoid(W_F s_t),
/// U_t = sigmoid(W_U s_t), both in (0,1)^m.
struct WriteParams {
  Tensor W_F;  // {m, d_s}
  Tensor W_U;  // {m, d_s}

  WriteParams() = default;
  WriteParams(int m, int d_s, const std::string& prefix);

  std::vector<Tensor> tensors() const { return {W_F, W_U}; }
};

/// Attentive read: c_t = sum_j w(j) h_j^(t-1). The memory is not modified.
Tensor read(Tape& tape, const SourceMemory& memory, const ReadWeights& weights);

/// Forget step: h~_i = h_i (.) (1 - w(i) F_t) for every cell i.
Tensor forget(Tape& tape, const SourceMemory& memory, const ReadWeights& weights, const Tensor& s_t,
              const WriteParams& params);

/// Update step: h_i = h~_i + w(i) U_t; the returned memory carries the new timestep.
SourceMemory update(Tape& tape, const Tensor& forgotten_cells, const ReadWeights& weights,
                    const Tensor& s_t, const WriteParams& params, int new_timestep);

/// Full write: forget then update, reusing this step's read weights.
SourceMemory write(Tape& tape, const SourceMemory& memory, const ReadWeights& weights,
                   const Tensor& s_t, const WriteParams& params);

/// L2 norm of h_i^(t) - h_i^(t-1) per cell, for the trace export.
std::vector<double> cell_delta_norms(const Tensor& before, const Tensor& after);

}  // namespace ianmt
