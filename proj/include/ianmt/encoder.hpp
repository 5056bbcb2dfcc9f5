#pragma once

#include <vector>

#include "ianmt/layers.hpp"
#include "ianmt/tensor.hpp"

namespace ianmt {

/// Annotation matrix H = {h_1..h_N}: row j concatenates the forward and the
/// backward recurrent state at source position j, so m = 2 * d_enc.
struct SourceAnnotations {
  Tensor cells;  // {N, m}
  int n = 0;
  int m = 0;
};

/// Runs the forward pass left to right and the backward pass right to left,
/// both from zero initial states, and stacks the concatenated states.
SourceAnnotations encode(Tape& tape, const std::vector<Tensor>& embeddings, const GruParams& fwd,
                         const GruParams& bwd);

}  // namespace ianmt
