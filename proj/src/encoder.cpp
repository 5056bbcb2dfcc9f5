#include "ianmt/encoder.hpp"

#include <stdexcept>

namespace ianmt {

SourceAnnotations encode(Tape& tape, const std::vector<Tensor>& embeddings, const GruParams& fwd,
                         const GruParams& bwd) {
  if (embeddings.empty()) throw std::invalid_argument("ianmt: encode: empty source");
  const int n = static_cast<int>(embeddings.size());

  std::vector<Tensor> fwd_states(embeddings.size());
  Tensor h(Shape{fwd.d_h});
  for (int j = 0; j < n; ++j) {
    h = gru_step(tape, fwd, h, embeddings[static_cast<size_t>(j)]);
    fwd_states[static_cast<size_t>(j)] = h;
  }

  std::vector<Tensor> bwd_states(embeddings.size());
  Tensor g(Shape{bwd.d_h});
  for (int j = n - 1; j >= 0; --j) {
    g = gru_step(tape, bwd, g, embeddings[static_cast<size_t>(j)]);
    bwd_states[static_cast<size_t>(j)] = g;
  }

  std::vector<Tensor> rows(embeddings.size());
  for (int j = 0; j < n; ++j)
    rows[static_cast<size_t>(j)] =
        tape.concat(fwd_states[static_cast<size_t>(j)], bwd_states[static_cast<size_t>(j)]);

  SourceAnnotations ann;
  ann.cells = tape.stack_rows(rows);
  ann.n = n;
  ann.m = fwd.d_h + bwd.d_h;
  return ann;
}

}  // namespace ianmt
