#include "ianmt/attention.hpp"

#include <stdexcept>

namespace ianmt {

namespace {

Tensor named_param(Shape shape, const std::string& name) {
  Tensor t(std::move(shape), 0.0, true);
  t.set_name(name);
  return t;
}

}  // namespace

AttentionParams::AttentionParams(int d_a, int d_s, int m, const std::string& prefix) {
  v_a = named_param({d_a}, prefix + ".v_a");
  W_a = named_param({d_a, d_s}, prefix + ".W_a");
  U_a = named_param({d_a, m}, prefix + ".U_a");
}

Tensor align_scores(Tape& tape, const AttentionParams& p, const Tensor& query, const Tensor& cells) {
  if (!cells.is_matrix() || cells.rows() == 0)
    throw std::invalid_argument("ianmt: align_scores: cells must be a nonempty matrix, got " +
                                shape_str(cells.shape()));
  Tensor wq = tape.matmul(p.W_a, query);            // {d_a}
  Tensor cu = tape.matmul_nt(cells, p.U_a);         // {n, d_a}
  Tensor pre = tape.tanh(tape.add_rowvec(cu, wq));  // {n, d_a}
  return tape.matmul(pre, p.v_a);                   // {n}
}

ReadWeights normalize(Tape& tape, const Tensor& scores) { return tape.softmax(scores); }

Tensor context(Tape& tape, const ReadWeights& weights, const Tensor& cells) {
  return tape.weighted_sum(weights, cells);
}

}  // namespace ianmt
