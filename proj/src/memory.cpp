#include "ianmt/memory.hpp"

#include <cmath>
#include <stdexcept>

namespace ianmt {

namespace {

Tensor named_param(Shape shape, const std::string& name) {
  Tensor t(std::move(shape), 0.0, true);
  t.set_name(name);
  return t;
}

void check_weights(const char* op, const SourceMemory& memory, const ReadWeights& weights) {
  if (!weights.is_vector() || weights.size() != memory.n())
    throw std::invalid_argument(std::string("ianmt: ") + op + ": weight shape " +
                                shape_str(weights.shape()) + " does not match memory " +
                                shape_str(memory.cells.shape()));
}

}  // namespace

WriteParams::WriteParams(int m, int d_s, const std::string& prefix) {
  W_F = named_param({m, d_s}, prefix + ".W_F");
  W_U = named_param({m, d_s}, prefix + ".W_U");
}

Tensor read(Tape& tape, const SourceMemory& memory, const ReadWeights& weights) {
  check_weights("read", memory, weights);
  return tape.weighted_sum(weights, memory.cells);
}

Tensor forget(Tape& tape, const SourceMemory& memory, const ReadWeights& weights, const Tensor& s_t,
              const WriteParams& params) {
  check_weights("forget", memory, weights);
  Tensor f_gate = tape.sigmoid(tape.matmul(params.W_F, s_t));  // {m}
  Tensor ones(memory.cells.shape(), 1.0);
  Tensor factors = tape.sub(ones, tape.outer(weights, f_gate));  // 1 - w(i) F_t
  return tape.mul(memory.cells, factors);
}

SourceMemory update(Tape& tape, const Tensor& forgotten_cells, const ReadWeights& weights,
                    const Tensor& s_t, const WriteParams& params, int new_timestep) {
  Tensor u_gate = tape.sigmoid(tape.matmul(params.W_U, s_t));  // {m}
  SourceMemory out;
  out.cells = tape.add(forgotten_cells, tape.outer(weights, u_gate));
  out.timestep = new_timestep;
  return out;
}

SourceMemory write(Tape& tape, const SourceMemory& memory, const ReadWeights& weights,
                   const Tensor& s_t, const WriteParams& params) {
  Tensor forgotten = forget(tape, memory, weights, s_t, params);
  return update(tape, forgotten, weights, s_t, params, memory.timestep + 1);
}

std::vector<double> cell_delta_norms(const Tensor& before, const Tensor& after) {
  if (before.shape() != after.shape())
    throw std::invalid_argument("ianmt: cell_delta_norms: shape mismatch " + shape_str(before.shape()) +
                                " vs " + shape_str(after.shape()));
  const int n = before.rows(), m = before.cols();
  std::vector<double> norms(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      double d = after.at(i, j) - before.at(i, j);
      acc += d * d;
    }
    norms[static_cast<size_t>(i)] = std::sqrt(acc);
  }
  return norms;
}

}  // namespace ianmt
