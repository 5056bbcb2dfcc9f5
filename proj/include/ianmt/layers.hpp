#pragma once

#include <string>
#include <vector>

#include "ianmt/rng.hpp"
#include "ianmt/tensor.hpp"

namespace ianmt {

/// Word embedding table, one row per vocabulary id.
struct EmbeddingTable {
  Tensor weights;  // {V, d}

  EmbeddingTable() = default;
  EmbeddingTable(int vocab, int dim, const std::string& name);

  int vocab_size() const { return weights.rows(); }
  int dim() const { return weights.cols(); }
  Tensor lookup(Tape& tape, int id) const { return tape.lookup(weights, id); }
};

/// Gate matrices and biases of one GRU cell: update gate z, reset gate r,
/// candidate h~. Input width d_in, state width d_h; the U matrices are the
/// square recurrent (state-to-state) ones.
struct GruParams {
  Tensor Wz, Uz, bz;
  Tensor Wr, Ur, br;
  Tensor Wh, Uh, bh;
  int d_in = 0;
  int d_h = 0;

  GruParams() = default;
  GruParams(int d_in, int d_h, const std::string& prefix);

  std::vector<Tensor> tensors() const;
  std::vector<Tensor> recurrent() const { return {Uz, Ur, Uh}; }
  std::vector<Tensor> biases() const { return {bz, br, bh}; }
};

/// h' = (1-z) (.) h + z (.) h~ with
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   h~ = tanh(Wh x + Uh (r (.) h) + bh)
Tensor gru_step(Tape& tape, const GruParams& p, const Tensor& state, const Tensor& input);

/// Projects (c_t, e_{y-1}, s_t) through one tanh hidden layer to vocab logits.
struct ReadoutParams {
  Tensor Wc, We, Ws, b;  // hidden = tanh(Wc c + We e + Ws s + b)
  Tensor Wo, bo;         // logits = Wo hidden + bo
  int d_hidden = 0;
  int vocab = 0;

  ReadoutParams() = default;
  ReadoutParams(int d_ctx, int d_emb, int d_state, int d_hidden, int vocab,
                const std::string& prefix);

  std::vector<Tensor> tensors() const;
};

/// When training, the dropout mask is applied to the hidden layer before the
/// final projection. Inference never touches the rng.
Tensor readout_logits(Tape& tape, const ReadoutParams& p, const Tensor& ctx, const Tensor& prev_emb,
                      const Tensor& state, bool training = false, double dropout_rate = 0.0,
                      Rng* rng = nullptr);

/// Inverted dropout: zero each coordinate with probability rate and scale
/// survivors by 1/(1-rate); identity when not training. rate 1 zeroes everything.
Tensor dropout(Tape& tape, const Tensor& x, double rate, bool training, Rng& rng);

}  // namespace ianmt
