#include "ianmt/layers.hpp"

#include <stdexcept>

namespace ianmt {

namespace {

Tensor named_param(Shape shape, const std::string& name) {
  Tensor t(std::move(shape), 0.0, true);
  t.set_name(name);
  return t;
}

}  // namespace

EmbeddingTable::EmbeddingTable(int vocab, int dim, const std::string& name)
    : weights(named_param({vocab, dim}, name)) {}

GruParams::GruParams(int d_in_, int d_h_, const std::string& prefix) : d_in(d_in_), d_h(d_h_) {
  Wz = named_param({d_h, d_in}, prefix + ".Wz");
  Uz = named_param({d_h, d_h}, prefix + ".Uz");
  bz = named_param({d_h}, prefix + ".bz");
  Wr = named_param({d_h, d_in}, prefix + ".Wr");
  Ur = named_param({d_h, d_h}, prefix + ".Ur");
  br = named_param({d_h}, prefix + ".br");
  Wh = named_param({d_h, d_in}, prefix + ".Wh");
  Uh = named_param({d_h, d_h}, prefix + ".Uh");
  bh = named_param({d_h}, prefix + ".bh");
}

std::vector<Tensor> GruParams::tensors() const { return {Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh}; }

Tensor gru_step(Tape& tape, const GruParams& p, const Tensor& state, const Tensor& input) {
  if (state.size() != p.d_h)
    throw std::invalid_argument("ianmt: gru_step: state width " + shape_str(state.shape()) +
                                " does not match params d_h=" + std::to_string(p.d_h));
  if (input.size() != p.d_in)
    throw std::invalid_argument("ianmt: gru_step: input width " + shape_str(input.shape()) +
                                " does not match params d_in=" + std::to_string(p.d_in));
  Tensor z = tape.sigmoid(tape.add(tape.add(tape.matmul(p.Wz, input), tape.matmul(p.Uz, state)), p.bz));
  Tensor r = tape.sigmoid(tape.add(tape.add(tape.matmul(p.Wr, input), tape.matmul(p.Ur, state)), p.br));
  Tensor cand =
      tape.tanh(tape.add(tape.add(tape.matmul(p.Wh, input), tape.matmul(p.Uh, tape.mul(r, state))), p.bh));
  Tensor ones(Shape{p.d_h}, 1.0);
  return tape.add(tape.mul(tape.sub(ones, z), state), tape.mul(z, cand));
}

ReadoutParams::ReadoutParams(int d_ctx, int d_emb, int d_state, int d_hidden_, int vocab_,
                             const std::string& prefix)
    : d_hidden(d_hidden_), vocab(vocab_) {
  Wc = named_param({d_hidden, d_ctx}, prefix + ".Wc");
  We = named_param({d_hidden, d_emb}, prefix + ".We");
  Ws = named_param({d_hidden, d_state}, prefix + ".Ws");
  b = named_param({d_hidden}, prefix + ".b");
  Wo = named_param({vocab, d_hidden}, prefix + ".Wo");
  bo = named_param({vocab}, prefix + ".bo");
}

std::vector<Tensor> ReadoutParams::tensors() const { return {Wc, We, Ws, b, Wo, bo}; }

Tensor readout_logits(Tape& tape, const ReadoutParams& p, const Tensor& ctx, const Tensor& prev_emb,
                      const Tensor& state, bool training, double dropout_rate, Rng* rng) {
  Tensor pre = tape.add(
      tape.add(tape.add(tape.matmul(p.Wc, ctx), tape.matmul(p.We, prev_emb)), tape.matmul(p.Ws, state)),
      p.b);
  Tensor hidden = tape.tanh(pre);
  if (training && dropout_rate > 0.0) {
    if (!rng)
      throw std::invalid_argument("ianmt: readout_logits: dropout in training mode needs an rng");
    hidden = dropout(tape, hidden, dropout_rate, true, *rng);
  }
  return tape.add(tape.matmul(p.Wo, hidden), p.bo);
}

Tensor dropout(Tape& tape, const Tensor& x, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate > 1.0)
    throw std::invalid_argument("ianmt: dropout: rate must be in [0,1], got " + std::to_string(rate));
  if (!training || rate == 0.0) return x;
  Tensor mask(x.shape());
  const double keep_scale = rate < 1.0 ? 1.0 / (1.0 - rate) : 0.0;
  for (int i = 0; i < x.size(); ++i) mask[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
  return tape.mul(x, mask);
}

}  // namespace ianmt
