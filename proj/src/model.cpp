#include "ianmt/model.hpp"

#include <stdexcept>

#include "ianmt/tokens.hpp"

namespace ianmt {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::conventional: return "conventional";
    case Variant::improved: return "improved";
    case Variant::interactive: return "interactive";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "conventional") return Variant::conventional;
  if (s == "improved") return Variant::improved;
  if (s == "interactive") return Variant::interactive;
  throw std::invalid_argument("ianmt: unknown variant '" + s +
                              "' (expected conventional|improved|interactive)");
}

ModelParams ModelParams::create(Variant variant, const ModelDims& dims) {
  ModelParams p;
  p.variant = variant;
  p.dims = dims;
  const int m = dims.m();

  p.src_emb = EmbeddingTable(dims.src_vocab, dims.d_emb, "src_emb");
  p.tgt_emb = EmbeddingTable(dims.tgt_vocab, dims.d_emb, "tgt_emb");
  p.enc_fwd = GruParams(dims.d_emb, dims.d_enc, "enc.fwd");
  p.enc_bwd = GruParams(dims.d_emb, dims.d_enc, "enc.bwd");
  p.W_init = Tensor(Shape{dims.d_s, dims.d_enc}, 0.0, true);
  p.W_init.set_name("dec.init.W");
  p.att = AttentionParams(dims.d_a, dims.d_s, m, "att");
  p.readout = ReadoutParams(m, dims.d_emb, dims.d_s, dims.d_s, dims.tgt_vocab, "out");

  if (variant == Variant::conventional) {
    p.dec_gru = GruParams(dims.d_emb + m, dims.d_s, "dec.gru");
  } else {
    p.dec_prev = GruParams(dims.d_emb, dims.d_s, "dec.prev");
    p.dec_state = GruParams(m, dims.d_s, "dec.state");
  }
  if (variant == Variant::interactive) p.write = WriteParams(m, dims.d_s, "mem");
  return p;
}

std::vector<Tensor> ModelParams::named_tensors() const {
  std::vector<Tensor> out;
  auto push_all = [&out](const std::vector<Tensor>& v) {
    for (const auto& t : v) out.push_back(t);
  };
  out.push_back(src_emb.weights);
  out.push_back(tgt_emb.weights);
  push_all(enc_fwd.tensors());
  push_all(enc_bwd.tensors());
  out.push_back(W_init);
  push_all(att.tensors());
  if (variant == Variant::conventional) {
    push_all(dec_gru.tensors());
  } else {
    push_all(dec_prev.tensors());
    push_all(dec_state.tensors());
  }
  if (variant == Variant::interactive) push_all(write.tensors());
  push_all(readout.tensors());
  return out;
}

void ModelParams::zero_grads() const {
  for (auto& t : named_tensors()) t.zero_grad();
}

SourceAnnotations encode_source(Tape& tape, const ModelParams& params, const std::vector<int>& src_ids) {
  if (src_ids.empty()) throw std::invalid_argument("ianmt: encode_source: empty source");
  std::vector<Tensor> emb;
  emb.reserve(src_ids.size());
  for (int id : src_ids) emb.push_back(params.src_emb.lookup(tape, id));
  return encode(tape, emb, params.enc_fwd, params.enc_bwd);
}

DecoderState init_state(Tape& tape, const ModelParams& params, const SourceAnnotations& annotations) {
  Tensor h1 = tape.row(annotations.cells, 0);
  Tensor backward_half = tape.slice(h1, params.dims.d_enc, params.dims.d_enc);
  DecoderState state;
  state.s = tape.tanh(tape.matmul(params.W_init, backward_half));
  state.memory.cells = annotations.cells;
  state.memory.timestep = 0;
  return state;
}

StepResult decode_step(Tape& tape, const DecoderState& state, int y_prev, const ModelParams& params,
                       bool training, double dropout_rate, Rng* rng, bool disable_write) {
  if (y_prev < 0 || y_prev >= params.dims.tgt_vocab)
    throw std::invalid_argument("ianmt: decode_step: token id " + std::to_string(y_prev) +
                                " outside vocabulary of size " + std::to_string(params.dims.tgt_vocab));
  Tensor e_prev = params.tgt_emb.lookup(tape, y_prev);

  StepResult res;
  if (params.variant == Variant::conventional) {
    res.weights = normalize(tape, align_scores(tape, params.att, state.s, state.memory.cells));
    Tensor ctx = read(tape, state.memory, res.weights);
    Tensor s_new = gru_step(tape, params.dec_gru, state.s, tape.concat(e_prev, ctx));
    res.logits = readout_logits(tape, params.readout, ctx, e_prev, s_new, training, dropout_rate, rng);
    res.next.s = s_new;
    res.next.memory.cells = state.memory.cells;
    res.next.memory.timestep = state.memory.timestep + 1;
    return res;
  }

  Tensor s_tilde = gru_step(tape, params.dec_prev, state.s, e_prev);
  res.weights = normalize(tape, align_scores(tape, params.att, s_tilde, state.memory.cells));
  Tensor ctx = read(tape, state.memory, res.weights);
  Tensor s_new = gru_step(tape, params.dec_state, s_tilde, ctx);
  if (params.variant == Variant::interactive && !disable_write) {
    res.next.memory = write(tape, state.memory, res.weights, s_new, params.write);
  } else {
    res.next.memory.cells = state.memory.cells;
    res.next.memory.timestep = state.memory.timestep + 1;
  }
  res.logits = readout_logits(tape, params.readout, ctx, e_prev, s_new, training, dropout_rate, rng);
  res.next.s = s_new;
  return res;
}

Tensor sentence_loss(Tape& tape, const std::vector<int>& src_ids, const std::vector<int>& tgt_ids,
                     const ModelParams& params, bool training, double dropout_rate, Rng* rng,
                     bool disable_write) {
  if (src_ids.empty() || tgt_ids.empty())
    throw std::invalid_argument("ianmt: sentence_loss: empty source or target");

  SourceAnnotations ann = encode_source(tape, params, src_ids);
  DecoderState state = init_state(tape, params, ann);

  Tensor total;
  for (size_t t = 0; t < tgt_ids.size(); ++t) {
    int y_prev = t == 0 ? kBos : tgt_ids[t - 1];
    StepResult step = decode_step(tape, state, y_prev, params, training, dropout_rate, rng, disable_write);
    Tensor probs = tape.softmax(step.logits);
    Tensor nll = tape.scale(tape.log(tape.pick(probs, tgt_ids[t])), -1.0);
    total = total.defined() ? tape.add(total, nll) : nll;
    state = step.next;
    if (tgt_ids[t] == kEos) break;  // padding beyond EOS is ignored
  }
  return total;
}

}  // namespace ianmt
