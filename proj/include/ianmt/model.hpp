#pragma once

#include <string>
#include <vector>

#include "ianmt/attention.hpp"
#include "ianmt/encoder.hpp"
#include "ianmt/layers.hpp"
#include "ianmt/memory.hpp"
#include "ianmt/rng.hpp"
#include "ianmt/tensor.hpp"

namespace ianmt {

/// Selects how one shared decode loop behaves:
///   conventional — attention query is s_{t-1}, the memory is never written;
///   improved     — query is the intermediate state s~_{t-1}, still read-only;
///   interactive  — query is s~_{t-1} and the memory is written after each
///                  state update.
enum class Variant { conventional, improved, interactive };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ModelDims {
  int src_vocab = 0;
  int tgt_vocab = 0;
  int d_emb = 0;
  int d_enc = 0;  // per-direction encoder state width
  int d_s = 0;    // decoder state width
  int d_a = 0;    // alignment hidden width
  int m() const { return 2 * d_enc; }
};

/// All trainable tensors of one model. Every tensor carries a unique name so
/// checkpoints and the pre-train transfer can address them.
struct ModelParams {
  Variant variant = Variant::conventional;
  ModelDims dims;

  EmbeddingTable src_emb, tgt_emb;
  GruParams enc_fwd, enc_bwd;
  Tensor W_init;  // {d_s, d_enc}, projects the first backward annotation to s_0
  AttentionParams att;
  ReadoutParams readout;

  GruParams dec_gru;    // conventional decoder, input [e_{y-1}; c_t]
  GruParams dec_prev;   // intermediate-state GRU, input e_{y-1}
  GruParams dec_state;  // state-update GRU, input c_t
  WriteParams write;    // interactive only

  /// Zero-filled parameter set with the layout the variant needs.
  static ModelParams create(Variant variant, const ModelDims& dims);

  std::vector<Tensor> named_tensors() const;
  void zero_grads() const;
};

struct DecoderState {
  Tensor s;
  SourceMemory memory;
};

struct StepResult {
  Tensor logits;       // {V}
  ReadWeights weights;  // this step's shared read/write weights
  DecoderState next;
};

/// Embeds the source ids and runs the bidirectional encoder.
SourceAnnotations encode_source(Tape& tape, const ModelParams& params, const std::vector<int>& src_ids);

/// s_0 = tanh(W_init * backward half of h_1); memory starts at timestep 0.
DecoderState init_state(Tape& tape, const ModelParams& params, const SourceAnnotations& annotations);

/// One decode step. Step order for improved/interactive:
/// s~ -> align/read -> state update -> (interactive) write -> readout.
/// disable_write makes the interactive path skip the write, which must then
/// reproduce the improved variant bit for bit.
StepResult decode_step(Tape& tape, const DecoderState& state, int y_prev, const ModelParams& params,
                       bool training = false, double dropout_rate = 0.0, Rng* rng = nullptr,
                       bool disable_write = false);

/// Sum of per-token negative log-likelihoods under teacher forcing. Target
/// positions after the first EOS are ignored.
Tensor sentence_loss(Tape& tape, const std::vector<int>& src_ids, const std::vector<int>& tgt_ids,
                     const ModelParams& params, bool training = false, double dropout_rate = 0.0,
                     Rng* rng = nullptr, bool disable_write = false);

}  // namespace ianmt
