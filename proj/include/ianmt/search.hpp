#pragma once

#include <vector>

#include "ianmt/model.hpp"

namespace ianmt {

/// A partial or finished translation. The decoder state snapshot includes the
/// hypothesis' own memory handle; writes made while expanding one hypothesis
/// never touch a sibling's memory.
struct Hypothesis {
  std::vector<int> tokens;
  double logp = 0.0;
  DecoderState state;

  bool finished() const;
  double normalized() const;  // logp / token count
};

struct BeamResult {
  Hypothesis best;
  std::vector<Hypothesis> finished;  // sorted by normalized score, best first
};

/// Log-softmax of raw logits; the per-step scores both the beam and any
/// external rescoring of a token sequence must share.
std::vector<double> step_logprobs(const Tensor& logits);

/// Beam search. Each step expands every live hypothesis over the vocabulary;
/// EOS continuations move to the finished set and the non-EOS ones contest
/// the beam_size live slots on total log-probability. The search stops when
/// the beam empties or max_len is reached, and the best length-normalized
/// hypothesis over everything explored (finished, or live and cut off at
/// max_len) is returned. With beam_size 1 the returned score is never below
/// the greedy decode's.
BeamResult beam_search(const ModelParams& params, const std::vector<int>& src_ids, int beam_size,
                       int max_len);

std::vector<int> greedy_decode(const ModelParams& params, const std::vector<int>& src_ids, int max_len);

}  // namespace ianmt
