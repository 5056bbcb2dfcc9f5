#include "ianmt/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ianmt/tokens.hpp"

namespace ianmt {

bool Hypothesis::finished() const { return !tokens.empty() && tokens.back() == kEos; }

double Hypothesis::normalized() const {
  if (tokens.empty()) return -std::numeric_limits<double>::infinity();
  return logp / static_cast<double>(tokens.size());
}

std::vector<double> step_logprobs(const Tensor& logits) {
  const int n = logits.size();
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(logits[i] - mx);
  double lse = mx + std::log(z);
  std::vector<double> lp(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) lp[static_cast<size_t>(i)] = logits[i] - lse;
  return lp;
}

namespace {

// total logp descending; ties broken by token sequence so the ordering is a
// deterministic total order
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.logp != b.logp) return a.logp > b.logp;
  return a.tokens < b.tokens;
}

bool better_normalized(const Hypothesis& a, const Hypothesis& b) {
  double na = a.normalized(), nb = b.normalized();
  if (na != nb) return na > nb;
  return a.tokens < b.tokens;
}

}  // namespace

BeamResult beam_search(const ModelParams& params, const std::vector<int>& src_ids, int beam_size,
                       int max_len) {
  if (src_ids.empty()) throw std::invalid_argument("ianmt: beam_search: empty source");
  if (beam_size < 1 || max_len < 1)
    throw std::invalid_argument("ianmt: beam_search: beam_size and max_len must be >= 1");

  Tape fwd(false);
  SourceAnnotations ann = encode_source(fwd, params, src_ids);
  DecoderState state0 = init_state(fwd, params, ann);

  std::vector<Hypothesis> live{Hypothesis{{}, 0.0, state0}};
  std::vector<Hypothesis> finished;

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    // every EOS continuation of a live hypothesis finishes; the beam slots are
    // contested by the non-EOS continuations on total log-probability
    std::vector<Hypothesis> candidates;
    candidates.reserve(live.size() * static_cast<size_t>(params.dims.tgt_vocab));
    for (const Hypothesis& hyp : live) {
      int y_prev = hyp.tokens.empty() ? kBos : hyp.tokens.back();
      StepResult res = decode_step(fwd, hyp.state, y_prev, params);
      std::vector<double> lp = step_logprobs(res.logits);
      for (int v = 0; v < params.dims.tgt_vocab; ++v) {
        Hypothesis cand;
        cand.tokens = hyp.tokens;
        cand.tokens.push_back(v);
        cand.logp = hyp.logp + lp[static_cast<size_t>(v)];
        cand.state = res.next;
        if (cand.finished())
          finished.push_back(std::move(cand));
        else
          candidates.push_back(std::move(cand));
      }
    }
    std::sort(candidates.begin(), candidates.end(), better);
    if (static_cast<int>(candidates.size()) > beam_size) candidates.resize(static_cast<size_t>(beam_size));
    live = std::move(candidates);
  }

  // the winner is the best length-normalized hypothesis among everything
  // explored: finished ones and the still-live ones cut off at max_len
  BeamResult result;
  std::sort(finished.begin(), finished.end(), better_normalized);
  bool have = false;
  for (const std::vector<Hypothesis>* pool : {&finished, &live}) {
    for (const Hypothesis& h : *pool) {
      if (!have || better_normalized(h, result.best)) {
        result.best = h;
        have = true;
      }
    }
  }
  if (!have) throw std::invalid_argument("ianmt: beam_search: no hypotheses produced");
  result.finished = std::move(finished);
  return result;
}

std::vector<int> greedy_decode(const ModelParams& params, const std::vector<int>& src_ids, int max_len) {
  if (src_ids.empty()) throw std::invalid_argument("ianmt: greedy_decode: empty source");
  Tape fwd(false);
  SourceAnnotations ann = encode_source(fwd, params, src_ids);
  DecoderState state = init_state(fwd, params, ann);

  std::vector<int> out;
  int y_prev = kBos;
  for (int step = 0; step < max_len; ++step) {
    StepResult res = decode_step(fwd, state, y_prev, params);
    int best = 0;
    for (int v = 1; v < res.logits.size(); ++v)
      if (res.logits[v] > res.logits[best]) best = v;
    out.push_back(best);
    if (best == kEos) break;
    state = res.next;
    y_prev = best;
  }
  return out;
}

}  // namespace ianmt
