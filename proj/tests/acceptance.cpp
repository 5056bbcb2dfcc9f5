// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavy training criteria print their per-run numbers so the
// log shows how the thresholds were met.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ianmt/bleu.hpp"
#include "ianmt/data.hpp"
#include "ianmt/gradcheck.hpp"
#include "ianmt/rng.hpp"
#include "ianmt/search.hpp"
#include "ianmt/tokens.hpp"
#include "ianmt/trainer.hpp"

using namespace ianmt;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::vector<int> with_eos(std::vector<int> ids) {
  ids.push_back(kEos);
  return ids;
}

void randomize_params(ModelParams& p, Rng& rng, double scale) {
  for (Tensor t : p.named_tensors())
    for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-scale, scale);
}

IdCorpus to_ids(const ParallelCorpus& corpus, const Vocabulary& sv, const Vocabulary& tv) {
  IdCorpus out;
  for (const SentencePair& pair : corpus)
    out.emplace_back(sv.to_ids(pair.source, false), tv.to_ids(pair.target, false));
  return out;
}

std::vector<TokenSeq> side_of(const ParallelCorpus& corpus, bool source) {
  std::vector<TokenSeq> out;
  for (const SentencePair& p : corpus) out.push_back(source ? p.source : p.target);
  return out;
}

// ---------------------------------------------------------------------------
// criterion 1: per-variant gradient correctness
// ---------------------------------------------------------------------------

bool criterion_gradients(std::string& detail) {
  const double t0 = now_seconds();
  ModelDims dims;
  dims.src_vocab = 12;
  dims.tgt_vocab = 12;
  dims.d_emb = 6;
  dims.d_enc = 4;
  dims.d_s = 8;
  dims.d_a = 6;

  double worst = 0.0;
  std::string worst_where;
  for (Variant v : {Variant::conventional, Variant::improved, Variant::interactive}) {
    for (int seed = 0; seed < 20; ++seed) {
      ModelParams p = ModelParams::create(v, dims);
      Rng rng(1000 + static_cast<std::uint64_t>(seed));
      randomize_params(p, rng, 1.0);
      std::vector<int> src, tgt;
      int ns = rng.uniform_int(1, 4), nt = rng.uniform_int(1, 4);  // +EOS stays within 5 tokens
      for (int i = 0; i < ns; ++i) src.push_back(rng.uniform_int(kNumReserved, 11));
      for (int i = 0; i < nt; ++i) tgt.push_back(rng.uniform_int(kNumReserved, 11));
      GradCheckResult res = model_gradcheck(p, with_eos(src), with_eos(tgt), 1e-5);
      if (res.non_finite) {
        detail = "non-finite loss for " + to_string(v) + " seed " + std::to_string(seed);
        return false;
      }
      if (res.max_rel_error > worst) {
        worst = res.max_rel_error;
        worst_where = to_string(v) + "/" + res.worst_tensor;
      }
    }
  }
  double elapsed = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max rel error %.3e (%s) over 3x20 instances in %.1fs", worst,
                worst_where.c_str(), elapsed);
  detail = buf;
  return worst <= 1e-4 && elapsed < 120.0;
}

// ---------------------------------------------------------------------------
// criterion 2: attention/memory invariants, 1000 randomized trials
// ---------------------------------------------------------------------------

bool criterion_invariants(std::string& detail) {
  ModelDims dims;
  dims.src_vocab = 8;
  dims.tgt_vocab = 8;
  dims.d_emb = 4;
  dims.d_enc = 3;
  dims.d_s = 5;
  dims.d_a = 4;

  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(2000 + static_cast<std::uint64_t>(trial));

    // weights nonnegative, summing to 1 +- 1e-9
    {
      const int n = rng.uniform_int(1, 7), m = rng.uniform_int(2, 6), d_s = rng.uniform_int(2, 6);
      AttentionParams att(3, d_s, m, "att");
      for (Tensor t : att.tensors())
        for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.5, 1.5);
      Tensor query(Shape{d_s});
      for (int i = 0; i < d_s; ++i) query[i] = rng.uniform(-1.5, 1.5);
      Tensor cells(Shape{n, m});
      for (int i = 0; i < cells.size(); ++i) cells[i] = rng.uniform(-2.0, 2.0);
      Tape tape;
      ReadWeights w = normalize(tape, align_scores(tape, att, query, cells));
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        if (w[i] < 0.0) {
          detail = "negative weight at trial " + std::to_string(trial);
          return false;
        }
        sum += w[i];
      }
      if (std::fabs(sum - 1.0) > 1e-9) {
        detail = "weight sum off by " + std::to_string(sum - 1.0) + " at trial " + std::to_string(trial);
        return false;
      }

      // zero-weight cells bit-identical across a write
      WriteParams wp(m, d_s, "mem");
      for (Tensor t : wp.tensors())
        for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.5, 1.5);
      Tensor wz(Shape{n});
      for (int i = 0; i < n; ++i) wz[i] = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.1, 1.0);
      Tensor s_t(Shape{d_s});
      for (int i = 0; i < d_s; ++i) s_t[i] = rng.uniform(-1.5, 1.5);
      SourceMemory mem;
      mem.cells = cells;
      SourceMemory written = write(tape, mem, wz, s_t, wp);
      for (int i = 0; i < n; ++i) {
        if (wz[i] != 0.0) continue;
        for (int j = 0; j < m; ++j) {
          if (written.cells.at(i, j) != cells.at(i, j)) {
            detail = "zero-weight cell changed at trial " + std::to_string(trial);
            return false;
          }
        }
      }
    }

    // conventional/improved memory is the encoder output at every step, and
    // the interactive path with writing disabled equals improved bitwise
    {
      std::vector<int> src;
      int ns = rng.uniform_int(1, 4);
      for (int i = 0; i < ns; ++i) src.push_back(rng.uniform_int(kNumReserved, 7));
      src = with_eos(src);

      ModelParams improved = ModelParams::create(Variant::improved, dims);
      randomize_params(improved, rng, 0.8);
      ModelParams conventional = ModelParams::create(Variant::conventional, dims);
      randomize_params(conventional, rng, 0.8);
      ModelParams ia = ModelParams::create(Variant::interactive, dims);
      randomize_params(ia, rng, 0.8);
      {
        auto imp = improved.named_tensors();
        for (Tensor t : ia.named_tensors())
          for (const Tensor& s : imp)
            if (s.name() == t.name()) t.copy_data_from(s);
      }

      for (ModelParams* mp : {&conventional, &improved}) {
        Tape tape(false);
        SourceAnnotations ann = encode_source(tape, *mp, src);
        Tensor encoded = ann.cells.clone();
        DecoderState st = init_state(tape, *mp, ann);
        int y = kBos;
        for (int t = 0; t < 3; ++t) {
          StepResult r = decode_step(tape, st, y, *mp);
          for (int i = 0; i < encoded.size(); ++i) {
            if (r.next.memory.cells[i] != encoded[i]) {
              detail = to_string(mp->variant) + " memory changed at trial " + std::to_string(trial);
              return false;
            }
          }
          st = r.next;
          y = rng.uniform_int(kNumReserved, 7);
        }
      }

      Tape ta(false), tb(false);
      SourceAnnotations ann_a = encode_source(ta, improved, src);
      SourceAnnotations ann_b = encode_source(tb, ia, src);
      DecoderState sa = init_state(ta, improved, ann_a);
      DecoderState sb = init_state(tb, ia, ann_b);
      int y = kBos;
      for (int t = 0; t < 3; ++t) {
        StepResult ra = decode_step(ta, sa, y, improved);
        StepResult rb = decode_step(tb, sb, y, ia, false, 0.0, nullptr, /*disable_write=*/true);
        for (int i = 0; i < ra.logits.size(); ++i) {
          if (ra.logits[i] != rb.logits[i]) {
            detail = "write-disabled interactive diverged from improved at trial " +
                     std::to_string(trial);
            return false;
          }
        }
        sa = ra.next;
        sb = rb.next;
        y = rng.uniform_int(kNumReserved, 7);
      }
    }
  }
  detail = "1000 trials: weight simplex, zero-weight bit-stability, read-only variants, "
           "write-disabled equivalence";
  return true;
}

// ---------------------------------------------------------------------------
// criterion 3: AdaDelta first-step closed form
// ---------------------------------------------------------------------------

bool criterion_adadelta(std::string& detail) {
  double eg2 = 0.0, edx2 = 0.0;
  double dx = adadelta_delta(1.0, eg2, edx2, 0.95, 1e-6);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "first-step delta %.7e vs -4.4721e-3", dx);
  detail = buf;
  return std::fabs(dx - (-4.4721e-3)) <= 1e-7;
}

// ---------------------------------------------------------------------------
// criterion 4: BLEU oracle
// ---------------------------------------------------------------------------

bool criterion_bleu(std::string& detail) {
  std::vector<TokenSeq> hyp = {split_tokens("the cat sat on mat")};
  std::vector<TokenSeq> ref = {split_tokens("the cat sat on the mat")};
  double score = bleu4(hyp, ref);
  double identical = bleu4(ref, ref);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "oracle %.4f (want 57.89 +- 0.01), identical %.4f", score, identical);
  detail = buf;
  return std::fabs(score - 57.89) <= 0.01 && identical == 100.0;
}

// ---------------------------------------------------------------------------
// criterion 5: copy-task learning
// ---------------------------------------------------------------------------

double exact_sequence_accuracy(const ModelParams& params, const IdCorpus& dev, int max_len) {
  int correct = 0;
  for (const auto& [src, tgt] : dev) {
    std::vector<int> out = greedy_decode(params, with_eos(src), max_len);
    if (!out.empty() && out.back() == kEos) out.pop_back();
    if (out == tgt) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dev.size());
}

bool criterion_copy_task(std::string& detail) {
  const double t0 = now_seconds();
  ParallelCorpus train_corpus = gen_toy_task(ToyKind::copy, 5000, 5, 15, 20, 11);
  ParallelCorpus dev_corpus = gen_toy_task(ToyKind::copy, 500, 5, 15, 20, 12);
  Vocabulary sv = Vocabulary::build(side_of(train_corpus, true), 20);
  Vocabulary tv = Vocabulary::build(side_of(train_corpus, false), 20);
  IdCorpus train_ids = to_ids(train_corpus, sv, tv);
  IdCorpus dev_ids = to_ids(dev_corpus, sv, tv);

  ModelDims dims;
  dims.src_vocab = sv.size();
  dims.tgt_vocab = tv.size();
  dims.d_emb = 32;
  dims.d_enc = 32;
  dims.d_s = 64;
  dims.d_a = 64;

  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.max_sentence_length = 15;
  cfg.dropout_rate = 0.0;
  cfg.max_epochs = 30;
  cfg.patience = 30;
  cfg.seed = 21;

  std::ostringstream log;
  bool all_ok = true;
  for (Variant v : {Variant::improved, Variant::interactive}) {
    Rng rng(cfg.seed);
    ModelParams params = init_params(v, dims, rng);
    double final_acc = 0.0;
    int reached_epoch = -1;
    auto cb = [&](int epoch, double, const ModelParams& p) {
      final_acc = exact_sequence_accuracy(p, dev_ids, 2 * 15 + 5);
      if (final_acc >= 0.95) {
        reached_epoch = epoch;
        return false;
      }
      return true;
    };
    train(train_ids, dev_ids, cfg, params, cb);
    log << to_string(v) << ": acc " << final_acc * 100.0 << "% at epoch "
        << (reached_epoch > 0 ? std::to_string(reached_epoch) : std::string(">30")) << "; ";
    if (final_acc < 0.95) all_ok = false;
  }
  double elapsed = now_seconds() - t0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1fs total", elapsed);
  detail = log.str() + buf;
  return all_ok && elapsed < 900.0;
}

// ---------------------------------------------------------------------------
// criterion 6: numword directional comparison + pre-training speedup
// ---------------------------------------------------------------------------

bool criterion_directional(std::string& detail) {
  ParallelCorpus train_corpus = gen_toy_task(ToyKind::numword, 2000, 15, 30, 20, 31);
  ParallelCorpus dev_corpus = gen_toy_task(ToyKind::numword, 300, 15, 30, 20, 32);
  Vocabulary sv = Vocabulary::build(side_of(train_corpus, true), 30);
  Vocabulary tv = Vocabulary::build(side_of(train_corpus, false), 30);
  IdCorpus train_ids = to_ids(train_corpus, sv, tv);
  IdCorpus dev_ids = to_ids(dev_corpus, sv, tv);

  ModelDims dims;
  dims.src_vocab = sv.size();
  dims.tgt_vocab = tv.size();
  dims.d_emb = 24;
  dims.d_enc = 24;
  dims.d_s = 48;
  dims.d_a = 48;

  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.max_sentence_length = 30;
  cfg.dropout_rate = 0.0;
  cfg.max_epochs = 8;
  cfg.patience = 8;  // equal budgets: no early stop inside the budget
  cfg.seed = 0;      // per-run below

  double sum_improved = 0.0, sum_ia = 0.0;
  double sum_cold_epochs = 0.0, sum_transfer_epochs = 0.0;
  std::ostringstream log;

  for (std::uint64_t seed : {41, 42, 43}) {
    TrainConfig c = cfg;
    c.seed = seed;

    Rng rng_imp(seed);
    ModelParams improved = init_params(Variant::improved, dims, rng_imp);
    TrainResult res_improved = train(train_ids, dev_ids, c, improved);
    double target = res_improved.best_dev_bleu;
    sum_improved += target;

    Rng rng_cold(seed + 100);
    ModelParams ia_cold = init_params(Variant::interactive, dims, rng_cold);
    TrainResult res_cold = train(train_ids, dev_ids, c, ia_cold);
    sum_ia += res_cold.best_dev_bleu;
    int cold_epochs = c.max_epochs;  // censored when the target is never reached
    for (const EpochLog& e : res_cold.log)
      if (e.dev_bleu >= target) {
        cold_epochs = e.epoch;
        break;
      }
    sum_cold_epochs += cold_epochs;

    Rng rng_tr(seed + 200);
    ModelParams ia_transfer = transfer_init(res_improved.best, rng_tr);
    TrainResult res_transfer = train(train_ids, dev_ids, c, ia_transfer);
    int transfer_epochs = c.max_epochs + 1;  // fails the bound if never reached
    for (const EpochLog& e : res_transfer.log)
      if (e.dev_bleu >= target) {
        transfer_epochs = e.epoch;
        break;
      }
    sum_transfer_epochs += transfer_epochs;

    log << "seed " << seed << ": improved " << target << ", ia-cold " << res_cold.best_dev_bleu
        << " (reach@" << cold_epochs << "), ia-transfer reach@" << transfer_epochs << "; ";
  }

  double mean_improved = sum_improved / 3.0, mean_ia = sum_ia / 3.0;
  double mean_cold = sum_cold_epochs / 3.0, mean_transfer = sum_transfer_epochs / 3.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "mean BLEU ia %.2f vs improved %.2f; reach epochs transfer %.2f vs cold %.2f",
                mean_ia, mean_improved, mean_transfer, mean_cold);
  detail = log.str() + buf;
  return mean_ia >= mean_improved - 0.5 && mean_transfer * 2.0 <= mean_cold;
}

// ---------------------------------------------------------------------------
// criterion 7: beam search equals exhaustive enumeration
// ---------------------------------------------------------------------------

double rescore_sequence(const ModelParams& params, const std::vector<int>& src,
                        const std::vector<int>& tokens) {
  Tape fwd(false);
  SourceAnnotations ann = encode_source(fwd, params, src);
  DecoderState st = init_state(fwd, params, ann);
  double total = 0.0;
  int y_prev = kBos;
  for (int tok : tokens) {
    StepResult r = decode_step(fwd, st, y_prev, params);
    total += step_logprobs(r.logits)[static_cast<size_t>(tok)];
    st = r.next;
    y_prev = tok;
  }
  return total;
}

void enumerate_sequences(int vocab, int max_len, std::vector<int>& prefix,
                         std::vector<std::vector<int>>& out) {
  if (!prefix.empty() && (prefix.back() == kEos || static_cast<int>(prefix.size()) == max_len)) {
    out.push_back(prefix);
    return;
  }
  for (int v = 0; v < vocab; ++v) {
    prefix.push_back(v);
    enumerate_sequences(vocab, max_len, prefix, out);
    prefix.pop_back();
  }
}

bool criterion_beam(std::string& detail) {
  int agree = 0;
  const int kModels = 50;
  for (int i = 0; i < kModels; ++i) {
    Variant v = (i % 2) ? Variant::interactive : Variant::improved;
    ModelDims dims;
    dims.src_vocab = 4;
    dims.tgt_vocab = 4;
    dims.d_emb = 4;
    dims.d_enc = 3;
    dims.d_s = 5;
    dims.d_a = 4;
    ModelParams p = ModelParams::create(v, dims);
    Rng rng(40000 + static_cast<std::uint64_t>(i));
    randomize_params(p, rng, 1.5);
    if (i % 2) p.readout.bo[kEos] += 5.0;  // half the pool behaves like a trained decoder
    std::vector<int> src{kUnk, kEos};

    BeamResult beam = beam_search(p, src, 4, 3);

    std::vector<std::vector<int>> seqs;
    std::vector<int> prefix;
    enumerate_sequences(4, 3, prefix, seqs);
    bool have = false;
    double best_score = 0.0;
    std::vector<int> best;
    for (const auto& seq : seqs) {
      double score = rescore_sequence(p, src, seq) / static_cast<double>(seq.size());
      if (!have || score > best_score || (score == best_score && seq < best)) {
        have = true;
        best_score = score;
        best = seq;
      }
    }
    if (beam.best.tokens == best) ++agree;
  }
  detail = std::to_string(agree) + "/" + std::to_string(kModels) + " models agree with brute force";
  return agree == kModels;
}

// ---------------------------------------------------------------------------
// criterion 8: determinism and persistence
// ---------------------------------------------------------------------------

std::string file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return "<missing " + path + ">";
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

bool criterion_determinism(std::string& detail) {
  fs::path dir = fs::temp_directory_path() / "ianmt_acceptance8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string cli = std::string(IANMT_CLI);
  auto sh = [&](const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  };
  auto at = [&](const std::string& name) { return (dir / name).string(); };

  // identical config + seed twice, through the CLI
  std::string gen = "gen-data --task copy --pairs 150 --len_lo 3 --len_hi 8 --vocab_size 14 --seed 5";
  if (!sh(gen + " --out_src " + at("tr.src") + " --out_tgt " + at("tr.tgt")) ||
      !sh("gen-data --task copy --pairs 40 --len_lo 3 --len_hi 8 --vocab_size 14 --seed 6 --out_src " +
          at("dv.src") + " --out_tgt " + at("dv.tgt"))) {
    detail = "gen-data failed";
    return false;
  }
  std::string train_args = "train --variant improved --d_emb 8 --d_enc 8 --d_s 12 --batch_size 16 "
                           "--max_epochs 2 --patience 5 --dropout_rate 0.5 --seed 3 --train_src " +
                           at("tr.src") + " --train_tgt " + at("tr.tgt") + " --dev_src " + at("dv.src") +
                           " --dev_tgt " + at("dv.tgt");
  if (!sh(train_args + " --checkpoint " + at("a.ckpt")) ||
      !sh(train_args + " --checkpoint " + at("b.ckpt"))) {
    detail = "train failed";
    return false;
  }
  if (file_bytes(at("a.ckpt")) != file_bytes(at("b.ckpt"))) {
    detail = "checkpoints from identical runs differ";
    return false;
  }
  if (!sh("translate --checkpoint " + at("a.ckpt") + " --input " + at("dv.src") + " --output " +
          at("a.hyp") + " --beam_size 4") ||
      !sh("translate --checkpoint " + at("b.ckpt") + " --src_vocab " + at("a.ckpt.src.vocab") +
          " --tgt_vocab " + at("a.ckpt.tgt.vocab") + " --input " + at("dv.src") + " --output " +
          at("b.hyp") + " --beam_size 4")) {
    detail = "translate failed";
    return false;
  }
  if (file_bytes(at("a.hyp")) != file_bytes(at("b.hyp"))) {
    detail = "translations from identical checkpoints differ";
    return false;
  }

  // checkpoint round trip reproduces the forward pass bit-for-bit
  ModelDims dims;
  dims.src_vocab = 10;
  dims.tgt_vocab = 10;
  dims.d_emb = 5;
  dims.d_enc = 4;
  dims.d_s = 6;
  dims.d_a = 5;
  Rng rng(88);
  ModelParams params = init_params(Variant::interactive, dims, rng);
  Checkpoint ckpt = make_checkpoint(params);
  ckpt.save(at("rt.ckpt"));
  ModelParams reloaded = params_from_checkpoint(Checkpoint::load(at("rt.ckpt")));
  Tape ta(false), tb(false);
  double la = sentence_loss(ta, {4, 5, 6, kEos}, {7, 8, kEos}, params).value();
  double lb = sentence_loss(tb, {4, 5, 6, kEos}, {7, 8, kEos}, reloaded).value();
  if (la != lb) {
    detail = "round-trip forward pass differs";
    return false;
  }

  // transfer_init copies exactly the shared set, fresh-initializes exactly {W_F, W_U}
  Rng rng2(89);
  ModelParams improved = init_params(Variant::improved, dims, rng2);
  Checkpoint base = make_checkpoint(improved);
  Rng rng3(90);
  ModelParams ia = transfer_init(base, rng3);
  std::set<std::string> base_names, shared;
  for (const Tensor& t : base.tensors) base_names.insert(t.name());
  std::set<std::string> fresh;
  for (const Tensor& t : ia.named_tensors()) {
    const Tensor* b = base.find(t.name());
    if (t.name() == "mem.W_F" || t.name() == "mem.W_U") {
      fresh.insert(t.name());
      if (b) {
        detail = "write gates unexpectedly present in the base checkpoint";
        return false;
      }
      continue;
    }
    shared.insert(t.name());
    if (!b) {
      detail = "shared tensor '" + t.name() + "' missing from base";
      return false;
    }
    for (int i = 0; i < t.size(); ++i)
      if (t[i] != (*b)[i]) {
        detail = "shared tensor '" + t.name() + "' not copied bit-exactly";
        return false;
      }
  }
  if (shared != base_names || fresh != std::set<std::string>{"mem.W_F", "mem.W_U"}) {
    detail = "transferred/fresh tensor sets are wrong";
    return false;
  }

  fs::remove_all(dir);
  detail = "byte-identical checkpoints and translations; bit-identical round-trip; exact transfer sets";
  return true;
}

// ---------------------------------------------------------------------------
// criterion 9: length-bucket report
// ---------------------------------------------------------------------------

bool criterion_buckets(std::string& detail) {
  ParallelCorpus corpus = gen_toy_task(ToyKind::numword, 400, 1, 70, 20, 55);
  std::vector<TokenSeq> refs = side_of(corpus, false);
  std::vector<int> src_lens;
  for (const SentencePair& p : corpus) src_lens.push_back(static_cast<int>(p.source.size()));

  // hypotheses: references with every ninth sentence corrupted, so the score
  // is nontrivial
  std::vector<TokenSeq> hyps = refs;
  for (size_t i = 0; i < hyps.size(); i += 9)
    if (!hyps[i].empty()) hyps[i][0] = "wrong";

  BleuReport report = length_bucket_report(hyps, refs, src_lens);
  if (report.buckets.size() != 7) {
    detail = "expected 7 buckets, got " + std::to_string(report.buckets.size());
    return false;
  }
  const int want[7] = {0, 10, 20, 30, 40, 50, 60};
  for (int i = 0; i < 7; ++i)
    if (report.buckets[static_cast<size_t>(i)].longer_than != want[i]) {
      detail = "bucket thresholds wrong";
      return false;
    }
  if (report.buckets[0].bleu != report.overall) {
    detail = "bucket >0 differs from the overall score";
    return false;
  }
  for (const BleuBucket& b : report.buckets) {
    int manual = 0;
    for (int len : src_lens)
      if (len > b.longer_than) ++manual;
    if (manual != b.n_sentences) {
      detail = "bucket >" + std::to_string(b.longer_than) + " counts " +
               std::to_string(b.n_sentences) + ", manual recount " + std::to_string(manual);
      return false;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "7 buckets, overall %.4f == bucket>0, counts verified", report.overall);
  detail = buf;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  std::vector<Criterion> criteria = {
      {1, "gradient correctness (3 variants x 20 instances, step 1e-5, tol 1e-4)", criterion_gradients},
      {2, "attention/memory invariant suite (1000 trials)", criterion_invariants},
      {3, "AdaDelta first-step closed form", criterion_adadelta},
      {4, "BLEU oracle", criterion_bleu},
      {5, "copy-task learning (improved + interactive, >=95% within 30 epochs)", criterion_copy_task},
      {6, "numword directional comparison + pre-training speedup", criterion_directional},
      {7, "beam search vs exhaustive enumeration (50 models)", criterion_beam},
      {8, "determinism and persistence", criterion_determinism},
      {9, "length-bucket report", criterion_buckets},
  };

  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
