// Command-line front end: data generation, training, translation, scoring,
// gradient checking and attention/memory tracing.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ianmt/bleu.hpp"
#include "ianmt/config.hpp"
#include "ianmt/data.hpp"
#include "ianmt/errors.hpp"
#include "ianmt/gradcheck.hpp"
#include "ianmt/search.hpp"
#include "ianmt/tokens.hpp"
#include "ianmt/trainer.hpp"

using namespace ianmt;

namespace {

std::vector<int> with_eos(std::vector<int> ids) {
  ids.push_back(kEos);
  return ids;
}

void require_path(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError("missing required option " + flag);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write '" + path + "'");
  return os;
}

IdCorpus corpus_to_ids(const ParallelCorpus& corpus, const Vocabulary& src_vocab,
                       const Vocabulary& tgt_vocab) {
  IdCorpus out;
  out.reserve(corpus.size());
  for (const SentencePair& pair : corpus)
    out.emplace_back(src_vocab.to_ids(pair.source, false), tgt_vocab.to_ids(pair.target, false));
  return out;
}

int run_gen_data(const RunConfig& cfg) {
  require_path(cfg.out_src, "--out_src");
  require_path(cfg.out_tgt, "--out_tgt");
  ParallelCorpus corpus = gen_toy_task(toy_kind_from_string(cfg.task), cfg.pairs, cfg.len_lo,
                                       cfg.len_hi, cfg.vocab_size, cfg.seed);
  save_corpus(corpus, cfg.out_src, cfg.out_tgt);
  std::printf("wrote %zu %s pairs (lengths %d..%d) to %s / %s\n", corpus.size(), cfg.task.c_str(),
              cfg.len_lo, cfg.len_hi, cfg.out_src.c_str(), cfg.out_tgt.c_str());
  return 0;
}

int run_train(const RunConfig& cfg) {
  require_path(cfg.train_src, "--train_src");
  require_path(cfg.train_tgt, "--train_tgt");
  require_path(cfg.dev_src, "--dev_src");
  require_path(cfg.dev_tgt, "--dev_tgt");
  require_path(cfg.checkpoint, "--checkpoint");

  ParallelCorpus train_corpus = load_corpus(cfg.train_src, cfg.train_tgt);
  ParallelCorpus dev_corpus = load_corpus(cfg.dev_src, cfg.dev_tgt);

  std::vector<TokenSeq> src_side, tgt_side;
  for (const SentencePair& pair : train_corpus) {
    src_side.push_back(pair.source);
    tgt_side.push_back(pair.target);
  }
  Vocabulary src_vocab = Vocabulary::build(src_side, cfg.src_vocab_cap);
  Vocabulary tgt_vocab = Vocabulary::build(tgt_side, cfg.tgt_vocab_cap);

  std::string src_vocab_path = cfg.src_vocab.empty() ? cfg.checkpoint + ".src.vocab" : cfg.src_vocab;
  std::string tgt_vocab_path = cfg.tgt_vocab.empty() ? cfg.checkpoint + ".tgt.vocab" : cfg.tgt_vocab;
  src_vocab.save(src_vocab_path);
  tgt_vocab.save(tgt_vocab_path);

  ModelDims dims;
  dims.src_vocab = src_vocab.size();
  dims.tgt_vocab = tgt_vocab.size();
  dims.d_emb = cfg.d_emb;
  dims.d_enc = cfg.d_enc;
  dims.d_s = cfg.d_s;
  dims.d_a = cfg.effective_d_a();

  Variant variant = variant_from_string(cfg.variant);
  Rng init_rng(cfg.seed);
  ModelParams params;
  if (!cfg.init_checkpoint.empty()) {
    Checkpoint base = Checkpoint::load(cfg.init_checkpoint);
    std::string base_variant = base.meta("variant");
    if (variant == Variant::interactive && base_variant == "improved") {
      params = transfer_init(base, init_rng);  // the pre-train-then-fine-tune recipe
    } else if (base_variant == cfg.variant) {
      params = params_from_checkpoint(base);
    } else {
      throw DataError("cannot initialize a " + cfg.variant + " model from a " + base_variant +
                      " checkpoint");
    }
    if (params.dims.src_vocab != dims.src_vocab || params.dims.tgt_vocab != dims.tgt_vocab)
      throw DataError("init checkpoint vocabulary does not match the training corpus");
  } else {
    params = init_params(variant, dims, init_rng);
  }

  TrainResult result = train(corpus_to_ids(train_corpus, src_vocab, tgt_vocab),
                             corpus_to_ids(dev_corpus, src_vocab, tgt_vocab), cfg.train_config(),
                             params);

  Checkpoint best = result.best;
  for (const auto& [k, v] : cfg.echo()) best.set_meta("config." + k, v);
  best.save(cfg.checkpoint);

  std::string log_path = cfg.log.empty() ? cfg.checkpoint + ".log.csv" : cfg.log;
  std::ofstream log = open_out(log_path);
  for (const auto& [k, v] : cfg.echo()) log << "# " << k << "=" << v << "\n";
  log << training_log_csv(result.log);

  std::printf("filtered %d of %zu pairs; best dev BLEU %.4f at epoch %d; checkpoint: %s\n",
              result.filtered_out, train_corpus.size(), result.best_dev_bleu, result.best_epoch,
              cfg.checkpoint.c_str());
  return 0;
}

int run_translate(const RunConfig& cfg) {
  require_path(cfg.checkpoint, "--checkpoint");
  require_path(cfg.input, "--input");
  require_path(cfg.output, "--output");

  ModelParams params = params_from_checkpoint(Checkpoint::load(cfg.checkpoint));
  std::string src_vocab_path = cfg.src_vocab.empty() ? cfg.checkpoint + ".src.vocab" : cfg.src_vocab;
  std::string tgt_vocab_path = cfg.tgt_vocab.empty() ? cfg.checkpoint + ".tgt.vocab" : cfg.tgt_vocab;
  Vocabulary src_vocab = Vocabulary::load(src_vocab_path);
  Vocabulary tgt_vocab = Vocabulary::load(tgt_vocab_path);
  if (src_vocab.size() != params.dims.src_vocab || tgt_vocab.size() != params.dims.tgt_vocab)
    throw DataError("vocabulary files do not match the checkpoint dimensions");

  std::ifstream in(cfg.input);
  if (!in) throw DataError("cannot open '" + cfg.input + "'");
  std::ofstream out = open_out(cfg.output);
  std::ofstream nbest;
  if (!cfg.nbest.empty()) nbest = open_out(cfg.nbest);

  const int max_len = cfg.effective_decode_cap();
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    TokenSeq tokens = split_tokens(line);
    if (tokens.empty()) throw DataError("empty source at line " + std::to_string(lineno));
    std::vector<int> src_ids = with_eos(src_vocab.to_ids(tokens, false));
    BeamResult beam = beam_search(params, src_ids, cfg.beam_size, max_len);

    std::vector<int> hyp = beam.best.tokens;
    if (!hyp.empty() && hyp.back() == kEos) hyp.pop_back();
    TokenSeq words = tgt_vocab.to_tokens(hyp);
    for (size_t i = 0; i < words.size(); ++i) out << (i ? " " : "") << words[i];
    out << '\n';

    if (nbest.is_open()) {
      for (const Hypothesis& h : beam.finished) {
        std::vector<int> toks = h.tokens;
        if (!toks.empty() && toks.back() == kEos) toks.pop_back();
        TokenSeq ws = tgt_vocab.to_tokens(toks);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", h.normalized());
        nbest << buf << " |||";
        for (const std::string& w : ws) nbest << ' ' << w;
        nbest << '\n';
      }
      nbest << '\n';
    }
  }
  return 0;
}

int run_score(const RunConfig& cfg) {
  require_path(cfg.hyp, "--hyp");
  require_path(cfg.ref, "--ref");
  require_path(cfg.src, "--src");

  auto read_lines = [](const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open '" + path + "'");
    std::vector<TokenSeq> out;
    std::string line;
    while (std::getline(is, line)) out.push_back(split_tokens(line));
    return out;
  };
  std::vector<TokenSeq> hyps = read_lines(cfg.hyp);
  std::vector<TokenSeq> refs = read_lines(cfg.ref);
  std::vector<TokenSeq> srcs = read_lines(cfg.src);
  if (hyps.size() != refs.size() || hyps.size() != srcs.size())
    throw DataError("hyp/ref/src line counts differ");
  std::vector<int> src_lens;
  for (const TokenSeq& s : srcs) src_lens.push_back(static_cast<int>(s.size()));

  BleuReport report = length_bucket_report(hyps, refs, src_lens);
  std::printf("bleu4 = %.4f over %zu sentences\n", report.overall, hyps.size());
  if (!cfg.output.empty()) {
    std::ofstream os = open_out(cfg.output);
    os << bleu_report_csv(report);
  }

  if (!cfg.hyp2.empty()) {
    std::vector<TokenSeq> hyps2 = read_lines(cfg.hyp2);
    if (hyps2.size() != refs.size()) throw DataError("hyp2 line count differs from ref");
    std::vector<int> wins;
    for (size_t i = 0; i < refs.size(); ++i) {
      double a = sentence_bleu4(hyps[i], refs[i]);
      double b = sentence_bleu4(hyps2[i], refs[i]);
      wins.push_back(a > b ? +1 : a < b ? -1 : 0);
    }
    SignTestResult st = sign_test(wins);
    std::printf("sign test (A=%s vs B=%s): wins_a=%d wins_b=%d n=%d p=%.6g%s\n", cfg.hyp.c_str(),
                cfg.hyp2.c_str(), st.wins_a, st.wins_b, st.n_effective, st.p_value,
                st.all_ties ? " (all ties)" : "");
  }
  return 0;
}

int run_gradcheck(const RunConfig& cfg) {
  std::vector<Variant> variants;
  if (cfg.variant == "all")
    variants = {Variant::conventional, Variant::improved, Variant::interactive};
  else
    variants = {variant_from_string(cfg.variant)};

  const int d = cfg.gc_dims;
  if (d < 2 || d > 64) throw UsageError("--dims must be in [2,64]");
  ModelDims dims;
  dims.src_vocab = 12;
  dims.tgt_vocab = 12;
  dims.d_emb = d;
  dims.d_enc = std::max(1, d / 2);
  dims.d_s = d;
  dims.d_a = d;

  std::printf("%-13s %-6s %-12s %-14s %s\n", "variant", "seed", "max_rel_err", "worst_tensor",
              "status");
  double overall = 0.0;
  for (Variant v : variants) {
    for (int seed = 0; seed < cfg.gc_seeds; ++seed) {
      ModelParams params = ModelParams::create(v, dims);
      Rng rng(cfg.seed + static_cast<std::uint64_t>(seed));
      for (Tensor t : params.named_tensors())
        for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
      std::vector<int> src, tgt;
      int ns = rng.uniform_int(1, 4), nt = rng.uniform_int(1, 4);
      for (int i = 0; i < ns; ++i) src.push_back(rng.uniform_int(kNumReserved, dims.src_vocab - 1));
      for (int i = 0; i < nt; ++i) tgt.push_back(rng.uniform_int(kNumReserved, dims.tgt_vocab - 1));
      GradCheckResult res = model_gradcheck(params, with_eos(src), with_eos(tgt), cfg.gc_step);
      if (res.non_finite) throw NumericError("non-finite loss during gradient check");
      overall = std::max(overall, res.max_rel_error);
      std::printf("%-13s %-6d %-12.3e %-14s %s\n", to_string(v).c_str(), seed, res.max_rel_error,
                  res.worst_tensor.c_str(), res.max_rel_error <= cfg.gc_threshold ? "ok" : "FAIL");
    }
  }
  std::printf("max over all runs: %.3e (threshold %.1e)\n", overall, cfg.gc_threshold);
  if (overall > cfg.gc_threshold) throw NumericError("gradient check exceeded the threshold");
  return 0;
}

int run_trace(const RunConfig& cfg) {
  require_path(cfg.checkpoint, "--checkpoint");
  require_path(cfg.input, "--input");
  require_path(cfg.output, "--output");

  ModelParams params = params_from_checkpoint(Checkpoint::load(cfg.checkpoint));
  std::string src_vocab_path = cfg.src_vocab.empty() ? cfg.checkpoint + ".src.vocab" : cfg.src_vocab;
  Vocabulary src_vocab = Vocabulary::load(src_vocab_path);

  std::ifstream in(cfg.input);
  if (!in) throw DataError("cannot open '" + cfg.input + "'");
  std::string line;
  if (!std::getline(in, line) || split_tokens(line).empty())
    throw DataError("'" + cfg.input + "' has no sentence on its first line");
  std::vector<int> src_ids = with_eos(src_vocab.to_ids(split_tokens(line), false));

  std::ofstream os = open_out(cfg.output);
  os << "step,cell,delta_norm,weight\n";

  Tape fwd(false);
  SourceAnnotations ann = encode_source(fwd, params, src_ids);
  DecoderState state = init_state(fwd, params, ann);
  int y_prev = kBos;
  const int max_len = cfg.effective_decode_cap();
  char buf[64];
  for (int step = 1; step <= max_len; ++step) {
    StepResult res = decode_step(fwd, state, y_prev, params);
    std::vector<double> deltas = cell_delta_norms(state.memory.cells, res.next.memory.cells);
    for (size_t cell = 0; cell < deltas.size(); ++cell) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.12g,%.12g\n", step, cell, deltas[cell],
                    res.weights[static_cast<int>(cell)]);
      os << buf;
    }
    int best = 0;
    for (int v = 1; v < res.logits.size(); ++v)
      if (res.logits[v] > res.logits[best]) best = v;
    if (best == kEos) break;
    state = res.next;
    y_prev = best;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"attention-based neural machine translation with an interactively written source memory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--variant", cfg.variant, "conventional|improved|interactive (or 'all' for gradcheck)");
  app.add_option("--d_emb", cfg.d_emb, "word embedding width");
  app.add_option("--d_enc", cfg.d_enc, "encoder state width per direction");
  app.add_option("--d_s", cfg.d_s, "decoder state width");
  app.add_option("--d_a", cfg.d_a, "alignment hidden width (0: use d_s)");
  app.add_option("--src_vocab_cap", cfg.src_vocab_cap, "source vocabulary cap");
  app.add_option("--tgt_vocab_cap", cfg.tgt_vocab_cap, "target vocabulary cap");
  app.add_option("--batch_size", cfg.batch_size, "mini-batch size");
  app.add_option("--max_sentence_length", cfg.max_sentence_length, "training length filter");
  app.add_option("--dropout_rate", cfg.dropout_rate, "dropout on the readout hidden layer");
  app.add_option("--max_epochs", cfg.max_epochs, "epoch budget");
  app.add_option("--patience", cfg.patience, "dev evaluations without improvement before stopping");
  app.add_option("--seed", cfg.seed, "rng seed");
  app.add_option("--clip_norm", cfg.clip_norm, "global gradient-norm clip (<=0 disables)");
  app.add_option("--beam_size", cfg.beam_size, "beam width for translate");
  app.add_option("--max_decode_length", cfg.max_decode_length, "decode cap (0: 2*max_sentence_length+5)");

  app.add_option("--train_src", cfg.train_src, "training source corpus");
  app.add_option("--train_tgt", cfg.train_tgt, "training target corpus");
  app.add_option("--dev_src", cfg.dev_src, "dev source corpus");
  app.add_option("--dev_tgt", cfg.dev_tgt, "dev target corpus");
  app.add_option("--src_vocab", cfg.src_vocab, "source vocabulary file");
  app.add_option("--tgt_vocab", cfg.tgt_vocab, "target vocabulary file");
  app.add_option("--checkpoint", cfg.checkpoint, "checkpoint path (output for train, input otherwise)");
  app.add_option("--init_checkpoint", cfg.init_checkpoint, "checkpoint to initialize training from");
  app.add_option("--input", cfg.input, "input sentence file");
  app.add_option("--output", cfg.output, "output file");
  app.add_option("--nbest", cfg.nbest, "n-best dump file (translate)");
  app.add_option("--log", cfg.log, "training log CSV path");
  app.add_option("--hyp", cfg.hyp, "hypothesis file (score)");
  app.add_option("--hyp2", cfg.hyp2, "second hypothesis file for the sign test");
  app.add_option("--ref", cfg.ref, "reference file (score)");
  app.add_option("--src", cfg.src, "source file (score, for length buckets)");

  app.add_option("--task", cfg.task, "toy task: copy|reverse|numword");
  app.add_option("--pairs", cfg.pairs, "number of generated pairs");
  app.add_option("--len_lo", cfg.len_lo, "minimum source length");
  app.add_option("--len_hi", cfg.len_hi, "maximum source length");
  app.add_option("--vocab_size", cfg.vocab_size, "toy vocabulary size");
  app.add_option("--out_src", cfg.out_src, "generated source corpus path");
  app.add_option("--out_tgt", cfg.out_tgt, "generated target corpus path");
  app.add_option("--dims", cfg.gc_dims, "gradcheck dimension cap");
  app.add_option("--gc_seeds", cfg.gc_seeds, "gradcheck instances per variant");
  app.add_option("--step", cfg.gc_step, "finite-difference step");
  app.add_option("--threshold", cfg.gc_threshold, "gradcheck failure threshold");

  CLI::App* sub_gen = app.add_subcommand("gen-data", "generate a synthetic parallel corpus");
  CLI::App* sub_train = app.add_subcommand("train", "train a model and write the best checkpoint");
  CLI::App* sub_translate = app.add_subcommand("translate", "beam-decode a source file");
  CLI::App* sub_score = app.add_subcommand("score", "BLEU report and optional sign test");
  CLI::App* sub_gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  CLI::App* sub_trace = app.add_subcommand("trace", "per-step attention weights and memory deltas");
  for (CLI::App* sub : {sub_gen, sub_train, sub_translate, sub_score, sub_gradcheck, sub_trace})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
    if (sub_gen->parsed()) return run_gen_data(cfg);
    if (sub_train->parsed()) return run_train(cfg);
    if (sub_translate->parsed()) return run_translate(cfg);
    if (sub_score->parsed()) return run_score(cfg);
    if (sub_gradcheck->parsed()) return run_gradcheck(cfg);
    if (sub_trace->parsed()) return run_trace(cfg);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
