#include "ianmt/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ianmt/bleu.hpp"
#include "ianmt/errors.hpp"
#include "ianmt/search.hpp"
#include "ianmt/tokens.hpp"

namespace ianmt {

void AdaDeltaState::init_for(const std::vector<Tensor>& params) {
  eg2.clear();
  edx2.clear();
  for (const Tensor& t : params) {
    eg2.emplace_back(static_cast<size_t>(t.size()), 0.0);
    edx2.emplace_back(static_cast<size_t>(t.size()), 0.0);
  }
}

double adadelta_delta(double g, double& eg2, double& edx2, double rho, double epsilon) {
  eg2 = rho * eg2 + (1.0 - rho) * g * g;
  double dx = -std::sqrt(edx2 + epsilon) / std::sqrt(eg2 + epsilon) * g;
  edx2 = rho * edx2 + (1.0 - rho) * dx * dx;
  return dx;
}

std::vector<std::vector<double>> adadelta_step(AdaDeltaState& state, std::vector<Tensor>& params) {
  if (state.eg2.size() != params.size())
    throw std::invalid_argument("ianmt: adadelta_step: optimizer state tracks " +
                                std::to_string(state.eg2.size()) + " tensors, got " +
                                std::to_string(params.size()));
  std::vector<std::vector<double>> deltas(params.size());
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& t = params[p];
    const std::vector<double>& g = t.ensure_grad();
    if (g.size() != state.eg2[p].size())
      throw std::invalid_argument("ianmt: adadelta_step: gradient size mismatch for tensor '" +
                                  t.name() + "'");
    deltas[p].resize(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
      double dx = adadelta_delta(g[i], state.eg2[p][i], state.edx2[p][i], state.rho, state.epsilon);
      deltas[p][i] = dx;
      t.data()[i] += dx;
    }
  }
  return deltas;
}

void fill_orthogonal(Tensor& t, Rng& rng) {
  if (!t.is_matrix() || t.rows() != t.cols())
    throw std::invalid_argument("ianmt: fill_orthogonal: tensor '" + t.name() +
                                "' is not square: " + shape_str(t.shape()));
  const int d = t.rows();
  std::vector<double> a(static_cast<size_t>(d) * d);
  for (double& v : a) v = rng.gaussian(0.0, 1.0);

  // modified Gram-Schmidt over columns, with one re-orthogonalization sweep;
  // the column norms (R diagonal) stay positive so the result is unique
  auto col = [&](std::vector<double>& m, int j, int i) -> double& {
    return m[static_cast<size_t>(i) * d + j];
  };
  for (int j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += col(a, k, i) * col(a, j, i);
        for (int i = 0; i < d; ++i) col(a, j, i) -= dot * col(a, k, i);
      }
    }
    double norm = 0.0;
    for (int i = 0; i < d; ++i) norm += col(a, j, i) * col(a, j, i);
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericError("degenerate draw in orthogonal initialization");
    for (int i = 0; i < d; ++i) col(a, j, i) /= norm;
  }
  t.data() = std::move(a);
}

ModelParams init_params(Variant variant, const ModelDims& dims, Rng& rng) {
  ModelParams params = ModelParams::create(variant, dims);

  std::set<const TensorImpl*> recurrent, biases;
  auto mark = [](std::set<const TensorImpl*>& s, const std::vector<Tensor>& ts) {
    for (const Tensor& t : ts) s.insert(t.impl());
  };
  std::vector<GruParams> grus = {params.enc_fwd, params.enc_bwd};
  if (variant == Variant::conventional)
    grus.push_back(params.dec_gru);
  else {
    grus.push_back(params.dec_prev);
    grus.push_back(params.dec_state);
  }
  for (const GruParams& g : grus) {
    mark(recurrent, g.recurrent());
    mark(biases, g.biases());
  }
  biases.insert(params.readout.b.impl());
  biases.insert(params.readout.bo.impl());

  for (Tensor t : params.named_tensors()) {
    if (biases.count(t.impl())) continue;  // stays zero
    if (recurrent.count(t.impl())) {
      fill_orthogonal(t, rng);
      continue;
    }
    for (int i = 0; i < t.size(); ++i) t[i] = rng.gaussian(0.0, 0.01);
  }
  return params;
}

namespace {

std::vector<int> with_eos(const std::vector<int>& ids) {
  std::vector<int> out = ids;
  out.push_back(kEos);
  return out;
}

void clip_gradients(const std::vector<Tensor>& params, double clip_norm) {
  if (clip_norm <= 0.0) return;
  double sq = 0.0;
  for (const Tensor& t : params)
    if (t.has_grad())
      for (double g : t.grad()) sq += g * g;
  double norm = std::sqrt(sq);
  if (norm <= clip_norm) return;
  double scale = clip_norm / norm;
  for (const Tensor& t : params) {
    Tensor tt = t;
    for (double& g : tt.ensure_grad()) g *= scale;
  }
}

TokenSeq ids_as_tokens(const std::vector<int>& ids) {
  TokenSeq out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(std::to_string(id));
  return out;
}

double evaluate_dev_bleu(const ModelParams& params, const IdCorpus& dev, int max_len) {
  std::vector<TokenSeq> hyps, refs;
  hyps.reserve(dev.size());
  refs.reserve(dev.size());
  for (const auto& [src, tgt] : dev) {
    std::vector<int> out = greedy_decode(params, with_eos(src), max_len);
    if (!out.empty() && out.back() == kEos) out.pop_back();
    hyps.push_back(ids_as_tokens(out));
    refs.push_back(ids_as_tokens(tgt));
  }
  return bleu4(hyps, refs);
}

}  // namespace

std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::ostringstream os;
  os << "epoch,mean_train_loss,dev_bleu,seconds\n";
  char buf[128];
  for (const EpochLog& e : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.4f,%.3f\n", e.epoch, e.mean_train_loss, e.dev_bleu,
                  e.seconds);
    os << buf;
  }
  return os.str();
}

Checkpoint make_checkpoint(const ModelParams& params) {
  Checkpoint ckpt;
  ckpt.set_meta("format", "1");
  ckpt.set_meta("variant", to_string(params.variant));
  ckpt.set_meta("src_vocab", std::to_string(params.dims.src_vocab));
  ckpt.set_meta("tgt_vocab", std::to_string(params.dims.tgt_vocab));
  ckpt.set_meta("d_emb", std::to_string(params.dims.d_emb));
  ckpt.set_meta("d_enc", std::to_string(params.dims.d_enc));
  ckpt.set_meta("d_s", std::to_string(params.dims.d_s));
  ckpt.set_meta("d_a", std::to_string(params.dims.d_a));
  for (const Tensor& t : params.named_tensors()) ckpt.tensors.push_back(t.clone());
  return ckpt;
}

ModelParams params_from_checkpoint(const Checkpoint& ckpt) {
  auto need = [&](const std::string& key) {
    std::string v = ckpt.meta(key);
    if (v.empty()) throw DataError("checkpoint metadata is missing '" + key + "'");
    return v;
  };
  ModelDims dims;
  dims.src_vocab = std::stoi(need("src_vocab"));
  dims.tgt_vocab = std::stoi(need("tgt_vocab"));
  dims.d_emb = std::stoi(need("d_emb"));
  dims.d_enc = std::stoi(need("d_enc"));
  dims.d_s = std::stoi(need("d_s"));
  dims.d_a = std::stoi(need("d_a"));
  ModelParams params = ModelParams::create(variant_from_string(need("variant")), dims);
  load_into(ckpt, params);
  return params;
}

void load_into(const Checkpoint& ckpt, ModelParams& params) {
  std::set<std::string> expected;
  for (Tensor t : params.named_tensors()) {
    expected.insert(t.name());
    const Tensor* src = ckpt.find(t.name());
    if (!src) throw DataError("checkpoint is missing tensor '" + t.name() + "'");
    if (src->shape() != t.shape())
      throw DataError("checkpoint tensor '" + t.name() + "' has shape " + shape_str(src->shape()) +
                      ", model expects " + shape_str(t.shape()));
    t.copy_data_from(*src);
  }
  for (const Tensor& t : ckpt.tensors)
    if (!expected.count(t.name()))
      throw DataError("checkpoint carries unexpected tensor '" + t.name() + "'");
}

ModelParams transfer_init(const Checkpoint& base, Rng& rng) {
  if (base.meta("variant") != "improved")
    throw DataError("transfer_init needs an improved-variant base checkpoint, got variant '" +
                    base.meta("variant", "?") + "'");
  ModelDims dims;
  dims.src_vocab = std::stoi(base.meta("src_vocab"));
  dims.tgt_vocab = std::stoi(base.meta("tgt_vocab"));
  dims.d_emb = std::stoi(base.meta("d_emb"));
  dims.d_enc = std::stoi(base.meta("d_enc"));
  dims.d_s = std::stoi(base.meta("d_s"));
  dims.d_a = std::stoi(base.meta("d_a"));

  ModelParams params = init_params(Variant::interactive, dims, rng);

  std::set<std::string> shared;
  for (Tensor t : params.named_tensors()) {
    if (t.name() == "mem.W_F" || t.name() == "mem.W_U") continue;  // stay freshly initialized
    shared.insert(t.name());
    const Tensor* src = base.find(t.name());
    if (!src) throw DataError("transfer_init: base checkpoint is missing tensor '" + t.name() + "'");
    if (src->shape() != t.shape())
      throw DataError("transfer_init: tensor '" + t.name() + "' has shape " + shape_str(src->shape()) +
                      " in the base checkpoint, expected " + shape_str(t.shape()));
    t.copy_data_from(*src);
  }
  for (const Tensor& t : base.tensors)
    if (!shared.count(t.name()))
      throw DataError("transfer_init: base checkpoint carries unexpected tensor '" + t.name() + "'");
  return params;
}

TrainResult train(const IdCorpus& train_corpus, const IdCorpus& dev_corpus, const TrainConfig& config,
                  ModelParams& params, const EpochCallback& callback) {
  if (config.batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (config.max_sentence_length < 1) throw UsageError("max_sentence_length must be >= 1");

  IdCorpus kept;
  for (const auto& pair : train_corpus) {
    if (static_cast<int>(pair.first.size()) <= config.max_sentence_length &&
        static_cast<int>(pair.second.size()) <= config.max_sentence_length)
      kept.push_back(pair);
  }
  TrainResult result;
  result.kept = static_cast<int>(kept.size());
  result.filtered_out = static_cast<int>(train_corpus.size() - kept.size());
  if (kept.empty())
    throw DataError("no training pairs left after filtering to length " +
                    std::to_string(config.max_sentence_length) + " (dropped " +
                    std::to_string(result.filtered_out) + " of " + std::to_string(train_corpus.size()) +
                    ")");
  if (dev_corpus.empty()) throw DataError("empty dev corpus");

  std::vector<Tensor> tensors = params.named_tensors();
  AdaDeltaState opt;
  opt.rho = config.rho;
  opt.epsilon = config.epsilon;
  opt.init_for(tensors);

  Rng shuffle_rng(config.seed);
  Rng dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const int dev_max_len = 2 * config.max_sentence_length + 5;

  double best_bleu = -1.0;
  int since_improve = 0;

  std::vector<size_t> order(kept.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    size_t n_sent = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
      size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      params.zero_grads();
      for (size_t k = start; k < end; ++k) {
        const auto& [src, tgt] = kept[order[k]];
        Tape tape;
        Tensor loss = sentence_loss(tape, with_eos(src), with_eos(tgt), params, true,
                                    config.dropout_rate, &dropout_rng);
        if (!loss.all_finite()) throw NumericError("non-finite training loss at epoch " +
                                                   std::to_string(epoch));
        loss_sum += loss.value();
        ++n_sent;
        tape.backward(loss);
      }
      double inv_batch = 1.0 / static_cast<double>(end - start);
      for (Tensor& t : tensors)
        for (double& g : t.ensure_grad()) g *= inv_batch;
      clip_gradients(tensors, config.clip_norm);
      adadelta_step(opt, tensors);
    }

    double dev_bleu = evaluate_dev_bleu(params, dev_corpus, dev_max_len);
    auto t1 = std::chrono::steady_clock::now();

    EpochLog entry;
    entry.epoch = epoch;
    entry.mean_train_loss = loss_sum / static_cast<double>(n_sent);
    entry.dev_bleu = dev_bleu;
    entry.seconds = std::chrono::duration<double>(t1 - t0).count();
    result.log.push_back(entry);

    if (dev_bleu > best_bleu) {
      best_bleu = dev_bleu;
      result.best_epoch = epoch;
      result.best_dev_bleu = dev_bleu;
      result.best = make_checkpoint(params);
      result.best.set_meta("epoch", std::to_string(epoch));
      result.best.set_meta("dev_bleu", std::to_string(dev_bleu));
      since_improve = 0;
    } else {
      ++since_improve;
    }

    if (callback && !callback(epoch, dev_bleu, params)) break;
    if (since_improve >= config.patience) break;
  }
  return result;
}

}  // namespace ianmt
