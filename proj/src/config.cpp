#include "ianmt/config.hpp"

#include <cstdio>

namespace ianmt {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

TrainConfig RunConfig::train_config() const {
  TrainConfig tc;
  tc.batch_size = batch_size;
  tc.max_sentence_length = max_sentence_length;
  tc.dropout_rate = dropout_rate;
  tc.max_epochs = max_epochs;
  tc.patience = patience;
  tc.seed = seed;
  tc.clip_norm = clip_norm;
  return tc;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
  put("variant", variant);
  put("d_emb", std::to_string(d_emb));
  put("d_enc", std::to_string(d_enc));
  put("d_s", std::to_string(d_s));
  put("d_a", std::to_string(effective_d_a()));
  put("src_vocab_cap", std::to_string(src_vocab_cap));
  put("tgt_vocab_cap", std::to_string(tgt_vocab_cap));
  put("batch_size", std::to_string(batch_size));
  put("max_sentence_length", std::to_string(max_sentence_length));
  put("dropout_rate", fmt_double(dropout_rate));
  put("max_epochs", std::to_string(max_epochs));
  put("patience", std::to_string(patience));
  put("seed", std::to_string(seed));
  put("clip_norm", fmt_double(clip_norm));
  put("beam_size", std::to_string(beam_size));
  put("max_decode_length", std::to_string(effective_decode_cap()));
  return kv;
}

}  // namespace ianmt
