#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ianmt/model.hpp"
#include "ianmt/trainer.hpp"

namespace ianmt {

/// Effective run settings: a key=value config file mirrored by command-line
/// flags, flags winning. The echoed form lands in every checkpoint and log.
struct RunConfig {
  std::string variant = "improved";
  int d_emb = 32;
  int d_enc = 32;
  int d_s = 64;
  int d_a = 0;  // 0 means "use d_s"
  int src_vocab_cap = 30000;
  int tgt_vocab_cap = 30000;
  int batch_size = 80;
  int max_sentence_length = 50;
  double dropout_rate = 0.5;
  int max_epochs = 10;
  int patience = 5;
  std::uint64_t seed = 1;
  double clip_norm = 1.0;
  int beam_size = 10;
  int max_decode_length = 0;  // 0 means 2*max_sentence_length+5

  // paths
  std::string train_src, train_tgt, dev_src, dev_tgt;
  std::string src_vocab, tgt_vocab;
  std::string checkpoint, init_checkpoint;
  std::string input, output, nbest, log;
  std::string hyp, hyp2, ref, src;

  // gen-data / gradcheck knobs
  std::string out_src, out_tgt;
  std::string task = "copy";
  int pairs = 1000;
  int len_lo = 5;
  int len_hi = 15;
  int vocab_size = 20;
  int gc_dims = 8;
  int gc_seeds = 5;
  double gc_step = 1e-5;
  double gc_threshold = 1e-4;

  int effective_d_a() const { return d_a > 0 ? d_a : d_s; }
  int effective_decode_cap() const {
    return max_decode_length > 0 ? max_decode_length : 2 * max_sentence_length + 5;
  }

  TrainConfig train_config() const;
  /// Ordered key=value view of every setting, for echoing into artifacts.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

}  // namespace ianmt
