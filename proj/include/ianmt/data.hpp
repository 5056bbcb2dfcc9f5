#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ianmt/tokens.hpp"

namespace ianmt {

using TokenSeq = std::vector<std::string>;

struct SentencePair {
  TokenSeq source;
  TokenSeq target;
};

using ParallelCorpus = std::vector<SentencePair>;

/// Token <-> id map with fixed reserved ids 0=PAD 1=BOS 2=EOS 3=UNK.
class Vocabulary {
 public:
  Vocabulary();

  /// Keeps the (cap - 4) most frequent tokens, ties broken lexicographically.
  static Vocabulary build(const std::vector<TokenSeq>& side, int cap);

  int id(const std::string& token) const;  // kUnk for unknown tokens
  const std::string& token(int id) const;
  bool contains(const std::string& token) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }

  std::vector<int> to_ids(const TokenSeq& tokens, bool append_eos) const;
  TokenSeq to_tokens(const std::vector<int>& ids) const;

  /// One non-reserved token per line; line i holds the token with id i+4.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
  void add(const std::string& token);
};

/// Parallel files, one whitespace-tokenized sentence per line.
ParallelCorpus load_corpus(const std::string& src_path, const std::string& tgt_path);
void save_corpus(const ParallelCorpus& corpus, const std::string& src_path, const std::string& tgt_path);

TokenSeq split_tokens(const std::string& line);

enum class ToyKind { copy, reverse, numword };
ToyKind toy_kind_from_string(const std::string& s);

/// Deterministic synthetic parallel corpora:
///   copy    — target equals source over a synthetic alphabet;
///   reverse — target is the source reversed;
///   numword — source is digit tokens, target their English word forms.
ParallelCorpus gen_toy_task(ToyKind kind, int n_pairs, int len_lo, int len_hi, int vocab_size,
                            std::uint64_t seed);

}  // namespace ianmt
