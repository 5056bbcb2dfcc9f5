#include "ianmt/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "ianmt/errors.hpp"
#include "ianmt/rng.hpp"

namespace ianmt {

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<bos>");
  add("<eos>");
  add("<unk>");
}

void Vocabulary::add(const std::string& token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<TokenSeq>& side, int cap) {
  if (cap < 5) throw DataError("vocabulary cap must be at least 5, got " + std::to_string(cap));
  if (side.empty()) throw DataError("cannot build a vocabulary from an empty corpus");

  std::map<std::string, long> freq;
  for (const TokenSeq& sent : side)
    for (const std::string& tok : sent) ++freq[tok];

  std::vector<std::pair<std::string, long>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  const size_t keep = static_cast<size_t>(cap - kNumReserved);
  for (size_t i = 0; i < ranked.size() && i < keep; ++i) v.add(ranked[i].first);
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size())
    throw DataError("token id " + std::to_string(id) + " out of range for vocabulary of size " +
                    std::to_string(size()));
  return id_to_token_[static_cast<size_t>(id)];
}

bool Vocabulary::contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

std::vector<int> Vocabulary::to_ids(const TokenSeq& tokens, bool append_eos) const {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 1);
  for (const std::string& tok : tokens) ids.push_back(id(tok));
  if (append_eos) ids.push_back(kEos);
  return ids;
}

TokenSeq Vocabulary::to_tokens(const std::vector<int>& ids) const {
  TokenSeq out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write vocabulary '" + path + "'");
  for (int i = kNumReserved; i < size(); ++i) os << id_to_token_[static_cast<size_t>(i)] << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open vocabulary '" + path + "'");
  Vocabulary v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (v.contains(line)) throw DataError("vocabulary '" + path + "': duplicate token '" + line + "'");
    v.add(line);
  }
  return v;
}

TokenSeq split_tokens(const std::string& line) {
  TokenSeq out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

ParallelCorpus load_corpus(const std::string& src_path, const std::string& tgt_path) {
  std::ifstream src(src_path), tgt(tgt_path);
  if (!src) throw DataError("cannot open source corpus '" + src_path + "'");
  if (!tgt) throw DataError("cannot open target corpus '" + tgt_path + "'");

  ParallelCorpus corpus;
  std::string sline, tline;
  size_t lineno = 0;
  while (true) {
    bool got_s = static_cast<bool>(std::getline(src, sline));
    bool got_t = static_cast<bool>(std::getline(tgt, tline));
    if (!got_s && !got_t) break;
    ++lineno;
    if (got_s != got_t)
      throw DataError("corpus files '" + src_path + "' and '" + tgt_path +
                      "' have different line counts (diverge at line " + std::to_string(lineno) + ")");
    SentencePair pair{split_tokens(sline), split_tokens(tline)};
    if (pair.source.empty() || pair.target.empty())
      throw DataError("empty sentence at line " + std::to_string(lineno) + " of corpus pair '" +
                      src_path + "' / '" + tgt_path + "'");
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

void save_corpus(const ParallelCorpus& corpus, const std::string& src_path, const std::string& tgt_path) {
  std::ofstream src(src_path, std::ios::trunc), tgt(tgt_path, std::ios::trunc);
  if (!src) throw DataError("cannot write '" + src_path + "'");
  if (!tgt) throw DataError("cannot write '" + tgt_path + "'");
  for (const SentencePair& pair : corpus) {
    for (size_t i = 0; i < pair.source.size(); ++i) src << (i ? " " : "") << pair.source[i];
    src << '\n';
    for (size_t i = 0; i < pair.target.size(); ++i) tgt << (i ? " " : "") << pair.target[i];
    tgt << '\n';
  }
}

ToyKind toy_kind_from_string(const std::string& s) {
  if (s == "copy") return ToyKind::copy;
  if (s == "reverse") return ToyKind::reverse;
  if (s == "numword") return ToyKind::numword;
  throw UsageError("unknown toy task '" + s + "' (expected copy|reverse|numword)");
}

ParallelCorpus gen_toy_task(ToyKind kind, int n_pairs, int len_lo, int len_hi, int vocab_size,
                            std::uint64_t seed) {
  if (vocab_size < 5) throw DataError("toy task vocab_size must be at least 5, got " + std::to_string(vocab_size));
  if (n_pairs < 1) throw DataError("toy task needs at least one pair");
  if (len_lo < 1 || len_hi < len_lo)
    throw DataError("bad toy length range [" + std::to_string(len_lo) + "," + std::to_string(len_hi) + "]");

  static const char* kDigitWords[10] = {"zero", "one", "two",   "three", "four",
                                        "five", "six", "seven", "eight", "nine"};
  Rng rng(seed);
  ParallelCorpus corpus;
  corpus.reserve(static_cast<size_t>(n_pairs));

  const int alphabet = vocab_size - kNumReserved;
  for (int p = 0; p < n_pairs; ++p) {
    int len = rng.uniform_int(len_lo, len_hi);
    SentencePair pair;
    pair.source.reserve(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) {
      if (kind == ToyKind::numword) {
        pair.source.push_back(std::to_string(rng.uniform_int(0, 9)));
      } else {
        pair.source.push_back("w" + std::to_string(rng.uniform_int(0, alphabet - 1)));
      }
    }
    switch (kind) {
      case ToyKind::copy:
        pair.target = pair.source;
        break;
      case ToyKind::reverse:
        pair.target.assign(pair.source.rbegin(), pair.source.rend());
        break;
      case ToyKind::numword:
        for (const std::string& d : pair.source)
          pair.target.push_back(kDigitWords[static_cast<size_t>(d[0] - '0')]);
        break;
    }
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace ianmt
