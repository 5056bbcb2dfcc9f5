#pragma once

#include <string>
#include <vector>

#include "ianmt/data.hpp"

namespace ianmt {

/// Corpus-level case-insensitive BLEU-4, in percent. Single reference per
/// hypothesis; clipped modified n-gram precisions for n=1..4, geometric mean,
/// brevity penalty exp(min(0, 1 - ref_len/hyp_len)). No smoothing: a zero
/// precision at any order zeroes the score.
double bleu4(const std::vector<TokenSeq>& hypotheses, const std::vector<TokenSeq>& references);

double sentence_bleu4(const TokenSeq& hypothesis, const TokenSeq& reference);

struct BleuBucket {
  int longer_than = 0;  // source sentences with length > this
  int n_sentences = 0;
  double bleu = 0.0;
};

struct BleuReport {
  double overall = 0.0;
  std::vector<BleuBucket> buckets;  // thresholds 0,10,20,30,40,50,60
};

/// BLEU restricted to source sentences longer than each threshold. The >0
/// bucket is the whole corpus, so its score equals the overall one.
BleuReport length_bucket_report(const std::vector<TokenSeq>& hypotheses,
                                const std::vector<TokenSeq>& references,
                                const std::vector<int>& source_lengths);

std::string bleu_report_csv(const BleuReport& report);

struct SignTestResult {
  double p_value = 1.0;
  int wins_a = 0;
  int wins_b = 0;
  int n_effective = 0;  // comparisons left after dropping ties
  bool all_ties = false;
};

/// Exact two-sided binomial sign test under p=0.5. Entries: +1 when A wins,
/// -1 when B wins, 0 for a tie (dropped).
SignTestResult sign_test(const std::vector<int>& comparisons);

}  // namespace ianmt
