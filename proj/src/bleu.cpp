#include "ianmt/bleu.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "ianmt/errors.hpp"

namespace ianmt {

namespace {

constexpr int kMaxOrder = 4;

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// n-grams joined with an unlikely separator; counts per distinct n-gram
std::unordered_map<std::string, long> ngram_counts(const TokenSeq& sent, int n) {
  std::unordered_map<std::string, long> counts;
  if (static_cast<int>(sent.size()) < n) return counts;
  for (size_t i = 0; i + static_cast<size_t>(n) <= sent.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) {
      if (j) key += '\x1f';
      key += lower(sent[i + static_cast<size_t>(j)]);
    }
    ++counts[key];
  }
  return counts;
}

double log_binom_pmf(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
         n * std::log(2.0);
}

}  // namespace

double bleu4(const std::vector<TokenSeq>& hypotheses, const std::vector<TokenSeq>& references) {
  if (hypotheses.empty()) throw DataError("bleu4: empty hypothesis set");
  if (hypotheses.size() != references.size())
    throw DataError("bleu4: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                    std::to_string(references.size()) + " references");

  long matches[kMaxOrder] = {0, 0, 0, 0};
  long totals[kMaxOrder] = {0, 0, 0, 0};
  long hyp_len = 0, ref_len = 0;

  for (size_t s = 0; s < hypotheses.size(); ++s) {
    const TokenSeq& hyp = hypotheses[s];
    const TokenSeq& ref = references[s];
    hyp_len += static_cast<long>(hyp.size());
    ref_len += static_cast<long>(ref.size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      auto hyp_counts = ngram_counts(hyp, n);
      auto ref_counts = ngram_counts(ref, n);
      long total = std::max<long>(0, static_cast<long>(hyp.size()) - n + 1);
      totals[n - 1] += total;
      for (const auto& [gram, count] : hyp_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  if (hyp_len == 0) return 0.0;
  double log_precision_sum = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (matches[n] == 0 || totals[n] == 0) return 0.0;
    log_precision_sum += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
  }
  double geo_mean = std::exp(log_precision_sum / kMaxOrder);
  double bp = std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)));
  return 100.0 * geo_mean * bp;
}

double sentence_bleu4(const TokenSeq& hypothesis, const TokenSeq& reference) {
  return bleu4({hypothesis}, {reference});
}

BleuReport length_bucket_report(const std::vector<TokenSeq>& hypotheses,
                                const std::vector<TokenSeq>& references,
                                const std::vector<int>& source_lengths) {
  if (hypotheses.size() != references.size() || hypotheses.size() != source_lengths.size())
    throw DataError("length_bucket_report: mismatched corpus sizes");

  BleuReport report;
  report.overall = bleu4(hypotheses, references);
  for (int threshold : {0, 10, 20, 30, 40, 50, 60}) {
    BleuBucket bucket;
    bucket.longer_than = threshold;
    std::vector<TokenSeq> hyp_subset, ref_subset;
    for (size_t i = 0; i < hypotheses.size(); ++i) {
      if (source_lengths[i] > threshold) {
        hyp_subset.push_back(hypotheses[i]);
        ref_subset.push_back(references[i]);
      }
    }
    bucket.n_sentences = static_cast<int>(hyp_subset.size());
    bucket.bleu = hyp_subset.empty() ? 0.0 : bleu4(hyp_subset, ref_subset);
    report.buckets.push_back(bucket);
  }
  return report;
}

std::string bleu_report_csv(const BleuReport& report) {
  std::ostringstream os;
  os << "bucket,n_sentences,bleu\n";
  for (const BleuBucket& b : report.buckets) {
    os << '>' << b.longer_than << ',' << b.n_sentences << ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", b.bleu);
    os << buf << '\n';
  }
  return os.str();
}

SignTestResult sign_test(const std::vector<int>& comparisons) {
  SignTestResult res;
  for (int c : comparisons) {
    if (c > 0)
      ++res.wins_a;
    else if (c < 0)
      ++res.wins_b;
  }
  res.n_effective = res.wins_a + res.wins_b;
  if (res.n_effective == 0) {
    res.all_ties = true;
    res.p_value = 1.0;
    return res;
  }
  const int n = res.n_effective, w = res.wins_a;
  double p_le = 0.0, p_ge = 0.0;
  for (int k = 0; k <= n; ++k) {
    double pmf = std::exp(log_binom_pmf(n, k));
    if (k <= w) p_le += pmf;
    if (k >= w) p_ge += pmf;
  }
  res.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
  return res;
}

}  // namespace ianmt
