#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace ianmt {

/// Seeded random source. All stochastic behavior in the library draws from an
/// Rng passed in by the caller, so a fixed seed fixes the whole run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double gaussian(double mean, double stddev) {
    std::normal_distribution<double> d(mean, stddev);
    return d(eng_);
  }

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(eng_);
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(eng_);
  }

  bool bernoulli(double p) {
    std::bernoulli_distribution d(p);
    return d(eng_);
  }

  std::uint64_t next() { return eng_(); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), eng_);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ianmt
