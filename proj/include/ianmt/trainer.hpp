#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ianmt/checkpoint.hpp"
#include "ianmt/model.hpp"
#include "ianmt/rng.hpp"

namespace ianmt {

/// AdaDelta accumulators, one pair per parameter tensor, all starting at zero.
struct AdaDeltaState {
  double rho = 0.95;
  double epsilon = 1e-6;
  std::vector<std::vector<double>> eg2;   // running E[g^2]
  std::vector<std::vector<double>> edx2;  // running E[dx^2]

  void init_for(const std::vector<Tensor>& params);
};

/// One coordinate of the AdaDelta recurrence:
///   E[g^2]  <- rho E[g^2] + (1-rho) g^2
///   dx       = -sqrt(E[dx^2]+eps) / sqrt(E[g^2]+eps) * g
///   E[dx^2] <- rho E[dx^2] + (1-rho) dx^2
double adadelta_delta(double g, double& eg2, double& edx2, double rho, double epsilon);

/// Applies the recurrence per coordinate and returns the deltas (also already
/// added into the parameter data).
std::vector<std::vector<double>> adadelta_step(AdaDeltaState& state, std::vector<Tensor>& params);

struct TrainConfig {
  int batch_size = 80;
  int max_sentence_length = 50;
  double dropout_rate = 0.5;
  int max_epochs = 10;
  int patience = 5;  // dev evaluations without improvement before stopping
  std::uint64_t seed = 1;
  double clip_norm = 1.0;  // global-norm gradient clip; <= 0 disables
  double rho = 0.95;
  double epsilon = 1e-6;
};

/// Sentence pairs as raw token ids (no BOS/EOS); the trainer appends EOS.
using IdCorpus = std::vector<std::pair<std::vector<int>, std::vector<int>>>;

struct EpochLog {
  int epoch = 0;
  double mean_train_loss = 0.0;
  double dev_bleu = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_dev_bleu = 0.0;
  int kept = 0;
  int filtered_out = 0;
};

std::string training_log_csv(const std::vector<EpochLog>& log);

/// Recurrent (square state-to-state) matrices become random orthogonal
/// matrices, biases stay zero, everything else is i.i.d. Gaussian(0, 0.01^2).
ModelParams init_params(Variant variant, const ModelDims& dims, Rng& rng);

/// Fills a square matrix with a random orthogonal matrix (QR of a Gaussian
/// draw, R-diagonal kept positive so the result is deterministic).
void fill_orthogonal(Tensor& t, Rng& rng);

/// Called after each epoch's dev evaluation; return false to stop training.
using EpochCallback = std::function<bool(int epoch, double dev_bleu, const ModelParams& params)>;

/// Mini-batch AdaDelta training with per-epoch greedy-decode dev BLEU, best
/// checkpoint tracking and patience-based early stopping. Filters out pairs
/// longer than max_sentence_length on either side first.
TrainResult train(const IdCorpus& train_corpus, const IdCorpus& dev_corpus, const TrainConfig& config,
                  ModelParams& params, const EpochCallback& callback = nullptr);

/// Snapshot of the current parameter values plus descriptive metadata.
Checkpoint make_checkpoint(const ModelParams& params);

/// Rebuilds a model from checkpoint metadata and tensors.
ModelParams params_from_checkpoint(const Checkpoint& ckpt);

/// Strictly loads checkpoint tensors into an existing parameter set;
/// any name or shape mismatch is an error naming the tensor.
void load_into(const Checkpoint& ckpt, ModelParams& params);

/// The pre-train recipe: every tensor of the interactive model that exists in
/// the improved-variant base checkpoint is copied bit-exactly; only the write
/// gates W_F and W_U keep their fresh Gaussian initialization.
ModelParams transfer_init(const Checkpoint& base, Rng& rng);

}  // namespace ianmt
