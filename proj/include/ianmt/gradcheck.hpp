#pragma once

#include <string>
#include <vector>

#include "ianmt/model.hpp"

namespace ianmt {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  int worst_coord = -1;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::vector<GradCheckEntry> per_tensor;
  bool non_finite = false;
};

/// Central-difference check of the full sentence_loss gradient against every
/// parameter coordinate. The numeric side uses forward passes only. Dropout
/// is off (the check needs a deterministic function).
///
/// Per coordinate the error is |analytic - numeric| / max(|analytic|,
/// |numeric|, floor). The floor decides how near-zero coordinates are judged:
/// below it the comparison is effectively absolute at floor * tolerance. At
/// model scale the loss is O(10) and central differences carry ~1e-10 of
/// cancellation noise, so a floor of 1e-5 (the default) still flags any
/// genuinely wrong backward rule while not failing on correct gradients that
/// happen to be tiny.
GradCheckResult model_gradcheck(const ModelParams& params, const std::vector<int>& src_ids,
                                const std::vector<int>& tgt_ids, double step, double floor = 1e-5);

}  // namespace ianmt
