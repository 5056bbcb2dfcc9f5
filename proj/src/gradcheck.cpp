#include "ianmt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace ianmt {

GradCheckResult model_gradcheck(const ModelParams& params, const std::vector<int>& src_ids,
                                const std::vector<int>& tgt_ids, double step, double floor) {
  GradCheckResult result;
  std::vector<Tensor> tensors = params.named_tensors();

  params.zero_grads();
  {
    Tape tape;
    Tensor loss = sentence_loss(tape, src_ids, tgt_ids, params);
    if (!loss.all_finite()) {
      result.non_finite = true;
      return result;
    }
    tape.backward(loss);
  }

  auto eval_loss = [&]() {
    Tape fwd(false);
    return sentence_loss(fwd, src_ids, tgt_ids, params).value();
  };

  for (Tensor& t : tensors) {
    GradCheckEntry entry;
    entry.name = t.name();
    const std::vector<double>& analytic = t.ensure_grad();
    for (int i = 0; i < t.size(); ++i) {
      double saved = t[i];
      t[i] = saved + step;
      double lp = eval_loss();
      t[i] = saved - step;
      double lm = eval_loss();
      t[i] = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        result.non_finite = true;
        return result;
      }
      double numeric = (lp - lm) / (2.0 * step);
      double a = analytic[static_cast<size_t>(i)];
      double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
      double rel = std::fabs(a - numeric) / denom;
      if (rel > entry.max_rel_error) {
        entry.max_rel_error = rel;
        entry.worst_coord = i;
        entry.analytic_at_worst = a;
        entry.numeric_at_worst = numeric;
      }
    }
    if (entry.max_rel_error > result.max_rel_error) {
      result.max_rel_error = entry.max_rel_error;
      result.worst_tensor = entry.name;
    }
    result.per_tensor.push_back(std::move(entry));
  }
  return result;
}

}  // namespace ianmt
