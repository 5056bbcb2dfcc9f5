#pragma once

#include <functional>

#include "ianmt/tensor.hpp"

namespace ianmt {

/// Result of comparing an analytic gradient against central differences.
/// rel error per coordinate is |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
struct FiniteDiffReport {
  double max_rel_error = 0.0;
  int worst_coord = -1;
  bool non_finite = false;  // a perturbed evaluation produced NaN/Inf
  int non_finite_coord = -1;
};

/// f must be deterministic and map (tape, x) to a scalar tensor, treating x as
/// the sole differentiable input. The numeric side re-evaluates f through
/// forward passes only, so it stays independent of the backward rules it checks.
FiniteDiffReport finite_diff_check(const std::function<Tensor(Tape&, const Tensor&)>& f,
                                   const Tensor& x, double step);

}  // namespace ianmt
