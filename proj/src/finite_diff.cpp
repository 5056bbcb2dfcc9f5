#include "ianmt/finite_diff.hpp"

#include <cmath>

namespace ianmt {

FiniteDiffReport finite_diff_check(const std::function<Tensor(Tape&, const Tensor&)>& f,
                                   const Tensor& x, double step) {
  FiniteDiffReport rep;

  Tensor xg = x.clone();
  xg.set_requires_grad(true);
  Tape tape;
  Tensor loss = f(tape, xg);
  if (!loss.all_finite()) {
    rep.non_finite = true;
    return rep;
  }
  tape.backward(loss);
  const std::vector<double>& analytic = xg.ensure_grad();

  const int n = x.size();
  for (int i = 0; i < n; ++i) {
    Tensor xp = x.clone();
    xp[i] += step;
    Tensor xm = x.clone();
    xm[i] -= step;
    Tape fwd(false);
    double lp = f(fwd, xp).value();
    double lm = f(fwd, xm).value();
    if (!std::isfinite(lp) || !std::isfinite(lm)) {
      rep.non_finite = true;
      rep.non_finite_coord = i;
      return rep;
    }
    double numeric = (lp - lm) / (2.0 * step);
    double a = analytic[static_cast<size_t>(i)];
    double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
    double rel = std::fabs(a - numeric) / denom;
    if (rel > rep.max_rel_error) {
      rep.max_rel_error = rel;
      rep.worst_coord = i;
    }
  }
  return rep;
}

}  // namespace ianmt
