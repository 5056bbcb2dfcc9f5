#include "ianmt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ianmt {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

namespace {

[[noreturn]] void fail(const std::string& op, const std::string& what) {
  throw std::invalid_argument("ianmt: " + op + ": " + what);
}

[[noreturn]] void fail_shapes(const std::string& op, const Shape& a, const Shape& b) {
  fail(op, "shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) fail_shapes(op, a.shape(), b.shape());
}

void check_vector(const char* op, const Tensor& x) {
  if (!x.is_vector()) fail(op, "expected a vector, got shape " + shape_str(x.shape()));
}

void check_matrix(const char* op, const Tensor& x) {
  if (!x.is_matrix()) fail(op, "expected a matrix, got shape " + shape_str(x.shape()));
}

size_t checked_size(const Shape& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("ianmt: tensor dims must be positive, got " + shape_str(shape));
    n *= static_cast<size_t>(d);
  }
  return n;
}

}  // namespace

Tensor::Tensor(Shape shape, double fill, bool requires_grad) {
  impl_ = std::make_shared<TensorImpl>();
  size_t n = checked_size(shape);
  impl_->shape = std::move(shape);
  impl_->data.assign(n, fill);
  impl_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  size_t n = checked_size(shape);
  if (n != data.size())
    throw std::invalid_argument("ianmt: tensor data length " + std::to_string(data.size()) +
                                " does not match shape " + shape_str(shape));
  impl_ = std::make_shared<TensorImpl>();
  impl_->shape = std::move(shape);
  impl_->data = std::move(data);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(double v) { return Tensor(Shape{1}, std::vector<double>{v}); }

int Tensor::rows() const {
  if (!is_matrix()) fail("rows", "not a matrix: " + shape_str(shape()));
  return impl_->shape[0];
}

int Tensor::cols() const {
  if (!is_matrix()) fail("cols", "not a matrix: " + shape_str(shape()));
  return impl_->shape[1];
}

double Tensor::value() const {
  if (size() != 1) fail("value", "not a scalar: " + shape_str(shape()));
  return impl_->data[0];
}

double Tensor::at(int r, int c) const { return impl_->data[static_cast<size_t>(r) * cols() + c]; }
double& Tensor::at(int r, int c) { return impl_->data[static_cast<size_t>(r) * impl_->shape[1] + c]; }

const std::vector<double>& Tensor::grad() const {
  if (impl_->grad.empty()) fail("grad", "no gradient present for tensor '" + impl_->name + "'");
  return impl_->grad;
}

std::vector<double>& Tensor::ensure_grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() { std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0); }

Tensor Tensor::clone() const {
  Tensor t(impl_->shape, impl_->data, impl_->requires_grad);
  t.impl_->name = impl_->name;
  return t;
}

void Tensor::copy_data_from(const Tensor& other) {
  if (shape() != other.shape()) fail_shapes("copy_data_from", shape(), other.shape());
  impl_->data = other.impl_->data;
}

bool Tensor::all_finite() const {
  for (double v : impl_->data)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tape::record(Tensor& out, BackwardFn fn) {
  out.set_requires_grad(true);
  records_.push_back(std::move(fn));
}

// ---------------------------------------------------------------------------
// elementwise ops
// ---------------------------------------------------------------------------

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  Tensor out(a.shape());
  const int n = a.size();
  for (int i = 0; i < n; ++i) out[i] = a[i] + b[i];
  if (track(a, b)) {
    record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr()] {
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) ai->grad[i] += g[i];
      }
      if (bi->requires_grad) {
        if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) bi->grad[i] += g[i];
      }
    });
  }
  return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  Tensor out(a.shape());
  const int n = a.size();
  for (int i = 0; i < n; ++i) out[i] = a[i] - b[i];
  if (track(a, b)) {
    record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr()] {
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) ai->grad[i] += g[i];
      }
      if (bi->requires_grad) {
        if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) bi->grad[i] -= g[i];
      }
    });
  }
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  Tensor out(a.shape());
  const int n = a.size();
  for (int i = 0; i < n; ++i) out[i] = a[i] * b[i];
  if (track(a, b)) {
    record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr()] {
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) ai->grad[i] += bi->data[i] * g[i];
      }
      if (bi->requires_grad) {
        if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) bi->grad[i] += ai->data[i] * g[i];
      }
    });
  }
  return out;
}

Tensor Tape::tanh(const Tensor& x) {
  Tensor out(x.shape());
  const int n = x.size();
  for (int i = 0; i < n; ++i) out[i] = std::tanh(x[i]);
  if (track(x)) {
    record(out, [xi = x.impl_ptr(), oi = out.impl_ptr()] {
      if (!xi->requires_grad) return;
      if (xi->grad.empty()) xi->grad.assign(xi->data.size(), 0.0);
      const auto& g = oi->grad;
      for (size_t i = 0; i < g.size(); ++i) {
        double y = oi->data[i];
        xi->grad[i] += (1.0 - y * y) * g[i];
      }
    });
  }
  return out;
}

Tensor Tape::sigmoid(const Tensor& x) {
  Tensor out(x.shape());
  const int n = x.size();
  for (int i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
  if (track(x)) {
    record(out, [xi = x.impl_ptr(), oi = out.impl_ptr()] {
      if (!xi->requires_grad) return;
      if (xi->grad.empty()) xi->grad.assign(xi->data.size(), 0.0);
      const auto& g = oi->grad;
      for (size_t i = 0; i < g.size(); ++i) {
        double y = oi->data[i];
        xi->grad[i] += y * (1.0 - y) * g[i];
      }
    });
  }
  return out;
}

Tensor Tape::log(const Tensor& x) {
  Tensor out(x.shape());
  const int n = x.size();
  for (int i = 0; i < n; ++i) out[i] = std::log(x[i]);
  if (track(x)) {
    record(out, [xi = x.impl_ptr(), oi = out.impl_ptr()] {
      if (!xi->requires_grad) return;
      if (xi->grad.empty()) xi->grad.assign(xi->data.size(), 0.0);
      const auto& g = oi->grad;
      for (size_t i = 0; i < g.size(); ++i) xi->grad[i] += g[i] / xi->data[i];
    });
  }
  return out;
}

Tensor Tape::scale(const Tensor& x, double c) {
  Tensor out(x.shape());
  const int n = x.size();
  for (int i = 0; i < n; ++i) out[i] = c * x[i];
  if (track(x)) {
    record(out, [xi = x.impl_ptr(), oi = out.impl_ptr(), c] {
      if (!xi->requires_grad) return;
      if (xi->grad.empty()) xi->grad.assign(xi->data.size(), 0.0);
      const auto& g = oi->grad;
      for (size_t i = 0; i < g.size(); ++i) xi->grad[i] += c * g[i];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// matrix / vector ops
// ---------------------------------------------------------------------------

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  check_matrix("matmul", a);
  const int r = a.rows(), c = a.cols();
  if (b.is_vector()) {
    if (b.size() != c) fail_shapes("matmul", a.shape(), b.shape());
    Tensor out(Shape{r});
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    for (int i = 0; i < r; ++i) {
      double acc = 0.0;
      const double* arow = ad + static_cast<size_t>(i) * c;
      for (int l = 0; l < c; ++l) acc += arow[l] * bd[l];
      out[i] = acc;
    }
    if (track(a, b)) {
      record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr(), r, c] {
        const auto& g = oi->grad;
        if (ai->requires_grad) {
          if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
          for (int i = 0; i < r; ++i) {
            double gi = g[static_cast<size_t>(i)];
            double* garow = ai->grad.data() + static_cast<size_t>(i) * c;
            for (int l = 0; l < c; ++l) garow[l] += gi * bi->data[static_cast<size_t>(l)];
          }
        }
        if (bi->requires_grad) {
          if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
          for (int i = 0; i < r; ++i) {
            double gi = g[static_cast<size_t>(i)];
            const double* arow = ai->data.data() + static_cast<size_t>(i) * c;
            for (int l = 0; l < c; ++l) bi->grad[static_cast<size_t>(l)] += gi * arow[l];
          }
        }
      });
    }
    return out;
  }
  check_matrix("matmul", b);
  if (b.rows() != c) fail_shapes("matmul", a.shape(), b.shape());
  const int k = b.cols();
  Tensor out(Shape{r, k});
  {
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    double* od = out.data().data();
    for (int i = 0; i < r; ++i)
      for (int l = 0; l < c; ++l) {
        double ail = ad[static_cast<size_t>(i) * c + l];
        const double* brow = bd + static_cast<size_t>(l) * k;
        double* orow = od + static_cast<size_t>(i) * k;
        for (int j = 0; j < k; ++j) orow[j] += ail * brow[j];
      }
  }
  if (track(a, b)) {
    record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr(), r, c, k] {
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
        // gA = gOut * B^T
        for (int i = 0; i < r; ++i)
          for (int l = 0; l < c; ++l) {
            double acc = 0.0;
            const double* grow = g.data() + static_cast<size_t>(i) * k;
            const double* brow = bi->data.data() + static_cast<size_t>(l) * k;
            for (int j = 0; j < k; ++j) acc += grow[j] * brow[j];
            ai->grad[static_cast<size_t>(i) * c + l] += acc;
          }
      }
      if (bi->requires_grad) {
        if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
        // gB = A^T * gOut
        for (int l = 0; l < c; ++l)
          for (int i = 0; i < r; ++i) {
            double ail = ai->data[static_cast<size_t>(i) * c + l];
            const double* grow = g.data() + static_cast<size_t>(i) * k;
            double* gbrow = bi->grad.data() + static_cast<size_t>(l) * k;
            for (int j = 0; j < k; ++j) gbrow[j] += ail * grow[j];
          }
      }
    });
  }
  return out;
}

Tensor Tape::matmul_nt(const Tensor& a, const Tensor& b) {
  check_matrix("matmul_nt", a);
  check_matrix("matmul_nt", b);
  if (a.cols() != b.cols()) fail_shapes("matmul_nt", a.shape(), b.shape());
  const int n = a.rows(), m = a.cols(), k = b.rows();
  Tensor out(Shape{n, k});
  {
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) {
        const double* arow = ad + static_cast<size_t>(i) * m;
        const double* brow = bd + static_cast<size_t>(j) * m;
        double acc = 0.0;
        for (int l = 0; l < m; ++l) acc += arow[l] * brow[l];
        out.at(i, j) = acc;
      }
  }
  if (track(a, b)) {
    record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr(), n, m, k] {
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k; ++j) {
            double gij = g[static_cast<size_t>(i) * k + j];
            double* garow = ai->grad.data() + static_cast<size_t>(i) * m;
            const double* brow = bi->data.data() + static_cast<size_t>(j) * m;
            for (int l = 0; l < m; ++l) garow[l] += gij * brow[l];
          }
      }
      if (bi->requires_grad) {
        if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < k; ++j) {
            double gij = g[static_cast<size_t>(i) * k + j];
            double* gbrow = bi->grad.data() + static_cast<size_t>(j) * m;
            const double* arow = ai->data.data() + static_cast<size_t>(i) * m;
            for (int l = 0; l < m; ++l) gbrow[l] += gij * arow[l];
          }
      }
    });
  }
  return out;
}

Tensor Tape::add_rowvec(const Tensor& m, const Tensor& v) {
  check_matrix("add_rowvec", m);
  check_vector("add_rowvec", v);
  if (m.cols() != v.size()) fail_shapes("add_rowvec", m.shape(), v.shape());
  const int r = m.rows(), c = m.cols();
  Tensor out(m.shape());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at(i, j) = m.at(i, j) + v[j];
  if (track(m, v)) {
    record(out, [mi = m.impl_ptr(), vi = v.impl_ptr(), oi = out.impl_ptr(), r, c] {
      const auto& g = oi->grad;
      if (mi->requires_grad) {
        if (mi->grad.empty()) mi->grad.assign(mi->data.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i) mi->grad[i] += g[i];
      }
      if (vi->requires_grad) {
        if (vi->grad.empty()) vi->grad.assign(vi->data.size(), 0.0);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < c; ++j) vi->grad[static_cast<size_t>(j)] += g[static_cast<size_t>(i) * c + j];
      }
    });
  }
  return out;
}

Tensor Tape::outer(const Tensor& u, const Tensor& v) {
  check_vector("outer", u);
  check_vector("outer", v);
  const int n = u.size(), m = v.size();
  Tensor out(Shape{n, m});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = u[i] * v[j];
  if (track(u, v)) {
    record(out, [ui = u.impl_ptr(), vi = v.impl_ptr(), oi = out.impl_ptr(), n, m] {
      const auto& g = oi->grad;
      if (ui->requires_grad) {
        if (ui->grad.empty()) ui->grad.assign(ui->data.size(), 0.0);
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          const double* grow = g.data() + static_cast<size_t>(i) * m;
          for (int j = 0; j < m; ++j) acc += grow[j] * vi->data[static_cast<size_t>(j)];
          ui->grad[static_cast<size_t>(i)] += acc;
        }
      }
      if (vi->requires_grad) {
        if (vi->grad.empty()) vi->grad.assign(vi->data.size(), 0.0);
        for (int i = 0; i < n; ++i) {
          double uiv = ui->data[static_cast<size_t>(i)];
          const double* grow = g.data() + static_cast<size_t>(i) * m;
          for (int j = 0; j < m; ++j) vi->grad[static_cast<size_t>(j)] += uiv * grow[j];
        }
      }
    });
  }
  return out;
}

Tensor Tape::weighted_sum(const Tensor& w, const Tensor& cells) {
  check_vector("weighted_sum", w);
  check_matrix("weighted_sum", cells);
  if (w.size() != cells.rows())
    fail("weighted_sum", "weight length " + shape_str(w.shape()) + " does not match cells " +
                             shape_str(cells.shape()));
  const int n = cells.rows(), m = cells.cols();
  Tensor out(Shape{m});
  {
    const double* cd = cells.data().data();
    for (int i = 0; i < n; ++i) {
      double wi = w[i];
      const double* crow = cd + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) out[j] += wi * crow[j];
    }
  }
  if (track(w, cells)) {
    record(out, [wi_ = w.impl_ptr(), ci = cells.impl_ptr(), oi = out.impl_ptr(), n, m] {
      const auto& g = oi->grad;
      if (wi_->requires_grad) {
        if (wi_->grad.empty()) wi_->grad.assign(wi_->data.size(), 0.0);
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          const double* crow = ci->data.data() + static_cast<size_t>(i) * m;
          for (int j = 0; j < m; ++j) acc += g[static_cast<size_t>(j)] * crow[j];
          wi_->grad[static_cast<size_t>(i)] += acc;
        }
      }
      if (ci->requires_grad) {
        if (ci->grad.empty()) ci->grad.assign(ci->data.size(), 0.0);
        for (int i = 0; i < n; ++i) {
          double wiv = wi_->data[static_cast<size_t>(i)];
          double* gcrow = ci->grad.data() + static_cast<size_t>(i) * m;
          for (int j = 0; j < m; ++j) gcrow[j] += wiv * g[static_cast<size_t>(j)];
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// structural ops
// ---------------------------------------------------------------------------

Tensor Tape::softmax(const Tensor& x) {
  check_vector("softmax", x);
  if (x.size() == 0) fail("softmax", "empty input");
  const int n = x.size();
  Tensor out(x.shape());
  double mx = x[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, x[i]);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = std::exp(x[i] - mx);
    z += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= z;
  if (track(x)) {
    record(out, [xi = x.impl_ptr(), oi = out.impl_ptr(), n] {
      if (!xi->requires_grad) return;
      if (xi->grad.empty()) xi->grad.assign(xi->data.size(), 0.0);
      const auto& g = oi->grad;
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += oi->data[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
      for (int i = 0; i < n; ++i)
        xi->grad[static_cast<size_t>(i)] += oi->data[static_cast<size_t>(i)] * (g[static_cast<size_t>(i)] - dot);
    });
  }
  return out;
}

Tensor Tape::concat(const Tensor& a, const Tensor& b) {
  check_vector("concat", a);
  check_vector("concat", b);
  const int p = a.size(), q = b.size();
  Tensor out(Shape{p + q});
  for (int i = 0; i < p; ++i) out[i] = a[i];
  for (int i = 0; i < q; ++i) out[p + i] = b[i];
  if (track(a, b)) {
    record(out, [ai = a.impl_ptr(), bi = b.impl_ptr(), oi = out.impl_ptr(), p, q] {
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        if (ai->grad.empty()) ai->grad.assign(ai->data.size(), 0.0);
        for (int i = 0; i < p; ++i) ai->grad[static_cast<size_t>(i)] += g[static_cast<size_t>(i)];
      }
      if (bi->requires_grad) {
        if (bi->grad.empty()) bi->grad.assign(bi->data.size(), 0.0);
        for (int i = 0; i < q; ++i) bi->grad[static_cast<size_t>(i)] += g[static_cast<size_t>(p + i)];
      }
    });
  }
  return out;
}

Tensor Tape::lookup(const Tensor& table, int row_id) {
  check_matrix("lookup", table);
  if (row_id < 0 || row_id >= table.rows())
    fail("lookup", "row " + std::to_string(row_id) + " out of range for table " + shape_str(table.shape()));
  const int d = table.cols();
  Tensor out(Shape{d});
  for (int j = 0; j < d; ++j) out[j] = table.at(row_id, j);
  if (track(table)) {
    record(out, [ti = table.impl_ptr(), oi = out.impl_ptr(), row_id, d] {
      if (!ti->requires_grad) return;
      if (ti->grad.empty()) ti->grad.assign(ti->data.size(), 0.0);
      const auto& g = oi->grad;
      double* grow = ti->grad.data() + static_cast<size_t>(row_id) * d;
      for (int j = 0; j < d; ++j) grow[j] += g[static_cast<size_t>(j)];
    });
  }
  return out;
}

Tensor Tape::stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) fail("stack_rows", "empty row list");
  const int m = rows[0].size();
  for (const auto& r : rows) {
    check_vector("stack_rows", r);
    if (r.size() != m) fail_shapes("stack_rows", rows[0].shape(), r.shape());
  }
  const int n = static_cast<int>(rows.size());
  Tensor out(Shape{n, m});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = rows[static_cast<size_t>(i)][j];
  bool any = false;
  for (const auto& r : rows) any = any || r.requires_grad();
  if (recording_ && any) {
    std::vector<std::shared_ptr<TensorImpl>> impls;
    impls.reserve(rows.size());
    for (const auto& r : rows) impls.push_back(r.impl_ptr());
    record(out, [impls = std::move(impls), oi = out.impl_ptr(), m] {
      const auto& g = oi->grad;
      for (size_t i = 0; i < impls.size(); ++i) {
        auto& ri = impls[i];
        if (!ri->requires_grad) continue;
        if (ri->grad.empty()) ri->grad.assign(ri->data.size(), 0.0);
        const double* grow = g.data() + i * static_cast<size_t>(m);
        for (int j = 0; j < m; ++j) ri->grad[static_cast<size_t>(j)] += grow[j];
      }
    });
  }
  return out;
}

Tensor Tape::row(const Tensor& m, int i) {
  check_matrix("row", m);
  if (i < 0 || i >= m.rows())
    fail("row", "index " + std::to_string(i) + " out of range for " + shape_str(m.shape()));
  const int c = m.cols();
  Tensor out(Shape{c});
  for (int j = 0; j < c; ++j) out[j] = m.at(i, j);
  if (track(m)) {
    record(out, [mi = m.impl_ptr(), oi = out.impl_ptr(), i, c] {
      if (!mi->requires_grad) return;
      if (mi->grad.empty()) mi->grad.assign(mi->data.size(), 0.0);
      const auto& g = oi->grad;
      double* grow = mi->grad.data() + static_cast<size_t>(i) * c;
      for (int j = 0; j < c; ++j) grow[j] += g[static_cast<size_t>(j)];
    });
  }
  return out;
}

Tensor Tape::slice(const Tensor& v, int start, int len) {
  check_vector("slice", v);
  if (start < 0 || len <= 0 || start + len > v.size())
    fail("slice", "range [" + std::to_string(start) + "," + std::to_string(start + len) +
                      ") out of bounds for " + shape_str(v.shape()));
  Tensor out(Shape{len});
  for (int j = 0; j < len; ++j) out[j] = v[start + j];
  if (track(v)) {
    record(out, [vi = v.impl_ptr(), oi = out.impl_ptr(), start, len] {
      if (!vi->requires_grad) return;
      if (vi->grad.empty()) vi->grad.assign(vi->data.size(), 0.0);
      const auto& g = oi->grad;
      for (int j = 0; j < len; ++j) vi->grad[static_cast<size_t>(start + j)] += g[static_cast<size_t>(j)];
    });
  }
  return out;
}

Tensor Tape::pick(const Tensor& v, int i) {
  check_vector("pick", v);
  if (i < 0 || i >= v.size())
    fail("pick", "index " + std::to_string(i) + " out of range for " + shape_str(v.shape()));
  Tensor out = Tensor::scalar(v[i]);
  if (track(v)) {
    record(out, [vi = v.impl_ptr(), oi = out.impl_ptr(), i] {
      if (!vi->requires_grad) return;
      if (vi->grad.empty()) vi->grad.assign(vi->data.size(), 0.0);
      vi->grad[static_cast<size_t>(i)] += oi->grad[0];
    });
  }
  return out;
}

Tensor Tape::sum(const Tensor& x) {
  double acc = 0.0;
  const int n = x.size();
  for (int i = 0; i < n; ++i) acc += x[i];
  Tensor out = Tensor::scalar(acc);
  if (track(x)) {
    record(out, [xi = x.impl_ptr(), oi = out.impl_ptr()] {
      if (!xi->requires_grad) return;
      if (xi->grad.empty()) xi->grad.assign(xi->data.size(), 0.0);
      double g = oi->grad[0];
      for (auto& v : xi->grad) v += g;
    });
  }
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || !loss.is_scalar())
    throw std::invalid_argument("ianmt: backward: loss must be a scalar, got shape " +
                                (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  loss.impl()->grad.assign(1, 1.0);
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)();
  records_.clear();
}

}  // namespace ianmt
