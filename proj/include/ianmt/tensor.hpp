#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ianmt {

using Shape = std::vector<int>;

std::string shape_str(const Shape& s);

struct TensorImpl {
  Shape shape;
  std::vector<double> data;   // row-major
  std::vector<double> grad;   // empty until first accumulation
  bool requires_grad = false;
  std::string name;
};

/// Dense real-valued tensor handle. Copies share storage; use clone() for a
/// deep copy. Rank 1 tensors are vectors, rank 2 matrices, shape {1} scalars.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int size() const { return static_cast<int>(impl_->data.size()); }
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  bool is_vector() const { return rank() == 1; }
  bool is_matrix() const { return rank() == 2; }
  bool is_scalar() const { return size() == 1 && rank() == 1; }
  int rows() const;
  int cols() const;

  double value() const;  // scalar tensors only
  double operator[](int i) const { return impl_->data[static_cast<size_t>(i)]; }
  double& operator[](int i) { return impl_->data[static_cast<size_t>(i)]; }
  double at(int r, int c) const;
  double& at(int r, int c);
  const std::vector<double>& data() const { return impl_->data; }
  std::vector<double>& data() { return impl_->data; }

  bool requires_grad() const { return impl_ && impl_->requires_grad; }
  void set_requires_grad(bool b) { impl_->requires_grad = b; }
  bool has_grad() const { return impl_ && !impl_->grad.empty(); }
  const std::vector<double>& grad() const;
  std::vector<double>& ensure_grad();  // zero-filled on first call
  void zero_grad();

  const std::string& name() const { return impl_->name; }
  void set_name(std::string n) { impl_->name = std::move(n); }

  Tensor clone() const;  // deep copy of shape+data; grad not copied
  void copy_data_from(const Tensor& other);

  bool all_finite() const;

  TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<TensorImpl>& impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<TensorImpl> impl_;
};

/// Records one forward pass worth of operations and replays them in reverse
/// to accumulate gradients. A tape and the tensors flowing through it are a
/// single-threaded unit of work; records are discarded after backward().
///
/// Ops validate shapes and throw std::invalid_argument naming the op and the
/// offending shapes. An op records a backward rule only while recording() is
/// on and at least one input requires grad.
class Tape {
 public:
  Tape() = default;
  explicit Tape(bool recording) : recording_(recording) {}

  bool recording() const { return recording_; }
  size_t num_records() const { return records_.size(); }

  // elementwise
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor tanh(const Tensor& x);
  Tensor sigmoid(const Tensor& x);
  Tensor log(const Tensor& x);
  Tensor scale(const Tensor& x, double c);

  // matrix / vector
  Tensor matmul(const Tensor& a, const Tensor& b);     // {r,c}x{c,k} or {r,c}x{c}
  Tensor matmul_nt(const Tensor& a, const Tensor& b);  // {n,m}x{k,m} -> {n,k}
  Tensor add_rowvec(const Tensor& m, const Tensor& v);
  Tensor outer(const Tensor& u, const Tensor& v);
  Tensor weighted_sum(const Tensor& w, const Tensor& cells);  // {n},{n,m}->{m}

  // structure
  Tensor softmax(const Tensor& x);  // vector, max-subtracted
  Tensor concat(const Tensor& a, const Tensor& b);
  Tensor lookup(const Tensor& table, int row);
  Tensor stack_rows(const std::vector<Tensor>& rows);
  Tensor row(const Tensor& m, int i);
  Tensor slice(const Tensor& v, int start, int len);
  Tensor pick(const Tensor& v, int i);
  Tensor sum(const Tensor& x);

  /// Seeds d(loss)/d(loss)=1 and replays recorded ops in reverse, accumulating
  /// into the grad slot of every tensor on the path that requires grad.
  /// Rejects non-scalar losses. The tape is cleared afterwards.
  void backward(const Tensor& loss);

 private:
  using BackwardFn = std::function<void()>;
  std::vector<BackwardFn> records_;
  bool recording_ = true;

  bool track(const Tensor& a) const { return recording_ && a.requires_grad(); }
  bool track(const Tensor& a, const Tensor& b) const {
    return recording_ && (a.requires_grad() || b.requires_grad());
  }
  void record(Tensor& out, BackwardFn fn);
};

}  // namespace ianmt
