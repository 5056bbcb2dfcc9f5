#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "ianmt/finite_diff.hpp"
#include "ianmt/rng.hpp"
#include "ianmt/tensor.hpp"

using namespace ianmt;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -2.0, double hi = 2.0) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("tensor construction and invariants") {
  Tensor t(Shape{2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(t.size() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.at(1, 2) == 6.0);
  CHECK_THROWS_AS(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(Shape{0, 2}), std::invalid_argument);
  CHECK_FALSE(t.has_grad());
  t.ensure_grad();
  CHECK(t.has_grad());
  CHECK(t.grad().size() == 6);  // grad mirrors the data shape
}

TEST_CASE("forward op examples") {
  Tape tape;

  SUBCASE("softmax of uniform logits") {
    Tensor x(Shape{3}, std::vector<double>{0, 0, 0});
    Tensor y = tape.softmax(x);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  SUBCASE("sigmoid and tanh at zero") {
    Tensor x = Tensor::scalar(0.0);
    CHECK(tape.sigmoid(x).value() == 0.5);
    CHECK(tape.tanh(x).value() == 0.0);
  }

  SUBCASE("identity matmul") {
    Tensor eye(Shape{3, 3});
    for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
    Tensor v(Shape{3}, std::vector<double>{0.3, -1.7, 2.5});
    Tensor out = tape.matmul(eye, v);
    for (int i = 0; i < 3; ++i) CHECK(out[i] == v[i]);
  }

  SUBCASE("shape mismatch names the op and both shapes") {
    Tensor a(Shape{2, 3});
    Tensor b(Shape{4});
    std::string msg = thrown_message([&] { tape.matmul(a, b); });
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("[2,3]") != std::string::npos);
    CHECK(msg.find("[4]") != std::string::npos);

    msg = thrown_message([&] { tape.add(a, b); });
    CHECK(msg.find("add") != std::string::npos);
  }
}

TEST_CASE("backward basics") {
  SUBCASE("sum gradient is all ones") {
    Tape tape;
    Tensor v(Shape{3}, std::vector<double>{1.0, -2.0, 0.5}, true);
    Tensor loss = tape.sum(v);
    tape.backward(loss);
    for (int i = 0; i < 3; ++i) CHECK(v.grad()[static_cast<size_t>(i)] == 1.0);
    CHECK(tape.num_records() == 0);  // tape discarded after backward
  }

  SUBCASE("sigmoid gradient at zero is 0.25") {
    Tape tape;
    Tensor x = Tensor::scalar(0.0);
    x.set_requires_grad(true);
    Tensor loss = tape.sigmoid(x);
    tape.backward(loss);
    CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("non-scalar loss is rejected") {
    Tape tape;
    Tensor v(Shape{3}, 1.0, true);
    Tensor y = tape.tanh(v);
    CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);
  }

  SUBCASE("a tensor used twice accumulates both contributions") {
    Tape tape;
    Tensor x = Tensor::scalar(1.5);
    x.set_requires_grad(true);
    Tensor loss = tape.add(x, x);
    tape.backward(loss);
    CHECK(x.grad()[0] == 2.0);
  }

  SUBCASE("backward is linear in the loss") {
    auto grad_of = [](double a, double b) {
      Tape tape;
      Tensor x(Shape{4}, std::vector<double>{0.3, -0.9, 1.1, 0.2}, true);
      Tensor f = tape.sum(tape.tanh(x));
      Tensor g = tape.sum(tape.mul(x, x));
      Tensor loss = tape.add(tape.scale(f, a), tape.scale(g, b));
      tape.backward(loss);
      return x.grad();
    };
    auto g_f = grad_of(1.0, 0.0);
    auto g_g = grad_of(0.0, 1.0);
    auto g_mix = grad_of(2.0, -3.0);
    for (size_t i = 0; i < g_mix.size(); ++i)
      CHECK(g_mix[i] == doctest::Approx(2.0 * g_f[i] - 3.0 * g_g[i]).epsilon(1e-12));
  }
}

TEST_CASE("softmax properties over random inputs") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Tape tape;
    int n = rng.uniform_int(1, 8);
    Tensor x = random_tensor(rng, {n}, -30.0, 30.0);
    Tensor y = tape.softmax(x);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(y[i] >= 0.0);
      sum += y[i];
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);

    // invariance to constant shifts (max subtraction)
    double c = rng.uniform(-50.0, 50.0);
    Tensor shifted = x.clone();
    for (int i = 0; i < n; ++i) shifted[i] += c;
    Tensor y2 = tape.softmax(shifted);
    for (int i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y[i]).epsilon(1e-12));
  }
}

TEST_CASE("finite_diff_check oracle calibration") {
  SUBCASE("identity function") {
    Tensor x(Shape{4}, std::vector<double>{0.5, -1.0, 2.0, 0.1});
    auto f = [](Tape& tape, const Tensor& t) { return tape.sum(t); };
    CHECK(finite_diff_check(f, x, 1e-5).max_rel_error <= 1e-10);
  }

  SUBCASE("tanh at 0.3") {
    Tensor x = Tensor::scalar(0.3);
    auto f = [](Tape& tape, const Tensor& t) { return tape.sum(tape.tanh(t)); };
    CHECK(finite_diff_check(f, x, 1e-5).max_rel_error <= 1e-7);
  }

  SUBCASE("non-finite evaluation is reported with the coordinate") {
    Tensor x(Shape{2}, std::vector<double>{1.0, 0.0});
    auto f = [](Tape& tape, const Tensor& t) { return tape.sum(tape.log(t)); };
    FiniteDiffReport rep = finite_diff_check(f, x, 1e-5);
    CHECK(rep.non_finite);
  }
}

TEST_CASE("every differentiable op passes the finite-difference oracle") {
  // 100 seeded random instances per op family, dims <= 8, relative error <= 1e-6
  const double kTol = 1e-6;
  const double kStep = 1e-5;

  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed) + 1000);
    const int n = rng.uniform_int(2, 8);
    const int m = rng.uniform_int(2, 8);
    const int k = rng.uniform_int(2, 8);

    Tensor vec_n = random_tensor(rng, {n});
    Tensor vec_m = random_tensor(rng, {m});
    Tensor mat_nm = random_tensor(rng, {n, m});
    Tensor mat_km = random_tensor(rng, {k, m});
    Tensor mat_mk = random_tensor(rng, {m, k});
    Tensor reduce_n = random_tensor(rng, {n}, 0.3, 1.5);
    Tensor reduce_m = random_tensor(rng, {m}, 0.3, 1.5);
    Tensor reduce_k = random_tensor(rng, {k}, 0.3, 1.5);

    auto reduce_mat = [&](Tape& tape, const Tensor& mat, const Tensor& wrow, const Tensor& wcol) {
      return tape.sum(tape.mul(tape.matmul(mat, wcol), wrow));
    };

    struct Case {
      const char* name;
      Tensor x;
      std::function<Tensor(Tape&, const Tensor&)> f;
    };
    std::vector<Case> cases;

    cases.push_back({"add", vec_n, [&](Tape& t, const Tensor& x) { return t.sum(t.add(x, vec_n)); }});
    cases.push_back({"sub", vec_n, [&](Tape& t, const Tensor& x) { return t.sum(t.sub(vec_n, x)); }});
    cases.push_back({"mul_self", vec_n, [&](Tape& t, const Tensor& x) { return t.sum(t.mul(x, x)); }});
    cases.push_back({"tanh", vec_n, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.tanh(x), reduce_n));
                     }});
    cases.push_back({"sigmoid", vec_n, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.sigmoid(x), reduce_n));
                     }});
    cases.push_back({"log", random_tensor(rng, {n}, 0.4, 3.0), [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.log(x), reduce_n));
                     }});
    cases.push_back({"scale", vec_n, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.scale(x, -1.7));
                     }});
    cases.push_back({"softmax", vec_n, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.softmax(x), reduce_n));
                     }});
    cases.push_back({"matmul_vec_lhs", mat_nm, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.matmul(x, vec_m), reduce_n));
                     }});
    cases.push_back({"matmul_vec_rhs", vec_m, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.matmul(mat_nm, x), reduce_n));
                     }});
    cases.push_back({"matmul_mat_lhs", mat_nm, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.matmul(x, mat_mk), reduce_n, reduce_k);
                     }});
    cases.push_back({"matmul_mat_rhs", mat_mk, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.matmul(mat_nm, x), reduce_n, reduce_k);
                     }});
    cases.push_back({"matmul_nt_lhs", mat_nm, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.matmul_nt(x, mat_km), reduce_n, reduce_k);
                     }});
    cases.push_back({"matmul_nt_rhs", mat_km, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.matmul_nt(mat_nm, x), reduce_n, reduce_k);
                     }});
    cases.push_back({"add_rowvec_mat", mat_nm, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.add_rowvec(x, vec_m), reduce_n, reduce_m);
                     }});
    cases.push_back({"add_rowvec_vec", vec_m, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.add_rowvec(mat_nm, x), reduce_n, reduce_m);
                     }});
    cases.push_back({"outer_lhs", vec_n, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.outer(x, vec_m), reduce_n, reduce_m);
                     }});
    cases.push_back({"outer_rhs", vec_m, [&](Tape& t, const Tensor& x) {
                       return reduce_mat(t, t.outer(vec_n, x), reduce_n, reduce_m);
                     }});
    cases.push_back({"weighted_sum_w", vec_n, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.weighted_sum(x, mat_nm), reduce_m));
                     }});
    cases.push_back({"weighted_sum_cells", mat_nm, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.weighted_sum(vec_n, x), reduce_m));
                     }});
    cases.push_back({"concat", vec_n, [&](Tape& t, const Tensor& x) {
                       Tensor c = t.concat(x, vec_m);
                       return t.sum(t.mul(t.tanh(c), t.concat(reduce_n, reduce_m)));
                     }});
    cases.push_back({"lookup", mat_nm, [&](Tape& t, const Tensor& x) {
                       return t.sum(t.mul(t.lookup(x, 1), reduce_m));
                     }});
    Tensor stack_w = random_tensor(rng, {3});
    cases.push_back({"stack_rows", vec_m, [&](Tape& t, const Tensor& x) {
                       Tensor stacked = t.stack_rows({x, vec_m, x});
                       return t.sum(t.mul(t.weighted_sum(stack_w, stacked), reduce_m));
                     }});
    cases.push_back({"row_slice_pick", mat_nm, [&](Tape& t, const Tensor& x) {
                       Tensor r = t.row(x, 0);
                       Tensor s = t.slice(r, 0, m > 1 ? m - 1 : 1);
                       return t.pick(t.tanh(s), 0);
                     }});

    for (auto& c : cases) {
      FiniteDiffReport rep = finite_diff_check(c.f, c.x, kStep);
      INFO("op=", std::string(c.name), " seed=", seed, " worst coord=", rep.worst_coord);
      CHECK_FALSE(rep.non_finite);
      CHECK(rep.max_rel_error <= kTol);
    }
  }
}

TEST_CASE("random composite expression gradient matches finite differences") {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(900 + static_cast<std::uint64_t>(seed));
    const int n = rng.uniform_int(2, 8);
    Tensor w1 = random_tensor(rng, {n, n});
    Tensor w2 = random_tensor(rng, {n, n});
    Tensor b = random_tensor(rng, {n});
    Tensor x = random_tensor(rng, {n});
    auto f = [&](Tape& t, const Tensor& v) {
      Tensor h = t.tanh(t.add(t.matmul(w1, v), b));
      Tensor g = t.sigmoid(t.matmul(w2, h));
      Tensor p = t.softmax(t.mul(g, h));
      return t.scale(t.log(t.pick(p, 0)), -1.0);
    };
    FiniteDiffReport rep = finite_diff_check(f, x, 1e-5);
    INFO("seed=", seed);
    CHECK(rep.max_rel_error <= 1e-6);
  }
}
